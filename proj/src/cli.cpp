#include "pgr/cli.hpp"

#include <glob.h>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pgr/bench.hpp"
#include "pgr/bjontegaard.hpp"
#include "pgr/codec.hpp"
#include "pgr/errors.hpp"
#include "pgr/frame_io.hpp"
#include "pgr/ground_removal.hpp"
#include "pgr/oracle.hpp"
#include "pgr/parallel.hpp"
#include "pgr/rate_sweep.hpp"
#include "pgr/synthetic_scene.hpp"

namespace pgr {

namespace fs = std::filesystem;

namespace {

struct NamedFrame {
  std::string name;
  AnnotatedFrame frame;
};

// Options shared by every command that consumes frames.
struct FrameSource {
  std::string input_glob;
  int synthetic = 0;
  std::string style = "open";
  std::uint64_t seed = 1;
  int azimuth_steps = 1024;

  void add_to(CLI::App* cmd) {
    cmd->add_option("-i,--input", input_glob, "Glob of binary frames (*.bin)");
    cmd->add_option("--synthetic", synthetic, "Generate this many synthetic frames instead")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--style", style, "Synthetic scene style")
        ->check(CLI::IsMember({"open", "urban"}));
    cmd->add_option("--seed", seed, "Seed for synthetic frames (frame i uses seed + i)");
    cmd->add_option("--azimuth-steps", azimuth_steps, "Synthetic ground samples per ring")
        ->check(CLI::PositiveNumber);
  }

  SceneOptions scene_options() const {
    SceneOptions o;
    o.style = style == "urban" ? SceneStyle::Urban : SceneStyle::Open;
    o.azimuth_steps = azimuth_steps;
    return o;
  }
};

std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<fs::path> out;
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

AnnotatedFrame synthetic_frame(const SceneOptions& options, std::uint64_t seed, std::string* name) {
  const SyntheticSceneSpec spec = make_scene_spec(options, seed);
  SyntheticScene scene = synthesize_scene(spec, seed);
  if (name) *name = spec.frame_id;
  return AnnotatedFrame{std::move(scene.cloud), std::move(scene.ground), std::move(scene.boxes)};
}

std::vector<NamedFrame> load_frames(const FrameSource& src) {
  std::vector<NamedFrame> frames;
  if (src.synthetic > 0) {
    if (!src.input_glob.empty()) throw ContractError("use either --input or --synthetic, not both");
    for (int i = 0; i < src.synthetic; ++i) {
      NamedFrame nf;
      nf.frame = synthetic_frame(src.scene_options(), src.seed + static_cast<std::uint64_t>(i), &nf.name);
      frames.push_back(std::move(nf));
    }
    return frames;
  }
  if (src.input_glob.empty()) throw ContractError("no frames: pass --input or --synthetic");
  for (const fs::path& path : expand_glob(src.input_glob)) {
    NamedFrame nf;
    nf.name = path.stem().string();
    nf.frame.cloud = load_frame_binary(path);
    if (fs::exists(ground_path_for(path))) nf.frame.ground = load_ground_mask(ground_path_for(path));
    if (fs::exists(boxes_path_for(path))) nf.frame.boxes = load_boxes(boxes_path_for(path));
    if (nf.frame.ground && nf.frame.ground->size() != nf.frame.cloud.size()) {
      throw ContractError("ground mask for '" + path.string() + "' has " +
                          std::to_string(nf.frame.ground->size()) + " entries, frame has " +
                          std::to_string(nf.frame.cloud.size()) + " points");
    }
    frames.push_back(std::move(nf));
  }
  if (frames.empty()) throw ContractError("no frames match '" + src.input_glob + "'");
  return frames;
}

// Tracks files written by a command so a failure can remove them.
class OutputSet {
 public:
  void add(fs::path p) { paths_.push_back(std::move(p)); }
  void rollback() {
    std::error_code ec;
    for (const auto& p : paths_) fs::remove(p, ec);
    paths_.clear();
  }
  void commit() { paths_.clear(); }

 private:
  std::vector<fs::path> paths_;
};

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream ss;
  ss << std::setprecision(precision) << v;
  return ss.str();
}

std::vector<double> parse_scales(const std::vector<std::string>& items) {
  std::vector<double> scales;
  for (const auto& s : items) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw ParseError("invalid scale '" + s + "'");
    scales.push_back(v);
  }
  return scales;
}

// ---------------------------------------------------------------------------

struct SummaryRow {
  std::string frame;
  std::size_t points_in = 0;
  std::size_t points_out = 0;
  std::size_t pillars = 0;
  std::size_t retained = 0;
  std::size_t restored = 0;
};

std::string format_summary(const std::vector<SummaryRow>& rows, bool with_pillars) {
  std::string out = with_pillars
                        ? "frame,points_in,points_out,removal_fraction,pillars,retained_pillars,restored_pillars,removed_pillars\n"
                        : "frame,points_in,points_out,removal_fraction\n";
  for (const auto& r : rows) {
    const double removed = r.points_in == 0 ? 0.0
                                            : 1.0 - static_cast<double>(r.points_out) /
                                                        static_cast<double>(r.points_in);
    out += r.frame + "," + std::to_string(r.points_in) + "," + std::to_string(r.points_out) + "," +
           fmt(removed);
    if (with_pillars) {
      out += "," + std::to_string(r.pillars) + "," + std::to_string(r.retained) + "," +
             std::to_string(r.restored) + "," + std::to_string(r.pillars - r.retained - r.restored);
    }
    out += "\n";
  }
  return out;
}

struct RemoveArgs {
  FrameSource source;
  std::string config = "pgr-c0-kitti";
  std::string out_dir;
  bool no_restoration = false;
  unsigned workers = 1;
};

int cmd_remove(const RemoveArgs& a, std::ostream& out) {
  const RemovalConfig cfg = resolve_removal_config(a.config);
  const auto frames = load_frames(a.source);
  const fs::path dir(a.out_dir);
  ensure_directory(dir);

  std::vector<SummaryRow> rows(frames.size());
  std::vector<fs::path> written(frames.size());
  OutputSet outputs;
  try {
    parallel_for(frames.size(), a.workers, [&](std::size_t i) {
      const auto& nf = frames[i];
      PgrOptions opts;
      opts.restoration = !a.no_restoration;
      const PgrResult r = apply_pgr(nf.frame.cloud, cfg, opts);
      const PointCloud kept = filter_cloud(nf.frame.cloud, r.keep);
      const fs::path path = dir / (nf.name + ".bin");
      save_frame_binary(kept, path);
      written[i] = path;
      rows[i] = {nf.name, nf.frame.cloud.size(), kept.size(), r.pillar_count, r.retained_pillars,
                 r.restored_pillars};
    });
    for (const auto& p : written) {
      if (!p.empty()) outputs.add(p);
    }
    const fs::path summary = dir / "summary.csv";
    outputs.add(summary);
    write_file_atomic(summary, format_summary(rows, true));
  } catch (...) {
    for (const auto& p : written) {
      if (!p.empty()) outputs.add(p);
    }
    outputs.rollback();
    throw;
  }
  outputs.commit();
  out << format_summary(rows, true);
  return 0;
}

struct OracleArgs {
  FrameSource source;
  double ef = 0.0;
  std::string out_dir;
  unsigned workers = 1;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  const Preprocessor pre = Preprocessor::oracle(OracleConfig{a.ef});
  const auto frames = load_frames(a.source);
  const fs::path dir(a.out_dir);
  ensure_directory(dir);
  std::vector<SummaryRow> rows(frames.size());
  std::vector<fs::path> written(frames.size());
  OutputSet outputs;
  try {
    parallel_for(frames.size(), a.workers, [&](std::size_t i) {
      const auto& nf = frames[i];
      if (!nf.frame.ground) throw ContractError("frame '" + nf.name + "' has no ground mask");
      const PointCloud kept = filter_cloud(nf.frame.cloud, pre.apply(nf.frame));
      const fs::path path = dir / (nf.name + ".bin");
      save_frame_binary(kept, path);
      written[i] = path;
      rows[i] = {nf.name, nf.frame.cloud.size(), kept.size(), 0, 0, 0};
    });
    for (const auto& p : written) outputs.add(p);
    const fs::path summary = dir / "summary.csv";
    outputs.add(summary);
    write_file_atomic(summary, format_summary(rows, false));
  } catch (...) {
    for (const auto& p : written) {
      if (!p.empty()) outputs.add(p);
    }
    outputs.rollback();
    throw;
  }
  outputs.commit();
  out << format_summary(rows, false);
  return 0;
}

struct EncodeArgs {
  std::string input;
  std::string output;
  double scale = 0.063;
  double units = 1000.0;
  std::uint64_t original_count = 0;
};

int cmd_encode(const EncodeArgs& a, std::ostream& out) {
  const PointCloud cloud = load_frame_binary(a.input);
  std::optional<std::uint64_t> n_orig;
  if (a.original_count > 0) n_orig = a.original_count;
  const Bitstream bs = encode_frame(cloud, CodecConfig{a.scale, a.units}, n_orig);
  write_bitstream(bs, a.output);
  out << "points_in," << cloud.size() << "\n"
      << "points_coded," << bs.header.point_count << "\n"
      << "bytes," << bs.size_bytes() << "\n";
  if (bs.header.original_point_count > 0) out << "bpp," << fmt(measure_bpp(bs), 10) << "\n";
  return 0;
}

struct DecodeArgs {
  std::string input;
  std::string output;
};

int cmd_decode(const DecodeArgs& a, std::ostream& out) {
  const Bitstream bs = read_bitstream(a.input);
  const PointCloud cloud = decode_frame(bs);
  save_frame_binary(cloud, a.output);
  out << "points," << cloud.size() << "\n";
  return 0;
}

struct SweepArgs {
  FrameSource source;
  std::vector<std::string> preprocessors{"none"};
  std::vector<std::string> scales;
  double units = 1000.0;
  std::string output;
  std::string metric_file;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  std::vector<Preprocessor> pres;
  for (const auto& p : a.preprocessors) pres.push_back(Preprocessor::parse(p));
  std::vector<double> scales = a.scales.empty()
                                   ? std::vector<double>(std::begin(kStandardScales), std::end(kStandardScales))
                                   : parse_scales(a.scales);
  const auto named = load_frames(a.source);
  std::vector<AnnotatedFrame> frames;
  frames.reserve(named.size());
  for (const auto& nf : named) frames.push_back(nf.frame);

  std::vector<RateRow> rows;
  for (const auto& pre : pres) {
    auto part = rate_sweep(frames, pre, scales, a.units);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (!a.metric_file.empty()) join_metrics(rows, parse_metric_table(read_file(a.metric_file)));
  const std::string table = format_rate_table(rows);
  if (!a.output.empty()) {
    write_file_atomic(a.output, table);
  }
  out << table;
  return 0;
}

struct BenchArgs {
  FrameSource source;
  std::string config = "pgr-c0-kitti";
  int repetitions = 3;
  bool stage_breakdown = false;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const RemovalConfig cfg = resolve_removal_config(a.config);
  const auto named = load_frames(a.source);
  std::vector<PointCloud> clouds;
  clouds.reserve(named.size());
  for (const auto& nf : named) clouds.push_back(nf.frame.cloud);

  const BenchReport r = bench_pipeline(clouds, cfg, a.repetitions);
  out << "frames," << r.frames_processed << "\n"
      << "wall_s," << fmt(r.wall_s) << "\n"
      << "fps," << fmt(r.fps) << "\n"
      << "ms_per_frame," << fmt(r.frames_processed ? 1000.0 * r.wall_s / r.frames_processed : 0.0) << "\n"
      << "points_in," << r.points_in << "\n"
      << "points_out," << r.points_out << "\n";
  if (a.stage_breakdown) {
    out << "stage_grid_build_s," << fmt(r.grid_build_s) << "\n"
        << "stage_removal_s," << fmt(r.removal_s) << "\n"
        << "stage_restoration_s," << fmt(r.restoration_s) << "\n"
        << "stage_mask_apply_s," << fmt(r.mask_apply_s) << "\n";
  }
  for (std::size_t i = 0; i < r.kept_per_frame.size(); ++i) {
    out << "frame_points," << named[i].name << "," << named[i].frame.cloud.size() << ","
        << r.kept_per_frame[i] << "\n";
  }
  out << "machine_hardware_threads," << std::thread::hardware_concurrency() << "\n"
      << "machine_compiler," << __VERSION__ << "\n";
  return 0;
}

struct BdArgs {
  std::string anchor;
  std::string test;
  std::string anchor_metric;
  std::string test_metric;
  std::string anchor_preprocessor;
  std::string test_preprocessor;
};

int cmd_bd(const BdArgs& a, std::ostream& out) {
  auto anchor_rows = parse_rate_table(read_file(a.anchor));
  auto test_rows = parse_rate_table(read_file(a.test));
  if (!a.anchor_metric.empty()) join_metrics(anchor_rows, parse_metric_table(read_file(a.anchor_metric)));
  if (!a.test_metric.empty()) join_metrics(test_rows, parse_metric_table(read_file(a.test_metric)));
  const double bd = bd_metric(rate_curve(anchor_rows, a.anchor_preprocessor),
                              rate_curve(test_rows, a.test_preprocessor));
  out << "bd_metric," << fmt(bd, 12) << "\n";
  return 0;
}

struct SynthArgs {
  int count = 1;
  std::string style = "open";
  std::uint64_t seed = 1;
  int azimuth_steps = 1024;
  std::string out_dir;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const fs::path dir(a.out_dir);
  ensure_directory(dir);
  SceneOptions options;
  options.style = a.style == "urban" ? SceneStyle::Urban : SceneStyle::Open;
  options.azimuth_steps = a.azimuth_steps;
  OutputSet outputs;
  try {
    for (int i = 0; i < a.count; ++i) {
      const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
      const SyntheticSceneSpec spec = make_scene_spec(options, seed);
      const SyntheticScene scene = synthesize_scene(spec, seed);
      const fs::path frame = dir / (spec.frame_id + ".bin");
      outputs.add(frame);
      save_frame_binary(scene.cloud, frame);
      outputs.add(ground_path_for(frame));
      save_ground_mask(scene.ground, ground_path_for(frame));
      outputs.add(boxes_path_for(frame));
      save_boxes(scene.boxes, boxes_path_for(frame));
      out << frame.string() << "," << scene.cloud.size() << "," << scene.boxes.size() << "\n";
    }
  } catch (...) {
    outputs.rollback();
    throw;
  }
  outputs.commit();
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pillar-based ground removal, octree coding and rate evaluation for LiDAR frames"};
  app.name(args.empty() ? "pgr" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);

  std::string presets;
  for (const auto& n : preset_names()) presets += (presets.empty() ? "" : ", ") + n;

  RemoveArgs remove;
  auto* c_remove = app.add_subcommand("remove", "Remove ground pillars and write filtered frames");
  remove.source.add_to(c_remove);
  c_remove->add_option("-c,--config", remove.config, "Preset (" + presets + "), alias c0..c4, or JSON file");
  c_remove->add_option("-o,--out", remove.out_dir, "Output directory")->required();
  c_remove->add_flag("--no-restoration", remove.no_restoration, "Skip the restoration phase");
  c_remove->add_option("-j,--workers", remove.workers, "Frames processed in parallel")->check(CLI::PositiveNumber);

  OracleArgs oracle;
  auto* c_oracle = app.add_subcommand("oracle", "Omniscient removal from ground labels and boxes");
  oracle.source.add_to(c_oracle);
  c_oracle->add_option("--ef", oracle.ef, "Box extension factor")->check(CLI::NonNegativeNumber);
  c_oracle->add_option("-o,--out", oracle.out_dir, "Output directory")->required();
  c_oracle->add_option("-j,--workers", oracle.workers, "Frames processed in parallel")->check(CLI::PositiveNumber);

  EncodeArgs encode;
  auto* c_encode = app.add_subcommand("encode", "Encode one binary frame into an octree bitstream");
  c_encode->add_option("-i,--input", encode.input, "Binary frame")->required();
  c_encode->add_option("-o,--output", encode.output, "Bitstream file")->required();
  c_encode->add_option("-s,--scale", encode.scale, "Geometry scale in (0, 1]");
  c_encode->add_option("--units", encode.units, "Source units per meter");
  c_encode->add_option("--original-count", encode.original_count, "Pre-removal point count for bpp");

  DecodeArgs decode;
  auto* c_decode = app.add_subcommand("decode", "Decode a bitstream into a binary frame");
  c_decode->add_option("-i,--input", decode.input, "Bitstream file")->required();
  c_decode->add_option("-o,--output", decode.output, "Binary frame")->required();

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Mean bpp per geometry scale and preprocessor");
  sweep.source.add_to(c_sweep);
  c_sweep->add_option("-p,--preprocessor", sweep.preprocessors, "none | pgr:<config> | oracle:<EF>; repeatable");
  c_sweep->add_option("--scales", sweep.scales, "Geometry scales (default: the six standard scales)")->delimiter(',');
  c_sweep->add_option("--units", sweep.units, "Source units per meter");
  c_sweep->add_option("-o,--output", sweep.output, "Write the rate table here");
  c_sweep->add_option("--metric", sweep.metric_file, "scale,metric CSV joined into the table");

  BenchArgs bench;
  bench.source.synthetic = 10;
  bench.source.azimuth_steps = 1500;
  auto* c_bench = app.add_subcommand("bench", "Sequential throughput of the removal pipeline");
  bench.source.add_to(c_bench);
  c_bench->add_option("-c,--config", bench.config, "Removal config");
  c_bench->add_option("-r,--repetitions", bench.repetitions, "Passes over the frame set")->check(CLI::PositiveNumber);
  c_bench->add_flag("--stage-breakdown", bench.stage_breakdown, "Print per-stage timings");

  BdArgs bd;
  auto* c_bd = app.add_subcommand("bd", "Bjontegaard delta of the metric between two rate tables");
  c_bd->add_option("--anchor", bd.anchor, "Anchor rate table")->required();
  c_bd->add_option("--test", bd.test, "Test rate table")->required();
  c_bd->add_option("--anchor-metric", bd.anchor_metric, "scale,metric CSV for the anchor");
  c_bd->add_option("--test-metric", bd.test_metric, "scale,metric CSV for the test");
  c_bd->add_option("--anchor-preprocessor", bd.anchor_preprocessor, "Select anchor rows by preprocessor");
  c_bd->add_option("--test-preprocessor", bd.test_preprocessor, "Select test rows by preprocessor");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write synthetic frames with ground masks and boxes");
  c_synth->add_option("-n,--count", synth.count, "Number of frames")->check(CLI::PositiveNumber);
  c_synth->add_option("--style", synth.style, "Scene style")->check(CLI::IsMember({"open", "urban"}));
  c_synth->add_option("--seed", synth.seed, "Seed of the first frame");
  c_synth->add_option("--azimuth-steps", synth.azimuth_steps, "Ground samples per ring")->check(CLI::PositiveNumber);
  c_synth->add_option("-o,--out", synth.out_dir, "Output directory")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"pgr"} : args;
  for (const auto& s : storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (c_remove->parsed()) return cmd_remove(remove, out);
    if (c_oracle->parsed()) return cmd_oracle(oracle, out);
    if (c_encode->parsed()) return cmd_encode(encode, out);
    if (c_decode->parsed()) return cmd_decode(decode, out);
    if (c_sweep->parsed()) return cmd_sweep(sweep, out);
    if (c_bench->parsed()) return cmd_bench(bench, out);
    if (c_bd->parsed()) return cmd_bd(bd, out);
    if (c_synth->parsed()) return cmd_synth(synth, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace pgr
