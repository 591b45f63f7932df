// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "generators.hpp"
#include "pgr/bench.hpp"
#include "pgr/bjontegaard.hpp"
#include "pgr/codec.hpp"
#include "pgr/ground_removal.hpp"
#include "pgr/oracle.hpp"
#include "pgr/preservation.hpp"
#include "pgr/rate_sweep.hpp"
#include "pgr/synthetic_scene.hpp"
#include "reference_pgr.hpp"

using namespace pgr;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::vector<SyntheticScene> make_scenes(SceneStyle style, int count, std::uint64_t first_seed,
                                        int azimuth_steps = 1024) {
  std::vector<SyntheticScene> scenes;
  SceneOptions o;
  o.style = style;
  o.azimuth_steps = azimuth_steps;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(i);
    scenes.push_back(synthesize_scene(make_scene_spec(o, seed), seed));
  }
  return scenes;
}

const std::vector<SyntheticScene>& open_suite() {
  static const auto scenes = make_scenes(SceneStyle::Open, 100, 1000);
  return scenes;
}

const std::vector<SyntheticScene>& urban_suite() {
  static const auto scenes = make_scenes(SceneStyle::Urban, 20, 5000);
  return scenes;
}

// Classes that carry road users; facades are scenery.
constexpr ObjectClass kRoadUsers[] = {ObjectClass::Car, ObjectClass::Pedestrian, ObjectClass::Cyclist};

Outcome oracle_equivalence() {
  std::mt19937_64 rng(20240601);
  const auto presets = preset_names();
  std::size_t grids = 0;
  std::size_t pillars = 0;
  std::size_t mismatches = 0;
  for (int t = 0; t < 1200; ++t) {
    const RemovalConfig cfg = named_config(presets[static_cast<std::size_t>(t) % presets.size()]);
    const PointCloud cloud = testkit::random_pillar_cloud(rng, 50, cfg.resolution);
    const GridSpec spec = GridSpec::anchored(cloud, cfg.resolution);
    const PillarGrid grid = build_grid(cloud, spec);
    const PgrResult r = apply_pgr(cloud, cfg);
    const auto ref = testkit::reference_pgr(cloud, spec, cfg);
    ++grids;
    pillars += ref.pillars.size();
    if (ref.pillars.size() != grid.size() || r.keep != ref.keep) ++mismatches;
    for (const auto& p : ref.pillars) {
      const auto idx = grid.find({p.ix, p.iy});
      if (!idx || (r.decision.phi[*idx] != 0) != p.phi || (r.decision.restored[*idx] != 0) != p.restored) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0,
          format("%zu grids, %zu pillars, %zu flag mismatches vs quadratic reference", grids, pillars, mismatches)};
}

Outcome object_preservation() {
  PreservationReport total;
  double min_removal = 1.0;
  double sum_removal = 0.0;
  for (const auto& s : open_suite()) {
    const PgrResult r = apply_pgr(s.cloud, named_config("pgr-c0-kitti"));
    total += preservation_report(s.cloud, r.keep, s.boxes);
    const double removal = 1.0 - static_cast<double>(r.kept_points) / static_cast<double>(s.cloud.size());
    min_removal = std::min(min_removal, removal);
    sum_removal += removal;
  }
  const double in_boxes = *total.in_boxes.fraction();
  double worst_class = 1.0;
  std::string classes;
  for (ObjectClass c : kRoadUsers) {
    const auto f = total.class_fraction(c);
    if (!f) continue;
    worst_class = std::min(worst_class, *f);
    classes += format(" %s %.4f%%", std::string(to_string(c)).c_str(), 100.0 * *f);
  }
  const bool pass = in_boxes >= 0.999 && worst_class >= 0.995 && min_removal >= 0.20;
  return {pass, format("in-box kept %.4f%% (>= 99.9),%s; removal min %.2f%% mean %.2f%% (>= 20) over %zu scenes",
                       100.0 * in_boxes, classes.c_str(), 100.0 * min_removal,
                       100.0 * sum_removal / static_cast<double>(open_suite().size()), open_suite().size())};
}

Outcome rate_savings() {
  const CodecConfig base{1.0, 1000.0};
  std::size_t frames = 0;
  std::size_t violations = 0;
  double urban_reduction = 0.0;
  std::size_t urban_rows = 0;
  std::vector<const SyntheticScene*> all;
  for (std::size_t i = 0; i < 20; ++i) all.push_back(&open_suite()[i]);
  for (const auto& s : urban_suite()) all.push_back(&s);
  for (std::size_t f = 0; f < all.size(); ++f) {
    const auto& s = *all[f];
    const bool urban = f >= 20;
    const PgrResult r = apply_pgr(s.cloud, named_config("pgr-c0-kitti"));
    const PointCloud kept = filter_cloud(s.cloud, r.keep);
    double prev_none = 0.0;
    double prev_pgr = 0.0;
    for (double scale : kStandardScales) {
      CodecConfig cfg = base;
      cfg.geometry_scale = scale;
      const double none = measure_bpp(encode_frame(s.cloud, cfg));
      const double pgr = measure_bpp(encode_frame(kept, cfg, s.cloud.size()));
      if (!(none > prev_none) || !(pgr > prev_pgr) || !(pgr < none)) ++violations;
      prev_none = none;
      prev_pgr = pgr;
      if (urban) {
        urban_reduction += 1.0 - pgr / none;
        ++urban_rows;
      }
    }
    ++frames;
  }
  const double mean = urban_reduction / static_cast<double>(urban_rows);
  return {violations == 0 && mean >= 0.05,
          format("%zu frames x 6 scales, %zu ordering violations; mean urban bpp reduction %.2f%% (>= 5)", frames,
                 violations, 100.0 * mean)};
}

Outcome codec_round_trip() {
  std::mt19937_64 rng(777);
  std::size_t mismatches = 0;
  double worst_ratio = 0.0;
  double worst_error = 0.0;
  for (int f = 0; f < 100; ++f) {
    const PointCloud cloud = testkit::random_cloud(rng, 4000, 1, 60.0);
    for (double scale : kStandardScales) {
      const CodecConfig cfg{scale, 1000.0};
      const PointCloud out = decode_frame(Bitstream::parse(encode_frame(cloud, cfg).serialize()));

      // Independent quantize/dequantize.
      Vec3 lo{INFINITY, INFINITY, INFINITY};
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3 p = cloud.position(i);
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      }
      const double m = cfg.multiplier();
      std::map<std::array<std::int64_t, 3>, std::size_t> cells;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3 p = cloud.position(i);
        cells[{static_cast<std::int64_t>(std::floor((p.x - lo.x) * m + 0.5)),
               static_cast<std::int64_t>(std::floor((p.y - lo.y) * m + 0.5)),
               static_cast<std::int64_t>(std::floor((p.z - lo.z) * m + 0.5))}] = i;
      }
      std::vector<std::array<double, 3>> want;
      for (const auto& [k, i] : cells) {
        want.push_back({k[0] / m + lo.x, k[1] / m + lo.y, k[2] / m + lo.z});
        const Vec3 p = cloud.position(i);
        worst_error = std::max({worst_error, std::abs(want.back()[0] - p.x), std::abs(want.back()[1] - p.y),
                                std::abs(want.back()[2] - p.z)});
      }
      std::vector<std::array<double, 3>> got;
      for (std::size_t i = 0; i < out.size(); ++i) got.push_back({out.position(i).x, out.position(i).y, out.position(i).z});
      std::sort(want.begin(), want.end());
      std::sort(got.begin(), got.end());
      if (got.size() != want.size()) {
        ++mismatches;
        continue;
      }
      for (std::size_t i = 0; i < got.size(); ++i) {
        for (int d = 0; d < 3; ++d) {
          if (std::abs(got[i][d] - want[i][d]) > 1e-9) {
            ++mismatches;
            i = got.size();
            break;
          }
        }
      }

      // Every input point has a decoded point within the rounding bound.
      const double bound = 0.5 / m + 1e-9;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3 p = cloud.position(i);
        const std::array<double, 3> q{std::floor((p.x - lo.x) * m + 0.5) / m + lo.x,
                                      std::floor((p.y - lo.y) * m + 0.5) / m + lo.y,
                                      std::floor((p.z - lo.z) * m + 0.5) / m + lo.z};
        const auto it = std::lower_bound(got.begin(), got.end(), q, [](const auto& a, const auto& b) {
          for (int d = 0; d < 3; ++d) {
            if (a[d] < b[d] - 1e-9) return true;
            if (a[d] > b[d] + 1e-9) return false;
          }
          return false;
        });
        if (it == got.end()) {
          ++mismatches;
          break;
        }
        const double err = std::max({std::abs((*it)[0] - p.x), std::abs((*it)[1] - p.y), std::abs((*it)[2] - p.z)});
        worst_ratio = std::max(worst_ratio, err / bound);
        if (err > bound || err > 0.5 / scale + 1e-9) ++mismatches;
      }
    }
  }
  return {mismatches == 0,
          format("100 frames x 6 scales, %zu mismatches; worst L-inf error %.3g m = %.4f of half a step "
                 "(half step at 0.01 is %.3g m, stated bound 0.5/scale = %.0f)",
                 mismatches, worst_error, worst_ratio, 0.5 / (0.01 * 1000.0), 0.5 / 0.01)};
}

Outcome throughput() {
  const auto scenes = make_scenes(SceneStyle::Urban, 30, 9000, 1400);
  std::vector<PointCloud> clouds;
  std::size_t points = 0;
  for (const auto& s : scenes) {
    points += s.cloud.size();
    clouds.push_back(s.cloud);
  }
  const BenchReport r = bench_pipeline(clouds, named_config("pgr-c0-kitti"), 3);
  const double mean_points = static_cast<double>(points) / static_cast<double>(clouds.size());
  return {r.fps >= 30.0 && mean_points >= 100000.0,
          format("%.1f fps (>= 30) over %zu sequential frames of %.0f points on average; "
                 "grid %.2f ms, removal %.2f ms, restoration %.2f ms, mask %.2f ms per frame",
                 r.fps, r.frames_processed, mean_points, 1e3 * r.grid_build_s / r.frames_processed,
                 1e3 * r.removal_s / r.frames_processed, 1e3 * r.restoration_s / r.frames_processed,
                 1e3 * r.mask_apply_s / r.frames_processed)};
}

Outcome bd_correctness() {
  std::mt19937_64 rng(99);
  const std::vector<double> rates{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  double worst_identity = 0.0;
  double worst_offset = 0.0;
  double worst_antisym = 0.0;
  double worst_quad = 0.0;
  std::uniform_real_distribution<double> shift(-0.25, 0.25);
  std::uniform_real_distribution<double> off(-5.0, 5.0);
  for (int t = 0; t < 100; ++t) {
    const testkit::Cubic fa = testkit::random_cubic(rng);
    const testkit::Cubic fb = testkit::random_cubic(rng);
    const double s = std::pow(10.0, shift(rng));
    std::vector<double> rb;
    for (double r : rates) rb.push_back(r * s);
    const RateCurve a = testkit::sample_curve(fa, rates);
    const RateCurve b = testkit::sample_curve(fb, rb);

    worst_identity = std::max(worst_identity, std::abs(bd_metric(a, a)));
    const double delta = off(rng);
    std::vector<RatePoint> moved = a.points();
    for (auto& p : moved) p.metric += delta;
    worst_offset = std::max(worst_offset, std::abs(bd_metric(a, RateCurve(moved)) - delta));
    worst_antisym = std::max(worst_antisym, std::abs(bd_metric(a, b) + bd_metric(b, a)));

    const double lo = std::max(std::log10(rates.front()), std::log10(rb.front()));
    const double hi = std::min(std::log10(rates.back()), std::log10(rb.back()));
    const double quad = testkit::simpson([&](double L) { return fb(L) - fa(L); }, lo, hi, 4000) / (hi - lo);
    worst_quad = std::max(worst_quad, std::abs(bd_metric(a, b) - quad));
  }
  const bool pass = worst_identity <= 1e-9 && worst_offset <= 1e-9 && worst_antisym <= 1e-9 && worst_quad <= 1e-6;
  return {pass, format("100 cubic pairs: |identity| %.2g, |offset err| %.2g, |antisymmetry| %.2g (<= 1e-9), "
                       "|quadrature err| %.2g (<= 1e-6)",
                       worst_identity, worst_offset, worst_antisym, worst_quad)};
}

Outcome robustness() {
  const char* configs[] = {"pgr-c0-kitti", "pgr-c1", "pgr-c2", "pgr-c3", "pgr-c4"};
  std::vector<double> overall;
  double worst_class = 1.0;
  std::string detail;
  for (const char* name : configs) {
    const RemovalConfig cfg = named_config(name);
    PreservationReport total;
    for (const auto& s : open_suite()) total += preservation_report(s.cloud, apply_pgr(s.cloud, cfg).keep, s.boxes);
    double cls = 1.0;
    for (ObjectClass c : kRoadUsers) {
      if (const auto f = total.class_fraction(c)) cls = std::min(cls, *f);
    }
    worst_class = std::min(worst_class, cls);
    overall.push_back(*total.overall_fraction());
    detail += format(" %s keep %.2f%% worst-class %.3f%%;", name, 100.0 * overall.back(), 100.0 * cls);
  }
  const auto [mn, mx] = std::minmax_element(overall.begin(), overall.end());
  const double spread = *mx - *mn;
  return {worst_class >= 0.995 && spread <= 0.15,
          format("%s max pairwise keep difference %.2f pp (<= 15)", detail.c_str(), 100.0 * spread)};
}

Outcome ablation() {
  const RemovalConfig cfg = named_config("pgr-c0-kitti");
  PgrOptions off;
  off.restoration = false;
  std::size_t scenes = 0;
  std::size_t not_fewer = 0;
  KeptCount car_full;
  KeptCount car_ablated;
  for (const auto& s : open_suite()) {
    if (s.boxes.empty()) continue;
    ++scenes;
    const PgrResult full = apply_pgr(s.cloud, cfg);
    const PgrResult bare = apply_pgr(s.cloud, cfg, off);
    if (!(bare.kept_points < full.kept_points)) ++not_fewer;
    const auto rf = preservation_report(s.cloud, full.keep, s.boxes);
    const auto rb = preservation_report(s.cloud, bare.keep, s.boxes);
    if (rf.per_class.count(ObjectClass::Car)) {
      car_full += rf.per_class.at(ObjectClass::Car);
      car_ablated += rb.per_class.at(ObjectClass::Car);
    }
  }
  const double f = *car_full.fraction();
  const double b = *car_ablated.fraction();
  return {not_fewer == 0 && b < f,
          format("%zu object scenes, %zu without strictly fewer kept points; car keep %.3f%% -> %.3f%% "
                 "without restoration",
                 scenes, not_fewer, 100.0 * f, 100.0 * b)};
}

Outcome ef_monotonicity() {
  const double efs[] = {0.0, 0.3, 1.0, 3.6};
  std::size_t scenes = 0;
  std::size_t nesting = 0;
  std::size_t brute = 0;
  std::vector<const SyntheticScene*> all;
  for (const auto& s : open_suite()) all.push_back(&s);
  for (const auto& s : urban_suite()) all.push_back(&s);
  std::array<std::size_t, 4> kept_ground{};
  for (const SyntheticScene* s : all) {
    ++scenes;
    KeepMask prev;
    for (std::size_t e = 0; e < 4; ++e) {
      const KeepMask keep = apply_oracle(s->cloud, s->ground, s->boxes, {efs[e]});
      for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] && s->ground[i]) ++kept_ground[e];
        if (!prev.empty() && prev[i] && !keep[i]) ++nesting;
      }
      if (e == 0) {
        for (std::size_t i = 0; i < keep.size(); ++i) {
          bool expected = !s->ground[i];
          if (!expected) {
            const Vec3 p = s->cloud.position(i);
            for (const Box3D& b : s->boxes) {
              // Rotate into the box frame by hand.
              const double c = std::cos(b.yaw);
              const double sn = std::sin(b.yaw);
              const double dx = p.x - b.center_x;
              const double dy = p.y - b.center_y;
              const double lx = c * dx + sn * dy;
              const double ly = -sn * dx + c * dy;
              const double lz = p.z - b.center_z;
              if (std::abs(lx) <= b.length / 2 && std::abs(ly) <= b.width / 2 && std::abs(lz) <= b.height / 2) {
                expected = true;
                break;
              }
            }
          }
          if (keep[i] != expected) ++brute;
        }
      }
      prev = keep;
    }
  }
  return {nesting == 0 && brute == 0,
          format("%zu scenes; %zu nesting violations, %zu EF=0 per-point mismatches; kept ground points at "
                 "EF 0/0.3/1/3.6: %zu/%zu/%zu/%zu",
                 scenes, nesting, brute, kept_ground[0], kept_ground[1], kept_ground[2], kept_ground[3])};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "oracle equivalence", oracle_equivalence},
      {2, "object preservation", object_preservation},
      {3, "rate monotonicity and savings", rate_savings},
      {4, "codec round trip", codec_round_trip},
      {5, "throughput", throughput},
      {6, "bd metric correctness", bd_correctness},
      {7, "robustness sweep", robustness},
      {8, "restoration ablation", ablation},
      {9, "extension factor monotonicity", ef_monotonicity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
