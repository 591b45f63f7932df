#include "pgr/rate_sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "pgr/codec.hpp"
#include "pgr/errors.hpp"

namespace pgr {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ParseError("invalid number '" + std::string(s) + "' in " + what);
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool same_scale(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

Preprocessor Preprocessor::pgr(RemovalConfig cfg, std::string label) {
  cfg.validate();
  Preprocessor p;
  p.kind_ = Kind::Pgr;
  p.removal_ = std::move(cfg);
  p.label_ = std::move(label);
  return p;
}

Preprocessor Preprocessor::oracle(OracleConfig cfg) {
  if (!(cfg.extension_factor >= 0.0)) throw ValidationError("extension factor must be >= 0");
  Preprocessor p;
  p.kind_ = Kind::Oracle;
  p.oracle_ = cfg;
  p.label_ = "oracle:" + format_double(cfg.extension_factor);
  return p;
}

Preprocessor Preprocessor::parse(std::string_view spec) {
  if (spec == "none") return none();
  if (spec.rfind("pgr:", 0) == 0) {
    const std::string_view name = spec.substr(4);
    return pgr(resolve_removal_config(name), std::string(spec));
  }
  if (spec.rfind("oracle:", 0) == 0) {
    const std::string_view ef = spec.substr(7);
    OracleConfig cfg;
    try {
      cfg.extension_factor = parse_double(ef, "oracle extension factor");
    } catch (const ParseError&) {
      throw LookupError("invalid oracle preprocessor '" + std::string(spec) + "'");
    }
    Preprocessor p = oracle(cfg);
    p.label_ = std::string(spec);
    return p;
  }
  throw LookupError("unknown preprocessor '" + std::string(spec) +
                    "'; expected none, pgr:<config> or oracle:<EF>");
}

KeepMask Preprocessor::apply(const AnnotatedFrame& frame) const {
  switch (kind_) {
    case Kind::None: return KeepMask(frame.cloud.size(), true);
    case Kind::Pgr: return apply_pgr(frame.cloud, removal_).keep;
    case Kind::Oracle:
      if (!frame.ground) throw ContractError("oracle preprocessing needs a ground mask");
      return apply_oracle(frame.cloud, *frame.ground, frame.boxes, oracle_);
  }
  return KeepMask(frame.cloud.size(), true);
}

std::vector<RateRow> rate_sweep(std::span<const AnnotatedFrame> frames,
                                const Preprocessor& preprocessor, std::span<const double> scales,
                                double units_per_meter) {
  for (std::size_t i = 0; i < scales.size(); ++i) {
    CodecConfig{scales[i], units_per_meter}.validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (scales[i] == scales[j]) throw ValidationError("rate sweep scales must be distinct");
    }
  }
  std::vector<RateRow> rows;
  if (frames.empty()) return rows;

  std::vector<PointCloud> processed;
  processed.reserve(frames.size());
  for (const AnnotatedFrame& f : frames) processed.push_back(filter_cloud(f.cloud, preprocessor.apply(f)));

  for (double scale : scales) {
    const CodecConfig cfg{scale, units_per_meter};
    double sum = 0.0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      sum += measure_bpp(encode_frame(processed[i], cfg, frames[i].cloud.size()));
    }
    rows.push_back({scale, sum / static_cast<double>(frames.size()), preprocessor.label(),
                    frames.size(), std::nullopt});
  }
  return rows;
}

std::string format_rate_table(std::span<const RateRow> rows) {
  const bool with_metric =
      std::any_of(rows.begin(), rows.end(), [](const RateRow& r) { return r.metric.has_value(); });
  std::string out = with_metric ? "scale,bpp,preprocessor,frames,metric\n" : "scale,bpp,preprocessor,frames\n";
  for (const RateRow& r : rows) {
    out += format_double(r.scale) + "," + format_double(r.bpp) + "," + r.preprocessor + "," +
           std::to_string(r.frames);
    if (with_metric) out += "," + (r.metric ? format_double(*r.metric) : std::string());
    out += "\n";
  }
  return out;
}

std::vector<RateRow> parse_rate_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("rate table is empty");
  const auto header = split_csv(line);
  const bool with_metric = header.size() == 5 && header[4] == "metric";
  if (header.size() < 4 || header[0] != "scale" || header[1] != "bpp" ||
      header[2] != "preprocessor" || header[3] != "frames" || (header.size() == 5 && !with_metric) ||
      header.size() > 5) {
    throw ParseError("rate table header must be scale,bpp,preprocessor,frames[,metric]");
  }
  std::vector<RateRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) {
      throw ParseError("rate table line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    const std::string where = "rate table line " + std::to_string(line_no);
    RateRow r;
    r.scale = parse_double(f[0], where);
    r.bpp = parse_double(f[1], where);
    r.preprocessor = f[2];
    r.frames = static_cast<std::size_t>(parse_double(f[3], where));
    if (with_metric && !f[4].empty()) r.metric = parse_double(f[4], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::pair<double, double>> parse_metric_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<double, double>> out;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (line_no == 1 && !f.empty() && f[0] == "scale") continue;
    if (f.size() != 2) {
      throw ParseError("metric file line " + std::to_string(line_no) + ": expected scale,metric");
    }
    const std::string where = "metric file line " + std::to_string(line_no);
    out.emplace_back(parse_double(f[0], where), parse_double(f[1], where));
  }
  return out;
}

void join_metrics(std::vector<RateRow>& rows, std::span<const std::pair<double, double>> metrics) {
  for (RateRow& r : rows) {
    for (const auto& [scale, metric] : metrics) {
      if (same_scale(scale, r.scale)) {
        r.metric = metric;
        break;
      }
    }
  }
}

RateCurve rate_curve(std::span<const RateRow> rows, std::string_view preprocessor) {
  std::vector<RatePoint> points;
  for (const RateRow& r : rows) {
    if (!preprocessor.empty() && r.preprocessor != preprocessor) continue;
    if (!r.metric) {
      throw ContractError("rate row at scale " + format_double(r.scale) + " has no metric");
    }
    points.push_back({r.bpp, *r.metric});
  }
  return RateCurve(std::move(points));
}

}  // namespace pgr
