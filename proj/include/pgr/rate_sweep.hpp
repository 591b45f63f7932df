#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pgr/bjontegaard.hpp"
#include "pgr/box3d.hpp"
#include "pgr/ground_removal.hpp"
#include "pgr/oracle.hpp"
#include "pgr/point_cloud.hpp"

namespace pgr {

// A frame plus whatever annotations travel with it. The oracle preprocessor
// needs `ground`; PGR needs neither.
struct AnnotatedFrame {
  PointCloud cloud;
  std::optional<GroundMask> ground;
  std::vector<Box3D> boxes;
};

/// Preprocessing stage selected by name:
///   none            keep every point
///   pgr:<config>    preset name, short alias (c0..c4) or JSON config path
///   oracle:<EF>     omniscient removal with extension factor EF
class Preprocessor {
 public:
  enum class Kind { None, Pgr, Oracle };

  static Preprocessor parse(std::string_view spec);  // LookupError on unknown names
  static Preprocessor none() { return {}; }
  static Preprocessor pgr(RemovalConfig cfg, std::string label);
  static Preprocessor oracle(OracleConfig cfg);

  Kind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }
  const RemovalConfig& removal_config() const noexcept { return removal_; }
  const OracleConfig& oracle_config() const noexcept { return oracle_; }

  KeepMask apply(const AnnotatedFrame& frame) const;

 private:
  Kind kind_ = Kind::None;
  std::string label_ = "none";
  RemovalConfig removal_;
  OracleConfig oracle_;
};

struct RateRow {
  double scale = 0.0;
  double bpp = 0.0;
  std::string preprocessor;
  std::size_t frames = 0;
  std::optional<double> metric;
};

// One row per scale: mean bpp over frames after preprocessing and encoding.
// bpp is measured against each frame's original point count.
std::vector<RateRow> rate_sweep(std::span<const AnnotatedFrame> frames,
                                const Preprocessor& preprocessor, std::span<const double> scales,
                                double units_per_meter = 1000.0);

// The six geometry scales of the standard rate sweep.
inline constexpr double kStandardScales[] = {0.01, 0.012, 0.015, 0.022, 0.035, 0.063};

// CSV with header "scale,bpp,preprocessor,frames", plus ",metric" when any
// row carries one.
std::string format_rate_table(std::span<const RateRow> rows);
std::vector<RateRow> parse_rate_table(const std::string& text);

// CSV "scale,metric" (header optional).
std::vector<std::pair<double, double>> parse_metric_table(const std::string& text);

// Attaches metrics by scale (relative match 1e-9); rows without a match keep
// their previous metric.
void join_metrics(std::vector<RateRow>& rows, std::span<const std::pair<double, double>> metrics);

// Curve from rows of one preprocessor (all rows when `preprocessor` is empty).
// Every selected row must carry a metric.
RateCurve rate_curve(std::span<const RateRow> rows, std::string_view preprocessor = {});

}  // namespace pgr
