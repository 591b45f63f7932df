#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgr/pillar_grid.hpp"
#include "pgr/point_cloud.hpp"

namespace pgr {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// Removed pillars closer than max_range (horizontal, meters) are restored
// within delta_res of a retained pillar.
struct RestoreRule {
  double max_range = kUnbounded;
  double delta_res = 1.8;

  friend bool operator==(const RestoreRule&, const RestoreRule&) = default;
};

/// Pillar-based ground removal parameters, all in meters.
struct RemovalConfig {
  double resolution = 0.4;    // pillar side length
  double delta_minmax = 0.4;  // max height spread of a ground pillar
  double er = 1.8;            // half side of the baseline neighborhood
  double delta_env = 0.4;     // max rise of a ground pillar above the baseline
  std::vector<RestoreRule> restore_rules{{30.0, 1.8}, {kUnbounded, 5.4}};

  // All lengths > 0; rules strictly increasing in max_range, last unbounded.
  void validate() const;

  // delta_res of the first rule whose max_range exceeds `range`.
  double delta_res_for(double range) const;

  friend bool operator==(const RemovalConfig&, const RemovalConfig&) = default;
};

/// Per-pillar outcome, indexed like PillarGrid::pillars().
/// phi = 1: retained by the removal phase. restored = 1 only when phi = 0.
struct PillarDecision {
  std::vector<std::uint8_t> phi;
  std::vector<std::uint8_t> restored;

  bool kept(std::size_t pillar) const { return phi[pillar] != 0 || restored[pillar] != 0; }
};

// phi_i = 0 iff z_max - z_min <= delta_minmax AND z_min - b < delta_env,
// with b the neighborhood minimum over the er window.
std::vector<std::uint8_t> removal_phase(const PillarGrid& grid, const RemovalConfig& cfg);

// For phi_i = 0: restored_i = 1 iff some pillar with phi_j = 1 lies within
// chessboard distance delta_res(range_2d of i). One pass; restored pillars do
// not seed further restoration.
std::vector<std::uint8_t> restoration_phase(const PillarGrid& grid,
                                            std::span<const std::uint8_t> phi,
                                            const RemovalConfig& cfg);

struct StageCounters {
  int grid_builds = 0;
  int removal_passes = 0;
  int restoration_passes = 0;
};

struct StageTimes {
  double grid_build_s = 0.0;
  double removal_s = 0.0;
  double restoration_s = 0.0;
};

struct PgrOptions {
  bool restoration = true;  // false reproduces the removal-only ablation
};

struct PgrResult {
  KeepMask keep;
  PillarDecision decision;
  std::size_t pillar_count = 0;
  std::size_t retained_pillars = 0;
  std::size_t restored_pillars = 0;
  std::size_t kept_points = 0;
  StageCounters counters;
  StageTimes times;
};

PgrResult apply_pgr(const PointCloud& cloud, const RemovalConfig& cfg,
                    const PgrOptions& options = {});

// Points whose flag is set, in original order. Throws ContractError when the
// mask length differs from the cloud size.
PointCloud filter_cloud(const PointCloud& cloud, const KeepMask& mask);

// Presets: pgr-c0-kitti, pgr-c0-waymo, pgr-c1 ... pgr-c4.
RemovalConfig named_config(std::string_view name);
std::vector<std::string> preset_names();

// JSON config files mirroring RemovalConfig; an unbounded rule writes
// "max_range": null.
RemovalConfig parse_removal_config(const std::string& text);
std::string serialize_removal_config(const RemovalConfig& cfg);
RemovalConfig load_removal_config(const std::filesystem::path& path);

// A preset name, a short alias ("c0" -> pgr-c0-kitti, "c3" -> pgr-c3), or a
// path to a JSON config file.
RemovalConfig resolve_removal_config(std::string_view name_or_path);

}  // namespace pgr
