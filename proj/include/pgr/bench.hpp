#pragma once

#include <span>
#include <vector>

#include "pgr/ground_removal.hpp"
#include "pgr/point_cloud.hpp"

namespace pgr {

struct BenchReport {
  std::size_t frames_processed = 0;
  double wall_s = 0.0;
  double fps = 0.0;
  // Per-stage totals across all processed frames.
  double grid_build_s = 0.0;
  double removal_s = 0.0;
  double restoration_s = 0.0;
  double mask_apply_s = 0.0;
  std::size_t points_in = 0;
  std::size_t points_out = 0;
  std::vector<std::size_t> kept_per_frame;  // first repetition only
};

// Runs removal + restoration + mask application over every frame, one frame
// at a time, `repetitions` times. Frames must already be in memory.
BenchReport bench_pipeline(std::span<const PointCloud> frames, const RemovalConfig& cfg,
                           int repetitions);

}  // namespace pgr
