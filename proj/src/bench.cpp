#include "pgr/bench.hpp"

#include <chrono>

#include "pgr/errors.hpp"

namespace pgr {

BenchReport bench_pipeline(std::span<const PointCloud> frames, const RemovalConfig& cfg,
                           int repetitions) {
  if (repetitions < 1) throw ValidationError("repetitions must be >= 1");
  cfg.validate();
  using Clock = std::chrono::steady_clock;

  BenchReport report;
  const auto start = Clock::now();
  for (int rep = 0; rep < repetitions; ++rep) {
    for (const PointCloud& frame : frames) {
      const PgrResult result = apply_pgr(frame, cfg);
      const auto t0 = Clock::now();
      const PointCloud kept = filter_cloud(frame, result.keep);
      report.mask_apply_s += std::chrono::duration<double>(Clock::now() - t0).count();

      report.grid_build_s += result.times.grid_build_s;
      report.removal_s += result.times.removal_s;
      report.restoration_s += result.times.restoration_s;
      report.points_in += frame.size();
      report.points_out += kept.size();
      if (rep == 0) report.kept_per_frame.push_back(kept.size());
      ++report.frames_processed;
    }
  }
  report.wall_s = std::chrono::duration<double>(Clock::now() - start).count();
  report.fps = report.wall_s > 0.0 ? static_cast<double>(report.frames_processed) / report.wall_s : 0.0;
  return report;
}

}  // namespace pgr
