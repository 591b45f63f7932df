#include "pgr/ground_removal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pgr/errors.hpp"

namespace pgr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool dense_window_ok(const PillarGrid& grid) {
  return grid.is_dense() && grid.size() > 0;
}

// Sliding-window minimum along rows then columns of the dense z_min raster.
std::vector<double> window_min_raster(const PillarGrid& grid, std::int64_t k) {
  const CellIndex lo = grid.min_cell();
  const CellIndex hi = grid.max_cell();
  const std::int64_t w = hi.ix - lo.ix + 1;
  const std::int64_t h = hi.iy - lo.iy + 1;
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> raster(static_cast<std::size_t>(w * h), inf);
  for (const Pillar& p : grid.pillars()) {
    raster[static_cast<std::size_t>((p.cell.iy - lo.iy) * w + (p.cell.ix - lo.ix))] = p.z_min;
  }
  const std::int64_t kx = std::min(k, w);
  const std::int64_t ky = std::min(k, h);

  std::vector<double> rows(raster.size(), inf);
  for (std::int64_t y = 0; y < h; ++y) {
    const double* src = raster.data() + y * w;
    double* dst = rows.data() + y * w;
    for (std::int64_t x = 0; x < w; ++x) {
      const std::int64_t a = std::max<std::int64_t>(0, x - kx);
      const std::int64_t b = std::min(w - 1, x + kx);
      double m = inf;
      for (std::int64_t t = a; t <= b; ++t) m = std::min(m, src[t]);
      dst[x] = m;
    }
  }
  std::vector<double> out(raster.size(), inf);
  for (std::int64_t y = 0; y < h; ++y) {
    const std::int64_t a = std::max<std::int64_t>(0, y - ky);
    const std::int64_t b = std::min(h - 1, y + ky);
    double* dst = out.data() + y * w;
    for (std::int64_t t = a; t <= b; ++t) {
      const double* src = rows.data() + t * w;
      for (std::int64_t x = 0; x < w; ++x) dst[x] = std::min(dst[x], src[x]);
    }
  }
  return out;
}

}  // namespace

void RemovalConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(resolution)) throw ValidationError("resolution must be > 0");
  if (!positive(delta_minmax)) throw ValidationError("delta_minmax must be > 0");
  if (!positive(er)) throw ValidationError("er must be > 0");
  if (!positive(delta_env)) throw ValidationError("delta_env must be > 0");
  if (restore_rules.empty()) throw ValidationError("at least one restore rule is required");
  for (std::size_t i = 0; i < restore_rules.size(); ++i) {
    const RestoreRule& r = restore_rules[i];
    if (!positive(r.delta_res)) throw ValidationError("delta_res must be > 0");
    if (!(r.max_range > 0.0)) throw ValidationError("restore rule max_range must be > 0");
    if (i > 0 && !(r.max_range > restore_rules[i - 1].max_range)) {
      throw ValidationError("restore rules must have strictly increasing max_range");
    }
  }
  if (restore_rules.back().max_range != kUnbounded) {
    throw ValidationError("the last restore rule must be unbounded");
  }
}

double RemovalConfig::delta_res_for(double range) const {
  for (const RestoreRule& r : restore_rules) {
    if (r.max_range > range) return r.delta_res;
  }
  return restore_rules.back().delta_res;
}

std::vector<std::uint8_t> removal_phase(const PillarGrid& grid, const RemovalConfig& cfg) {
  cfg.validate();
  if (grid.spec().resolution != cfg.resolution) {
    throw ContractError("grid resolution differs from the removal config");
  }
  const auto pillars = grid.pillars();
  std::vector<std::uint8_t> phi(pillars.size(), 1);
  if (pillars.empty()) return phi;

  const std::int64_t k = cells_within(cfg.er, cfg.resolution);
  const auto is_ground = [&](const Pillar& p, double baseline) {
    const double d_z = p.z_max - p.z_min;
    const double d_env = p.z_min - baseline;
    return d_z <= cfg.delta_minmax && d_env < cfg.delta_env;
  };

  if (dense_window_ok(grid)) {
    const std::vector<double> baseline = window_min_raster(grid, k);
    const CellIndex lo = grid.min_cell();
    const std::int64_t w = grid.max_cell().ix - lo.ix + 1;
    for (std::size_t i = 0; i < pillars.size(); ++i) {
      const Pillar& p = pillars[i];
      const double b = baseline[static_cast<std::size_t>((p.cell.iy - lo.iy) * w + (p.cell.ix - lo.ix))];
      phi[i] = is_ground(p, b) ? 0 : 1;
    }
  } else {
    for (std::size_t i = 0; i < pillars.size(); ++i) {
      const Pillar& p = pillars[i];
      phi[i] = is_ground(p, neighborhood_min_z(grid, p.cell, cfg.er)) ? 0 : 1;
    }
  }
  return phi;
}

std::vector<std::uint8_t> restoration_phase(const PillarGrid& grid,
                                            std::span<const std::uint8_t> phi,
                                            const RemovalConfig& cfg) {
  cfg.validate();
  const auto pillars = grid.pillars();
  if (phi.size() != pillars.size()) {
    throw ContractError("phi length differs from the pillar count");
  }
  std::vector<std::uint8_t> restored(pillars.size(), 0);

  std::vector<std::size_t> retained;
  for (std::size_t i = 0; i < pillars.size(); ++i) {
    if (phi[i] != 0) retained.push_back(i);
  }
  if (retained.empty()) return restored;

  const CellIndex lo = grid.min_cell();
  const CellIndex hi = grid.max_cell();
  const std::int64_t w = hi.ix - lo.ix + 1;
  const std::int64_t h = hi.iy - lo.iy + 1;

  // Summed-area table of retained flags; a chessboard ball is a square window.
  std::vector<std::int32_t> sat;
  if (dense_window_ok(grid)) {
    sat.assign(static_cast<std::size_t>((w + 1) * (h + 1)), 0);
    for (std::size_t i : retained) {
      const Pillar& p = pillars[i];
      sat[static_cast<std::size_t>((p.cell.iy - lo.iy + 1) * (w + 1) + (p.cell.ix - lo.ix + 1))] = 1;
    }
    for (std::int64_t y = 1; y <= h; ++y) {
      for (std::int64_t x = 1; x <= w; ++x) {
        const auto at = [&](std::int64_t yy, std::int64_t xx) -> std::int32_t& {
          return sat[static_cast<std::size_t>(yy * (w + 1) + xx)];
        };
        at(y, x) += at(y - 1, x) + at(y, x - 1) - at(y - 1, x - 1);
      }
    }
  }

  for (std::size_t i = 0; i < pillars.size(); ++i) {
    if (phi[i] != 0) continue;
    const Pillar& p = pillars[i];
    const std::int64_t k = cells_within(cfg.delta_res_for(p.range_2d), cfg.resolution);
    const std::int64_t x0 = std::max(p.cell.ix - k, lo.ix);
    const std::int64_t x1 = std::min(p.cell.ix + k, hi.ix);
    const std::int64_t y0 = std::max(p.cell.iy - k, lo.iy);
    const std::int64_t y1 = std::min(p.cell.iy + k, hi.iy);
    bool found = false;
    if (!sat.empty()) {
      const auto at = [&](std::int64_t yy, std::int64_t xx) {
        return sat[static_cast<std::size_t>(yy * (w + 1) + xx)];
      };
      const std::int64_t ax = x0 - lo.ix, bx = x1 - lo.ix + 1;
      const std::int64_t ay = y0 - lo.iy, by = y1 - lo.iy + 1;
      found = at(by, bx) - at(ay, bx) - at(by, ax) + at(ay, ax) > 0;
    } else {
      for (std::size_t j : retained) {
        const CellIndex& c = pillars[j].cell;
        if (c.ix >= x0 && c.ix <= x1 && c.iy >= y0 && c.iy <= y1) {
          found = true;
          break;
        }
      }
    }
    restored[i] = found ? 1 : 0;
  }
  return restored;
}

PgrResult apply_pgr(const PointCloud& cloud, const RemovalConfig& cfg, const PgrOptions& options) {
  cfg.validate();
  PgrResult result;

  auto t0 = Clock::now();
  const PillarGrid grid = build_grid(cloud, GridSpec::anchored(cloud, cfg.resolution));
  result.times.grid_build_s = seconds_since(t0);
  ++result.counters.grid_builds;

  t0 = Clock::now();
  result.decision.phi = removal_phase(grid, cfg);
  result.times.removal_s = seconds_since(t0);
  ++result.counters.removal_passes;

  t0 = Clock::now();
  if (options.restoration) {
    result.decision.restored = restoration_phase(grid, result.decision.phi, cfg);
    ++result.counters.restoration_passes;
  } else {
    result.decision.restored.assign(grid.size(), 0);
  }
  result.times.restoration_s = seconds_since(t0);

  result.pillar_count = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    result.retained_pillars += result.decision.phi[i];
    result.restored_pillars += result.decision.restored[i];
  }

  result.keep.assign(cloud.size(), false);
  const auto owner = grid.pillar_of_point();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (result.decision.kept(owner[i])) {
      result.keep[i] = true;
      ++result.kept_points;
    }
  }
  return result;
}

PointCloud filter_cloud(const PointCloud& cloud, const KeepMask& mask) {
  if (mask.size() != cloud.size()) {
    throw ContractError("mask length " + std::to_string(mask.size()) + " differs from cloud size " +
                        std::to_string(cloud.size()));
  }
  PointCloud out(cloud.attribute_arity(), cloud.frame_id());
  out.reserve(static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (mask[i]) out.add_point(cloud.position(i), cloud.attributes(i));
  }
  return out;
}

}  // namespace pgr
