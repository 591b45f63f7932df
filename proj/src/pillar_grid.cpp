#include "pgr/pillar_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pgr/errors.hpp"

namespace pgr {

namespace {

// Above this many cells in the bounding rectangle the grid falls back to a
// hash map instead of a dense lookup table.
constexpr std::int64_t kDenseCellLimit = std::int64_t{1} << 22;
constexpr double kMaxCellMagnitude = 4.0e15;

}  // namespace

void GridSpec::validate() const {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw ValidationError("grid resolution must be a finite value > 0");
  }
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
    throw ValidationError("grid origin must be finite");
  }
}

GridSpec GridSpec::anchored(const PointCloud& cloud, double resolution) {
  GridSpec spec;
  spec.resolution = resolution;
  spec.validate();
  if (cloud.empty()) return spec;
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  for (const Vec3& p : cloud.positions()) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
  }
  spec.origin_x = std::floor(min_x / resolution) * resolution;
  spec.origin_y = std::floor(min_y / resolution) * resolution;
  // floor(a/r)*r can round above a; step back one cell so every point sits
  // at a non-negative cell.
  if (spec.origin_x > min_x) spec.origin_x -= resolution;
  if (spec.origin_y > min_y) spec.origin_y -= resolution;
  return spec;
}

std::int64_t cells_within(double distance, double resolution) {
  if (!(distance >= 0.0)) return -1;
  const double ratio = distance / resolution;
  return static_cast<std::int64_t>(std::floor(ratio * (1.0 + 1e-9) + 1e-12));
}

std::optional<std::size_t> PillarGrid::find(CellIndex cell) const {
  const std::int64_t idx = index_at(cell.ix, cell.iy);
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

const Pillar& PillarGrid::at(CellIndex cell) const {
  const auto idx = find(cell);
  if (!idx) {
    throw QueryError("no pillar at cell (" + std::to_string(cell.ix) + ", " +
                     std::to_string(cell.iy) + ")");
  }
  return pillars_[*idx];
}

std::int64_t PillarGrid::index_at(std::int64_t ix, std::int64_t iy) const {
  if (pillars_.empty()) return -1;
  if (ix < min_cell_.ix || ix > max_cell_.ix || iy < min_cell_.iy || iy > max_cell_.iy) return -1;
  if (!dense_.empty()) {
    return dense_[static_cast<std::size_t>((iy - min_cell_.iy) * width_ + (ix - min_cell_.ix))];
  }
  const auto it = sparse_.find(CellIndex{ix, iy});
  return it == sparse_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

PillarGrid build_grid(const PointCloud& cloud, const GridSpec& spec) {
  spec.validate();
  const std::size_t n = cloud.size();
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw DataError("frame too large for a pillar grid");
  }

  PillarGrid grid;
  grid.spec_ = spec;
  grid.point_count_ = n;
  if (n == 0) return grid;

  std::vector<CellIndex> cells(n);
  CellIndex lo{std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::max()};
  CellIndex hi{std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::min()};
  const auto positions = cloud.positions();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = positions[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw DataError("non-finite coordinate", i);
    }
    // Division (not multiplication by the reciprocal) so cell boundaries are
    // exact for coordinates that are multiples of the resolution.
    const double fx = std::floor((p.x - spec.origin_x) / spec.resolution);
    const double fy = std::floor((p.y - spec.origin_y) / spec.resolution);
    if (std::abs(fx) > kMaxCellMagnitude || std::abs(fy) > kMaxCellMagnitude) {
      throw DataError("point too far from the grid origin", i);
    }
    const CellIndex c{static_cast<std::int64_t>(fx), static_cast<std::int64_t>(fy)};
    cells[i] = c;
    lo.ix = std::min(lo.ix, c.ix);
    lo.iy = std::min(lo.iy, c.iy);
    hi.ix = std::max(hi.ix, c.ix);
    hi.iy = std::max(hi.iy, c.iy);
  }
  grid.min_cell_ = lo;
  grid.max_cell_ = hi;

  const double width = static_cast<double>(hi.ix) - static_cast<double>(lo.ix) + 1.0;
  const double height = static_cast<double>(hi.iy) - static_cast<double>(lo.iy) + 1.0;
  const bool dense = width * height <= static_cast<double>(kDenseCellLimit);

  grid.order_.resize(n);
  grid.pillar_of_point_.resize(n);

  if (dense) {
    grid.width_ = hi.ix - lo.ix + 1;
    grid.height_ = hi.iy - lo.iy + 1;
    const auto cell_count = static_cast<std::size_t>(grid.width_ * grid.height_);
    // Counting sort by linear cell id keeps points of a pillar in input order.
    std::vector<std::uint32_t> offsets(cell_count + 1, 0);
    std::vector<std::uint32_t> linear(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = static_cast<std::uint32_t>((cells[i].iy - lo.iy) * grid.width_ +
                                                 (cells[i].ix - lo.ix));
      linear[i] = id;
      ++offsets[id + 1];
    }
    grid.dense_.assign(cell_count, -1);
    std::size_t pillar_count = 0;
    for (std::size_t id = 0; id < cell_count; ++id) {
      if (offsets[id + 1] != 0) grid.dense_[id] = static_cast<std::int32_t>(pillar_count++);
      offsets[id + 1] += offsets[id];
    }
    grid.pillars_.resize(pillar_count);
    for (std::size_t id = 0; id < cell_count; ++id) {
      const std::int32_t pi = grid.dense_[id];
      if (pi < 0) continue;
      Pillar& p = grid.pillars_[static_cast<std::size_t>(pi)];
      p.cell = {lo.ix + static_cast<std::int64_t>(id) % grid.width_,
                lo.iy + static_cast<std::int64_t>(id) / grid.width_};
      p.first = offsets[id];
      p.count = offsets[id + 1] - offsets[id];
    }
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      grid.order_[cursor[linear[i]]++] = static_cast<std::uint32_t>(i);
      grid.pillar_of_point_[i] = static_cast<std::uint32_t>(grid.dense_[linear[i]]);
    }
  } else {
    std::iota(grid.order_.begin(), grid.order_.end(), 0u);
    std::stable_sort(grid.order_.begin(), grid.order_.end(), [&](std::uint32_t a, std::uint32_t b) {
      const CellIndex& ca = cells[a];
      const CellIndex& cb = cells[b];
      return ca.iy != cb.iy ? ca.iy < cb.iy : ca.ix < cb.ix;
    });
    for (std::size_t k = 0; k < n; ++k) {
      const CellIndex& c = cells[grid.order_[k]];
      if (grid.pillars_.empty() || grid.pillars_.back().cell != c) {
        Pillar p;
        p.cell = c;
        p.first = static_cast<std::uint32_t>(k);
        grid.pillars_.push_back(p);
        grid.sparse_.emplace(c, static_cast<std::uint32_t>(grid.pillars_.size() - 1));
      }
      ++grid.pillars_.back().count;
      grid.pillar_of_point_[grid.order_[k]] = static_cast<std::uint32_t>(grid.pillars_.size() - 1);
    }
  }

  for (Pillar& p : grid.pillars_) {
    double z_min = std::numeric_limits<double>::infinity();
    double z_max = -std::numeric_limits<double>::infinity();
    for (std::uint32_t k = p.first; k < p.first + p.count; ++k) {
      const double z = positions[grid.order_[k]].z;
      z_min = std::min(z_min, z);
      z_max = std::max(z_max, z);
    }
    p.z_min = z_min;
    p.z_max = z_max;
    p.center_x = spec.origin_x + (static_cast<double>(p.cell.ix) + 0.5) * spec.resolution;
    p.center_y = spec.origin_y + (static_cast<double>(p.cell.iy) + 0.5) * spec.resolution;
    p.range_2d = std::hypot(p.center_x, p.center_y);
  }
  return grid;
}

double neighborhood_min_z(const PillarGrid& grid, CellIndex cell, double radius) {
  if (!(radius > 0.0)) throw QueryError("neighborhood radius must be > 0");
  const Pillar& self = grid.at(cell);
  const std::int64_t k = cells_within(radius, grid.spec().resolution);
  double b = self.z_min;
  const CellIndex lo = grid.min_cell();
  const CellIndex hi = grid.max_cell();
  const std::int64_t x0 = std::max(cell.ix - k, lo.ix);
  const std::int64_t x1 = std::min(cell.ix + k, hi.ix);
  const std::int64_t y0 = std::max(cell.iy - k, lo.iy);
  const std::int64_t y1 = std::min(cell.iy + k, hi.iy);
  const auto pillars = grid.pillars();
  if ((x1 - x0 + 1) * (y1 - y0 + 1) > static_cast<std::int64_t>(pillars.size())) {
    for (const Pillar& p : pillars) {
      if (p.cell.ix >= x0 && p.cell.ix <= x1 && p.cell.iy >= y0 && p.cell.iy <= y1) {
        b = std::min(b, p.z_min);
      }
    }
    return b;
  }
  for (std::int64_t iy = y0; iy <= y1; ++iy) {
    for (std::int64_t ix = x0; ix <= x1; ++ix) {
      const std::int64_t idx = grid.index_at(ix, iy);
      if (idx >= 0) b = std::min(b, pillars[static_cast<std::size_t>(idx)].z_min);
    }
  }
  return b;
}

double pillar_chessboard_distance(const Pillar& a, const Pillar& b) {
  return std::max(std::abs(a.center_x - b.center_x), std::abs(a.center_y - b.center_y));
}

}  // namespace pgr
