#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "pgr/point_cloud.hpp"

namespace pgr {

struct CellIndex {
  std::int64_t ix = 0;
  std::int64_t iy = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct CellIndexHash {
  std::size_t operator()(const CellIndex& c) const noexcept {
    const auto a = static_cast<std::uint64_t>(c.ix) * 0x9E3779B97F4A7C15ULL;
    const auto b = static_cast<std::uint64_t>(c.iy) + 0x632BE59BD9B4E019ULL;
    return static_cast<std::size_t>(a ^ (b + (a << 6) + (a >> 2)));
  }
};

struct GridSpec {
  double resolution = 0.4;  // pillar side length, meters
  double origin_x = 0.0;
  double origin_y = 0.0;

  void validate() const;

  // Origin at the frame's minimum x/y rounded down to a multiple of resolution.
  static GridSpec anchored(const PointCloud& cloud, double resolution);
};

struct Pillar {
  CellIndex cell;
  std::uint32_t first = 0;  // offset into PillarGrid::member_storage()
  std::uint32_t count = 0;
  double z_min = 0.0;
  double z_max = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;
  double range_2d = 0.0;  // horizontal distance of the center from the sensor
};

// Number of whole cells that fit in `distance`. Distances given in decimal
// meters (1.2 m on a 0.4 m grid) land exactly on cell multiples, so a small
// relative slack absorbs binary representation error.
std::int64_t cells_within(double distance, double resolution);

/// Partition of a frame into square pillars. Only non-empty cells exist;
/// pillars are ordered by (iy, ix). Immutable after build.
class PillarGrid {
 public:
  const GridSpec& spec() const noexcept { return spec_; }
  std::size_t point_count() const noexcept { return point_count_; }
  std::size_t size() const noexcept { return pillars_.size(); }
  std::span<const Pillar> pillars() const noexcept { return pillars_; }
  const Pillar& pillar(std::size_t i) const { return pillars_[i]; }

  std::span<const std::uint32_t> members(const Pillar& p) const {
    return {order_.data() + p.first, p.count};
  }

  // Index of the pillar at `cell`, if the cell is occupied.
  std::optional<std::size_t> find(CellIndex cell) const;
  // Like find, throws QueryError for an empty cell.
  const Pillar& at(CellIndex cell) const;

  // Pillar index per point (partition lookup).
  std::span<const std::uint32_t> pillar_of_point() const noexcept { return pillar_of_point_; }

  // Bounding rectangle of occupied cells, inclusive. Meaningless when empty.
  CellIndex min_cell() const noexcept { return min_cell_; }
  CellIndex max_cell() const noexcept { return max_cell_; }

  // -1 for empty or out-of-range cells. O(1) when the grid is dense.
  std::int64_t index_at(std::int64_t ix, std::int64_t iy) const;
  bool is_dense() const noexcept { return !dense_.empty() || pillars_.empty(); }

  friend PillarGrid build_grid(const PointCloud& cloud, const GridSpec& spec);

 private:
  GridSpec spec_;
  std::size_t point_count_ = 0;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> pillar_of_point_;
  std::vector<Pillar> pillars_;
  CellIndex min_cell_;
  CellIndex max_cell_;
  std::int64_t width_ = 0;
  std::int64_t height_ = 0;
  std::vector<std::int32_t> dense_;
  std::unordered_map<CellIndex, std::uint32_t, CellIndexHash> sparse_;
};

PillarGrid build_grid(const PointCloud& cloud, const GridSpec& spec);

// Minimum z_min over the square window of +-cells_within(radius) cells around
// `cell`, the pillar itself included. Throws QueryError when `cell` is empty
// or radius <= 0.
double neighborhood_min_z(const PillarGrid& grid, CellIndex cell, double radius);

// L-infinity distance between pillar centers.
double pillar_chessboard_distance(const Pillar& a, const Pillar& b);

}  // namespace pgr
