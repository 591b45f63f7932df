#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pgr {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

// Value view of one point; PointCloud stores points column-wise.
struct PointRecord {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::vector<float> attributes;

  friend bool operator==(const PointRecord&, const PointRecord&) = default;
};

// Per-point boolean flags. GroundMask: true = labeled ground.
// KeepMask: true = point survives preprocessing.
using GroundMask = std::vector<bool>;
using KeepMask = std::vector<bool>;

/// A LiDAR frame: N points in the sensor frame (origin at the sensor, z up),
/// each carrying the same number of scalar attributes.
///
/// Coordinates are finite by construction; add_point rejects NaN/Inf.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::size_t attribute_arity, std::string frame_id = {});

  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }
  std::size_t attribute_arity() const noexcept { return arity_; }

  const std::string& frame_id() const noexcept { return frame_id_; }
  void set_frame_id(std::string id) { frame_id_ = std::move(id); }

  void reserve(std::size_t n);

  // Throws ContractError on arity mismatch, DataError on non-finite input.
  void add_point(const Vec3& position, std::span<const float> attributes);
  void add_point(const PointRecord& record);

  const Vec3& position(std::size_t i) const { return positions_[i]; }
  std::span<const float> attributes(std::size_t i) const {
    return {attributes_.data() + i * arity_, arity_};
  }
  PointRecord record(std::size_t i) const;

  std::span<const Vec3> positions() const noexcept { return positions_; }
  std::span<const float> attribute_data() const noexcept { return attributes_; }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::string frame_id_;
  std::size_t arity_ = 0;
  std::vector<Vec3> positions_;
  std::vector<float> attributes_;
};

}  // namespace pgr
