#include "pgr/point_cloud.hpp"

#include <cmath>

#include "pgr/errors.hpp"

namespace pgr {

PointCloud::PointCloud(std::size_t attribute_arity, std::string frame_id)
    : frame_id_(std::move(frame_id)), arity_(attribute_arity) {}

void PointCloud::reserve(std::size_t n) {
  positions_.reserve(n);
  attributes_.reserve(n * arity_);
}

void PointCloud::add_point(const Vec3& position, std::span<const float> attributes) {
  if (attributes.size() != arity_) {
    throw ContractError("point has " + std::to_string(attributes.size()) +
                        " attributes, cloud arity is " + std::to_string(arity_));
  }
  if (!std::isfinite(position.x) || !std::isfinite(position.y) || !std::isfinite(position.z)) {
    throw DataError("non-finite coordinate", positions_.size());
  }
  for (float a : attributes) {
    if (!std::isfinite(a)) throw DataError("non-finite attribute", positions_.size());
  }
  positions_.push_back(position);
  attributes_.insert(attributes_.end(), attributes.begin(), attributes.end());
}

void PointCloud::add_point(const PointRecord& record) {
  add_point(Vec3{record.x, record.y, record.z}, record.attributes);
}

PointRecord PointCloud::record(std::size_t i) const {
  const auto& p = positions_[i];
  auto attrs = attributes(i);
  return PointRecord{p.x, p.y, p.z, {attrs.begin(), attrs.end()}};
}

}  // namespace pgr
