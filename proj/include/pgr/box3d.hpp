#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pgr/point_cloud.hpp"

namespace pgr {

enum class ObjectClass : std::uint8_t { Car, Pedestrian, Cyclist, Other };

inline constexpr ObjectClass kAllClasses[] = {ObjectClass::Car, ObjectClass::Pedestrian,
                                              ObjectClass::Cyclist, ObjectClass::Other};

std::string_view to_string(ObjectClass c);
// Accepts "Car", "Vehicle" (alias of Car), "Pedestrian", "Cyclist", "Other".
ObjectClass parse_object_class(std::string_view name);

/// Oriented box in the sensor frame. Yaw rotates about +z; length runs along
/// the box's local x axis, width along local y.
struct Box3D {
  double center_x = 0.0;
  double center_y = 0.0;
  double center_z = 0.0;
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
  double yaw = 0.0;
  ObjectClass label = ObjectClass::Other;

  // Throws ValidationError for non-positive dimensions or yaw outside [-pi, pi].
  void validate() const;

  // Point expressed in the box's yaw-aligned frame, relative to its center.
  Vec3 to_local(const Vec3& p) const;
  Vec3 to_world(const Vec3& local) const;

  // Boundary-inclusive containment with every dimension multiplied by scale.
  bool contains(const Vec3& p, double scale = 1.0) const;

  friend bool operator==(const Box3D&, const Box3D&) = default;
};

// Indices of points inside box scaled by `scale` about its center (boundary
// inclusive), in increasing order. scale must be >= 0.
std::vector<std::uint32_t> points_in_box(const PointCloud& cloud, const Box3D& box,
                                         double scale = 1.0);

}  // namespace pgr
