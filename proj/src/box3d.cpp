#include "pgr/box3d.hpp"

#include <cmath>
#include <numbers>

#include "pgr/errors.hpp"

namespace pgr {

std::string_view to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::Car: return "Car";
    case ObjectClass::Pedestrian: return "Pedestrian";
    case ObjectClass::Cyclist: return "Cyclist";
    case ObjectClass::Other: return "Other";
  }
  return "Other";
}

ObjectClass parse_object_class(std::string_view name) {
  if (name == "Car" || name == "Vehicle") return ObjectClass::Car;
  if (name == "Pedestrian") return ObjectClass::Pedestrian;
  if (name == "Cyclist") return ObjectClass::Cyclist;
  if (name == "Other") return ObjectClass::Other;
  throw ParseError("unknown object class '" + std::string(name) + "'");
}

void Box3D::validate() const {
  if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0)) {
    throw ValidationError("box dimensions must be strictly positive");
  }
  if (!std::isfinite(center_x) || !std::isfinite(center_y) || !std::isfinite(center_z) ||
      !std::isfinite(length) || !std::isfinite(width) || !std::isfinite(height)) {
    throw ValidationError("box fields must be finite");
  }
  if (!(yaw >= -std::numbers::pi && yaw <= std::numbers::pi)) {
    throw ValidationError("box yaw must lie in [-pi, pi]");
  }
}

Vec3 Box3D::to_local(const Vec3& p) const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double dx = p.x - center_x;
  const double dy = p.y - center_y;
  return {c * dx + s * dy, -s * dx + c * dy, p.z - center_z};
}

Vec3 Box3D::to_world(const Vec3& local) const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {center_x + c * local.x - s * local.y, center_y + s * local.x + c * local.y,
          center_z + local.z};
}

bool Box3D::contains(const Vec3& p, double scale) const {
  const Vec3 l = to_local(p);
  return std::abs(l.x) <= 0.5 * length * scale && std::abs(l.y) <= 0.5 * width * scale &&
         std::abs(l.z) <= 0.5 * height * scale;
}

std::vector<std::uint32_t> points_in_box(const PointCloud& cloud, const Box3D& box,
                                         double scale) {
  if (!(scale >= 0.0)) throw ContractError("points_in_box: scale must be >= 0");
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.length * scale;
  const double hw = 0.5 * box.width * scale;
  const double hh = 0.5 * box.height * scale;
  // Bounding radius in the xy plane allows a cheap reject before rotating.
  const double reach = std::hypot(hl, hw) * (1.0 + 1e-12) + 1e-12;

  std::vector<std::uint32_t> out;
  const auto positions = cloud.positions();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Vec3& p = positions[i];
    const double dx = p.x - box.center_x;
    const double dy = p.y - box.center_y;
    if (std::abs(dx) > reach || std::abs(dy) > reach) continue;
    if (std::abs(p.z - box.center_z) > hh) continue;
    const double lx = c * dx + s * dy;
    const double ly = -s * dx + c * dy;
    if (std::abs(lx) <= hl && std::abs(ly) <= hw) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

}  // namespace pgr
