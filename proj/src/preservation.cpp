#include "pgr/preservation.hpp"

#include <string>

#include "pgr/errors.hpp"

namespace pgr {

std::optional<double> PreservationReport::class_fraction(ObjectClass c) const {
  const auto it = per_class.find(c);
  if (it == per_class.end()) return std::nullopt;
  return it->second.fraction();
}

PreservationReport& PreservationReport::operator+=(const PreservationReport& o) {
  for (const auto& [cls, count] : o.per_class) per_class[cls] += count;
  in_boxes += o.in_boxes;
  overall += o.overall;
  return *this;
}

PreservationReport preservation_report(const PointCloud& cloud, const KeepMask& mask,
                                       const std::vector<Box3D>& boxes) {
  if (mask.size() != cloud.size()) {
    throw ContractError("mask length " + std::to_string(mask.size()) + " differs from cloud size " +
                        std::to_string(cloud.size()));
  }
  PreservationReport report;
  report.overall.total = cloud.size();
  for (bool k : mask) report.overall.kept += k ? 1 : 0;

  std::vector<bool> any_box(cloud.size(), false);
  for (ObjectClass cls : kAllClasses) {
    bool has_box = false;
    std::vector<bool> member(cloud.size(), false);
    for (const Box3D& box : boxes) {
      if (box.label != cls) continue;
      has_box = true;
      for (std::uint32_t i : points_in_box(cloud, box)) member[i] = true;
    }
    if (!has_box) continue;
    KeptCount& count = report.per_class[cls];
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (!member[i]) continue;
      any_box[i] = true;
      ++count.total;
      if (mask[i]) ++count.kept;
    }
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!any_box[i]) continue;
    ++report.in_boxes.total;
    if (mask[i]) ++report.in_boxes.kept;
  }
  return report;
}

}  // namespace pgr
