#pragma once

#include <map>
#include <optional>
#include <vector>

#include "pgr/box3d.hpp"
#include "pgr/point_cloud.hpp"

namespace pgr {

struct KeptCount {
  std::size_t kept = 0;
  std::size_t total = 0;

  std::optional<double> fraction() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(kept) / static_cast<double>(total);
  }
  KeptCount& operator+=(const KeptCount& o) {
    kept += o.kept;
    total += o.total;
    return *this;
  }
};

/// How many points preprocessing kept, per object class (union of that
/// class's boxes, unscaled) and over the whole frame. Classes without boxes
/// are absent from per_class.
struct PreservationReport {
  std::map<ObjectClass, KeptCount> per_class;
  KeptCount in_boxes;  // union over all boxes
  KeptCount overall;

  std::optional<double> class_fraction(ObjectClass c) const;
  std::optional<double> overall_fraction() const { return overall.fraction(); }

  PreservationReport& operator+=(const PreservationReport& o);
};

PreservationReport preservation_report(const PointCloud& cloud, const KeepMask& mask,
                                       const std::vector<Box3D>& boxes);

}  // namespace pgr
