#pragma once

#include <vector>

#include "pgr/box3d.hpp"
#include "pgr/point_cloud.hpp"

namespace pgr {

struct OracleConfig {
  double extension_factor = 0.0;  // boxes grow to (1 + EF) x (length, width, height)
};

/// Omniscient ground removal: every labeled ground point is dropped unless it
/// falls inside some box enlarged by (1 + EF) about its center. Non-ground
/// points are always kept.
KeepMask apply_oracle(const PointCloud& cloud, const GroundMask& ground,
                      const std::vector<Box3D>& boxes, const OracleConfig& cfg);

}  // namespace pgr
