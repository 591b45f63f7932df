#include "pgr/oracle.hpp"

#include <string>

#include "pgr/errors.hpp"

namespace pgr {

KeepMask apply_oracle(const PointCloud& cloud, const GroundMask& ground,
                      const std::vector<Box3D>& boxes, const OracleConfig& cfg) {
  if (ground.size() != cloud.size()) {
    throw ContractError("ground mask length " + std::to_string(ground.size()) +
                        " differs from cloud size " + std::to_string(cloud.size()));
  }
  if (!(cfg.extension_factor >= 0.0)) throw ValidationError("extension factor must be >= 0");

  KeepMask keep(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) keep[i] = !ground[i];
  const double scale = 1.0 + cfg.extension_factor;
  for (const Box3D& box : boxes) {
    for (std::uint32_t i : points_in_box(cloud, box, scale)) keep[i] = true;
  }
  return keep;
}

}  // namespace pgr
