#include "generators.hpp"

#include <cmath>
#include <numbers>

namespace pgr::testkit {

PointCloud random_pillar_cloud(std::mt19937_64& rng, int max_side, double resolution) {
  std::uniform_int_distribution<int> side(1, max_side);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int w = side(rng);
  const int h = side(rng);
  const double occupancy = 0.3 + 0.7 * u(rng);
  const double gx = (u(rng) - 0.5) * 0.1;
  const double gy = (u(rng) - 0.5) * 0.1;
  const double base = -1.7 + (u(rng) - 0.5) * 0.4;
  const double ox = (u(rng) - 0.5) * 80.0;
  const double oy = (u(rng) - 0.5) * 80.0;

  PointCloud cloud(1);
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      if (u(rng) > occupancy) continue;
      const double cx0 = ox + ix * resolution;
      const double cy0 = oy + iy * resolution;
      const double kind = u(rng);
      const int n = 1 + static_cast<int>(u(rng) * 4.0);
      const double ground = base + gx * ix * resolution + gy * iy * resolution;
      for (int k = 0; k < n; ++k) {
        const double x = cx0 + (0.05 + 0.9 * u(rng)) * resolution;
        const double y = cy0 + (0.05 + 0.9 * u(rng)) * resolution;
        double z = ground + (u(rng) - 0.5) * 0.1;
        if (kind < 0.15) {
          z += 0.3 + 0.3 * u(rng);  // bump near the baseline thresholds
        } else if (kind < 0.3) {
          z += 2.0 * u(rng);  // tall structure
        } else if (kind < 0.35) {
          z += 0.35 + 0.1 * u(rng);
        }
        const float a[] = {static_cast<float>(u(rng))};
        cloud.add_point({x, y, z}, a);
      }
    }
  }
  if (cloud.empty()) {
    const float a[] = {0.0f};
    cloud.add_point({ox + 0.5 * resolution, oy + 0.5 * resolution, base}, a);
  }
  return cloud;
}

PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, std::size_t arity, double extent) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::uniform_real_distribution<float> a(0.0f, 1.0f);
  PointCloud cloud(arity);
  std::vector<float> attrs(arity);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : attrs) v = a(rng);
    cloud.add_point({u(rng), u(rng), u(rng)}, attrs);
  }
  return cloud;
}

Box3D random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Box3D b;
  b.center_x = (u(rng) - 0.5) * 20.0;
  b.center_y = (u(rng) - 0.5) * 20.0;
  b.center_z = (u(rng) - 0.5) * 2.0;
  b.length = 0.3 + 5.0 * u(rng);
  b.width = 0.3 + 3.0 * u(rng);
  b.height = 0.3 + 2.0 * u(rng);
  b.yaw = (u(rng) * 2.0 - 1.0) * std::numbers::pi;
  b.label = kAllClasses[static_cast<std::size_t>(u(rng) * 4.0) % 4];
  return b;
}

Cubic random_cubic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return Cubic{{60.0 + 10.0 * u(rng), 8.0 * u(rng), 3.0 * u(rng), 1.5 * u(rng)}};
}

RateCurve sample_curve(const Cubic& cubic, const std::vector<double>& bpps) {
  std::vector<RatePoint> pts;
  for (double r : bpps) pts.push_back({r, cubic(std::log10(r))});
  return RateCurve(std::move(pts));
}

}  // namespace pgr::testkit
