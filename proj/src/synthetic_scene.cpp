#include "pgr/synthetic_scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "pgr/errors.hpp"

namespace pgr {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Face {
  Vec3 center;  // local frame
  Vec3 normal;  // local frame, unit
  Vec3 u_axis;  // local frame, half extent along u
  Vec3 v_axis;  // local frame, half extent along v
};

std::array<Face, 5> visible_candidate_faces(const Box3D& b) {
  const double hl = 0.5 * b.length;
  const double hw = 0.5 * b.width;
  const double hh = 0.5 * b.height;
  return {{
      {{0, 0, hh}, {0, 0, 1}, {hl, 0, 0}, {0, hw, 0}},
      {{hl, 0, 0}, {1, 0, 0}, {0, hw, 0}, {0, 0, hh}},
      {{-hl, 0, 0}, {-1, 0, 0}, {0, hw, 0}, {0, 0, hh}},
      {{0, hw, 0}, {0, 1, 0}, {hl, 0, 0}, {0, 0, hh}},
      {{0, -hw, 0}, {0, -1, 0}, {hl, 0, 0}, {0, 0, hh}},
  }};
}

double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

}  // namespace

double GroundModel::height_at(double x, double y) const {
  switch (kind) {
    case GroundKind::Flat: return base_height;
    case GroundKind::Slope: return base_height + gradient_x * x + gradient_y * y;
    case GroundKind::Curb:
      return y >= curb_offset ? base_height + curb_height + curb_cross_slope * (y - curb_offset) : base_height;
  }
  return base_height;
}

void SyntheticSceneSpec::validate() const {
  if (!(ground.base_height < 0.0)) throw ValidationError("ground must lie below the sensor");
  if (!(ground.curb_height >= 0.0)) throw ValidationError("curb height must be >= 0");
  if (!(radial_extent > 0.0)) throw ValidationError("radial extent must be > 0");
  if (!(noise_stddev >= 0.0)) throw ValidationError("noise stddev must be >= 0");
  if (lidar.beams < 1 || lidar.azimuth_steps < 1) {
    throw ValidationError("lidar pattern needs at least one beam and one azimuth step");
  }
  if (!(lidar.min_elevation_deg <= lidar.max_elevation_deg && lidar.max_elevation_deg < 0.0)) {
    throw ValidationError("ground beams need elevations below the horizon");
  }
  for (const auto& obj : objects) {
    if (!(obj.density > 0.0)) throw ValidationError("object density must be > 0");
    obj.box.validate();
  }
}

SyntheticScene synthesize_scene(const SyntheticSceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double sigma = spec.noise_stddev;

  SyntheticScene scene;
  scene.cloud = PointCloud(1, spec.frame_id);
  const double sensor_height = -spec.ground.base_height;

  const auto& lp = spec.lidar;
  for (int b = 0; b < lp.beams; ++b) {
    const double t = lp.beams == 1 ? 1.0 : static_cast<double>(b) / (lp.beams - 1);
    const double elevation = lp.min_elevation_deg + t * (lp.max_elevation_deg - lp.min_elevation_deg);
    const double range = sensor_height / std::tan(-elevation * kDegToRad);
    if (range > spec.radial_extent) continue;
    for (int a = 0; a < lp.azimuth_steps; ++a) {
      const double azimuth = 2.0 * std::numbers::pi * a / lp.azimuth_steps;
      const double x = range * std::cos(azimuth) + sigma * noise(rng);
      const double y = range * std::sin(azimuth) + sigma * noise(rng);
      const double z = spec.ground.height_at(x, y) + sigma * noise(rng);
      const float intensity = static_cast<float>(0.05 + 0.25 * unit(rng));
      scene.cloud.add_point({x, y, z}, std::span<const float>(&intensity, 1));
      scene.ground.push_back(true);
    }
  }

  for (const auto& obj : spec.objects) {
    const Box3D& box = obj.box;
    scene.boxes.push_back(box);
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    const double hl = 0.5 * box.length;
    const double hw = 0.5 * box.width;
    const double hh = 0.5 * box.height;
    for (const Face& f : visible_candidate_faces(box)) {
      const Vec3 n_world{c * f.normal.x - s * f.normal.y, s * f.normal.x + c * f.normal.y,
                         f.normal.z};
      const Vec3 center_world = box.to_world(f.center);
      const double facing =
          -(n_world.x * center_world.x + n_world.y * center_world.y + n_world.z * center_world.z);
      if (facing <= 0.0) continue;
      const double area = 4.0 * norm(f.u_axis) * norm(f.v_axis);
      const auto count = static_cast<std::size_t>(std::floor(obj.density * area + unit(rng)));
      for (std::size_t k = 0; k < count; ++k) {
        const double u = 2.0 * unit(rng) - 1.0;
        const double v = 2.0 * unit(rng) - 1.0;
        Vec3 local{f.center.x + u * f.u_axis.x + v * f.v_axis.x + sigma * noise(rng),
                   f.center.y + u * f.u_axis.y + v * f.v_axis.y + sigma * noise(rng),
                   f.center.z + u * f.u_axis.z + v * f.v_axis.z + sigma * noise(rng)};
        local.x = std::clamp(local.x, -hl, hl);
        local.y = std::clamp(local.y, -hw, hw);
        local.z = std::clamp(local.z, -hh, hh);
        Vec3 world = box.to_world(local);
        // Rotation round-off can push a clamped face point a hair outside.
        if (!box.contains(world)) {
          local.x *= 1.0 - 1e-9;
          local.y *= 1.0 - 1e-9;
          local.z *= 1.0 - 1e-9;
          world = box.to_world(local);
        }
        const float intensity = static_cast<float>(0.2 + 0.7 * unit(rng));
        scene.cloud.add_point(world, std::span<const float>(&intensity, 1));
        scene.ground.push_back(false);
      }
    }
  }
  return scene;
}

namespace {

struct ClassTemplate {
  ObjectClass label;
  double length, width, height;
  double length_jitter;
  double base_density;
};

constexpr ClassTemplate kCar{ObjectClass::Car, 4.2, 1.8, 1.5, 0.4, 80.0};
constexpr ClassTemplate kPedestrian{ObjectClass::Pedestrian, 0.6, 0.6, 1.75, 0.1, 150.0};
constexpr ClassTemplate kCyclist{ObjectClass::Cyclist, 1.8, 0.6, 1.7, 0.1, 120.0};

double range_density(double base, double range) {
  const double falloff = std::min(1.0, (10.0 / range) * (10.0 / range));
  return std::max(4.0, base * falloff);
}

}  // namespace

SyntheticSceneSpec make_scene_spec(const SceneOptions& options, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  auto uniform_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  SyntheticSceneSpec spec;
  spec.radial_extent = options.radial_extent;
  spec.lidar.azimuth_steps = options.azimuth_steps;
  spec.frame_id = std::string(options.style == SceneStyle::Urban ? "urban_" : "open_") +
                  std::to_string(seed);

  switch (uniform_int(0, 2)) {
    case 0: spec.ground.kind = GroundKind::Flat; break;
    case 1: {
      spec.ground.kind = GroundKind::Slope;
      const double angle = uniform(0.0, 5.0) * kDegToRad;
      const double heading = uniform(-std::numbers::pi, std::numbers::pi);
      spec.ground.gradient_x = std::tan(angle) * std::cos(heading);
      spec.ground.gradient_y = std::tan(angle) * std::sin(heading);
      break;
    }
    default:
      spec.ground.kind = GroundKind::Curb;
      spec.ground.curb_height = uniform(0.05, 0.2);
      spec.ground.curb_offset = (unit(rng) < 0.5 ? -1.0 : 1.0) * uniform(3.0, 10.0);
      spec.ground.curb_cross_slope = uniform(0.01, 0.025);
      break;
  }

  const bool urban = options.style == SceneStyle::Urban;
  double facade_y = std::numeric_limits<double>::infinity();
  if (urban) {
    facade_y = uniform(12.0, 18.0);
    const double facade_len = 1.6 * options.radial_extent;
    for (double side : {-1.0, 1.0}) {
      Box3D wall;
      wall.label = ObjectClass::Other;
      wall.length = facade_len;
      wall.width = 0.5;
      wall.height = 8.0;
      wall.center_x = 0.0;
      wall.center_y = side * (facade_y + 0.25);
      wall.center_z = spec.ground.height_at(0.0, wall.center_y) + 0.5 * wall.height;
      spec.objects.push_back({wall, 15.0});
    }
  }

  struct Placed {
    double x, y, r;
  };
  std::vector<Placed> placed;
  auto place = [&](const ClassTemplate& tpl) {
    for (int attempt = 0; attempt < 60; ++attempt) {
      const double range = uniform(5.0, options.radial_extent - 5.0);
      const double azimuth = uniform(-std::numbers::pi, std::numbers::pi);
      const double x = range * std::cos(azimuth);
      const double y = range * std::sin(azimuth);
      Box3D box;
      box.label = tpl.label;
      box.length = tpl.length + uniform(-tpl.length_jitter, tpl.length_jitter);
      box.width = tpl.width;
      box.height = tpl.height;
      box.yaw = uniform(-std::numbers::pi, std::numbers::pi);
      const double radius = 0.5 * std::hypot(box.length, box.width);
      if (std::abs(y) + radius > facade_y - 1.0) continue;
      const bool clash = std::any_of(placed.begin(), placed.end(), [&](const Placed& p) {
        return std::hypot(p.x - x, p.y - y) < p.r + radius + 0.5;
      });
      if (clash) continue;
      box.center_x = x;
      box.center_y = y;
      box.center_z = spec.ground.height_at(x, y) + 0.5 * box.height;
      placed.push_back({x, y, radius});
      spec.objects.push_back({box, range_density(tpl.base_density, range)});
      return;
    }
  };

  const int cars = urban ? uniform_int(10, 20) : uniform_int(1, 4);
  const int pedestrians = urban ? uniform_int(4, 10) : uniform_int(1, 3);
  const int cyclists = urban ? uniform_int(2, 6) : uniform_int(0, 2);
  for (int i = 0; i < cars; ++i) place(kCar);
  for (int i = 0; i < pedestrians; ++i) place(kPedestrian);
  for (int i = 0; i < cyclists; ++i) place(kCyclist);
  return spec;
}

}  // namespace pgr
