#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pgr/box3d.hpp"
#include "pgr/point_cloud.hpp"

namespace pgr {

enum class GroundKind : std::uint8_t { Flat, Slope, Curb };

/// Terrain height model. The sensor sits at the origin; `base_height` is the
/// terrain height directly below it (negative sensor mounting height).
struct GroundModel {
  GroundKind kind = GroundKind::Flat;
  double base_height = -1.73;
  // Slope: dz/dx and dz/dy.
  double gradient_x = 0.0;
  double gradient_y = 0.0;
  // Curb: terrain with y >= curb_offset is raised by curb_height and rises
  // further by curb_cross_slope per meter away from the curb (sidewalks
  // drain toward the road).
  double curb_height = 0.0;
  double curb_offset = 0.0;
  double curb_cross_slope = 0.0;

  double height_at(double x, double y) const;
};

// Ground returns follow a spinning multi-beam sensor: each downward beam
// traces one ring, sampled at `azimuth_steps` angles.
struct LidarPattern {
  int beams = 64;
  int azimuth_steps = 1024;
  double min_elevation_deg = -24.9;
  double max_elevation_deg = -2.0;
};

struct ObjectProxy {
  Box3D box;
  double density = 50.0;  // points per m^2 of visible surface
};

struct SyntheticSceneSpec {
  GroundModel ground;
  std::vector<ObjectProxy> objects;
  double noise_stddev = 0.02;
  double radial_extent = 50.0;
  LidarPattern lidar;
  std::string frame_id = "synthetic";

  void validate() const;
};

struct SyntheticScene {
  PointCloud cloud;  // one attribute: intensity
  GroundMask ground;
  std::vector<Box3D> boxes;
};

/// Deterministic in (spec, seed). Ground points come from the ground model
/// (mask = true). Object points sample the faces of each proxy that are
/// visible from the sensor (roof included when below the sensor), then get
/// clamped into their box so every object point lies inside it.
SyntheticScene synthesize_scene(const SyntheticSceneSpec& spec, std::uint64_t seed);

enum class SceneStyle : std::uint8_t {
  Open,   // a handful of road users on open terrain
  Urban,  // dense traffic, building facades, curbs
};

struct SceneOptions {
  SceneStyle style = SceneStyle::Open;
  int azimuth_steps = 1024;
  double radial_extent = 50.0;
};

// Randomized scene layout: terrain is flat, sloped (<= 5 degrees) or curbed
// (<= 0.2 m); cars, pedestrians and cyclists rest on the terrain without
// overlapping each other. Point density on objects falls off with range.
SyntheticSceneSpec make_scene_spec(const SceneOptions& options, std::uint64_t seed);

}  // namespace pgr
