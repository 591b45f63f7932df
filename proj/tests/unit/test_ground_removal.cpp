#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "pgr/errors.hpp"
#include "pgr/frame_io.hpp"
#include "pgr/ground_removal.hpp"
#include "reference_pgr.hpp"
#include "temp_dir.hpp"

using namespace pgr;

namespace {

PointCloud flat_plane(double half, double step, double z) {
  PointCloud cloud(0);
  for (double x = -half; x < half; x += step) {
    for (double y = -half; y < half; y += step) cloud.add_point({x + 0.013, y + 0.017, z}, {});
  }
  return cloud;
}

}  // namespace

TEST(RemovalConfig, PresetValues) {
  const RemovalConfig c0 = named_config("pgr-c0-kitti");
  EXPECT_EQ(c0, RemovalConfig{});
  EXPECT_EQ(named_config("pgr-c0-waymo").restore_rules[0].delta_res, 2.2);
  EXPECT_EQ(named_config("pgr-c1").er, 1.4);
  EXPECT_EQ(named_config("pgr-c2").restore_rules[0].delta_res, 1.4);
  EXPECT_EQ(named_config("pgr-c3").delta_minmax, 0.6);
  const RemovalConfig c4 = named_config("pgr-c4");
  EXPECT_EQ(c4.er, 0.6);
  EXPECT_EQ(c4.delta_minmax, 0.35);
  EXPECT_EQ(c4.restore_rules[0].delta_res, 1.6);
  EXPECT_EQ(c4.restore_rules[1].delta_res, 5.2);
}

TEST(RemovalConfig, UnknownPresetListsValidNames) {
  try {
    named_config("pgr-c9");
    FAIL();
  } catch (const LookupError& e) {
    EXPECT_NE(std::string(e.what()).find("pgr-c0-kitti"), std::string::npos);
  }
}

TEST(RemovalConfig, ResolveAliases) {
  EXPECT_EQ(resolve_removal_config("c0"), named_config("pgr-c0-kitti"));
  EXPECT_EQ(resolve_removal_config("c3"), named_config("pgr-c3"));
  EXPECT_EQ(resolve_removal_config("pgr-c4"), named_config("pgr-c4"));
}

TEST(RemovalConfig, JsonRoundTripAndFile) {
  const RemovalConfig c4 = named_config("pgr-c4");
  EXPECT_EQ(parse_removal_config(serialize_removal_config(c4)), c4);
  testkit::TempDir dir;
  write_file_atomic(dir / "c.json", serialize_removal_config(c4));
  EXPECT_EQ(resolve_removal_config((dir / "c.json").string()), c4);
}

TEST(RemovalConfig, Validation) {
  RemovalConfig c;
  c.resolution = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = RemovalConfig{};
  c.restore_rules = {{30.0, 1.8}};
  EXPECT_THROW(c.validate(), ValidationError);
  c.restore_rules = {{30.0, 1.8}, {20.0, 1.0}, {kUnbounded, 5.4}};
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_THROW(parse_removal_config("{\"er\": -1}"), ValidationError);
}

TEST(RemovalConfig, DeltaResByRange) {
  const RemovalConfig c;
  EXPECT_EQ(c.delta_res_for(0.0), 1.8);
  EXPECT_EQ(c.delta_res_for(29.99), 1.8);
  EXPECT_EQ(c.delta_res_for(30.0), 5.4);
  EXPECT_EQ(c.delta_res_for(1e6), 5.4);
}

TEST(GroundRemoval, FlatPlaneIsRemoved) {
  const PointCloud cloud = flat_plane(10.0, 0.1, -1.7);
  const PgrResult r = apply_pgr(cloud, RemovalConfig{});
  EXPECT_EQ(r.kept_points, 0u);
  EXPECT_EQ(r.retained_pillars, 0u);
  EXPECT_EQ(r.counters.grid_builds, 1);
  EXPECT_EQ(r.counters.removal_passes, 1);
  EXPECT_EQ(r.counters.restoration_passes, 1);
}

TEST(GroundRemoval, ObjectPillarsAndTheirSurroundingsSurvive) {
  PointCloud cloud = flat_plane(10.0, 0.1, -1.7);
  const std::size_t ground = cloud.size();
  for (double z = -1.7; z < 0.0; z += 0.1) cloud.add_point({5.05, 5.05, z}, {});
  const PgrResult r = apply_pgr(cloud, RemovalConfig{});
  EXPECT_EQ(r.retained_pillars, 1u);
  EXPECT_GT(r.restored_pillars, 0u);
  for (std::size_t i = ground; i < cloud.size(); ++i) EXPECT_TRUE(r.keep[i]);
  std::size_t kept_ground = 0;
  for (std::size_t i = 0; i < ground; ++i) {
    const Vec3 p = cloud.position(i);
    const bool near = std::abs(p.x - 5.2) <= 2.0 && std::abs(p.y - 5.2) <= 2.0;
    if (r.keep[i]) {
      ++kept_ground;
      EXPECT_TRUE(near);
    }
  }
  EXPECT_GT(kept_ground, 0u);
}

TEST(GroundRemoval, NoRestorationKeepsOnlyRetainedPillars) {
  PointCloud cloud = flat_plane(10.0, 0.1, -1.7);
  for (double z = -1.7; z < 0.0; z += 0.1) cloud.add_point({5.05, 5.05, z}, {});
  PgrOptions opts;
  opts.restoration = false;
  const PgrResult r = apply_pgr(cloud, RemovalConfig{}, opts);
  EXPECT_EQ(r.restored_pillars, 0u);
  EXPECT_EQ(r.counters.restoration_passes, 0);
  const PillarGrid grid = build_grid(cloud, GridSpec::anchored(cloud, 0.4));
  const auto object_pillar = grid.pillar_of_point()[cloud.size() - 1];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    EXPECT_EQ(r.keep[i], grid.pillar_of_point()[i] == object_pillar);
  }
}

TEST(GroundRemoval, RestorationIsSinglePass) {
  // A chain of removed pillars: only those within delta_res of the retained
  // pillar come back, not pillars within delta_res of restored ones.
  PointCloud cloud(0);
  for (int i = 0; i < 30; ++i) cloud.add_point({5.1 + 0.4 * i, 0.2, -1.7}, {});
  cloud.add_point({5.1, 0.2, 0.5}, {});
  cloud.add_point({5.1, 0.2, -1.7}, {});
  RemovalConfig cfg;
  cfg.restore_rules = {{kUnbounded, 0.8}};
  const PgrResult r = apply_pgr(cloud, cfg);
  EXPECT_EQ(r.retained_pillars, 1u);
  EXPECT_EQ(r.restored_pillars, 2u);
}

TEST(GroundRemoval, EmptyCloud) {
  const PgrResult r = apply_pgr(PointCloud(1), RemovalConfig{});
  EXPECT_TRUE(r.keep.empty());
  EXPECT_EQ(r.pillar_count, 0u);
}

TEST(GroundRemoval, ResolutionMismatchIsContractError) {
  PointCloud cloud(0);
  cloud.add_point({0, 0, 0}, {});
  const PillarGrid grid = build_grid(cloud, GridSpec{0.5, 0.0, 0.0});
  EXPECT_THROW(removal_phase(grid, RemovalConfig{}), ContractError);
  EXPECT_THROW(restoration_phase(grid, std::vector<std::uint8_t>{}, RemovalConfig{}), ContractError);
}

TEST(GroundRemoval, FilterCloudKeepsOrder) {
  PointCloud cloud(0);
  for (int i = 0; i < 5; ++i) cloud.add_point({double(i), 0, 0}, {});
  const PointCloud out = filter_cloud(cloud, KeepMask{false, true, false, true, true});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out.position(0).x, 1.0);
  EXPECT_EQ(out.position(2).x, 4.0);
  EXPECT_THROW(filter_cloud(cloud, KeepMask{true}), ContractError);
}

class ReferenceEquivalence : public ::testing::TestWithParam<std::string> {};

TEST_P(ReferenceEquivalence, MatchesQuadraticReference) {
  const RemovalConfig cfg = named_config(GetParam());
  std::mt19937_64 rng(1234);
  for (int t = 0; t < 150; ++t) {
    const PointCloud cloud = testkit::random_pillar_cloud(rng, 50, cfg.resolution);
    for (bool restoration : {true, false}) {
      PgrOptions opts;
      opts.restoration = restoration;
      const PgrResult r = apply_pgr(cloud, cfg, opts);
      const auto ref = testkit::reference_pgr(cloud, GridSpec::anchored(cloud, cfg.resolution), cfg, restoration);
      ASSERT_EQ(r.keep, ref.keep) << "trial " << t;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Presets, ReferenceEquivalence,
                         ::testing::Values("pgr-c0-kitti", "pgr-c0-waymo", "pgr-c1", "pgr-c2", "pgr-c3",
                                           "pgr-c4"));

TEST(GroundRemoval, SparsePathMatchesReference) {
  std::mt19937_64 rng(77);
  const RemovalConfig cfg;
  for (int t = 0; t < 20; ++t) {
    PointCloud a = testkit::random_pillar_cloud(rng, 20, 0.4);
    const PointCloud b = testkit::random_pillar_cloud(rng, 20, 0.4);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Vec3 p = b.position(i);
      a.add_point({p.x + 1500.0, p.y - 1500.0, p.z}, b.attributes(i));
    }
    const GridSpec spec = GridSpec::anchored(a, 0.4);
    ASSERT_FALSE(build_grid(a, spec).is_dense());
    EXPECT_EQ(apply_pgr(a, cfg).keep, testkit::reference_pgr(a, spec, cfg).keep);
  }
}
