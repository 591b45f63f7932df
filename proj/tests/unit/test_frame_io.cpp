#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "generators.hpp"
#include "pgr/errors.hpp"
#include "pgr/frame_io.hpp"
#include "temp_dir.hpp"

using namespace pgr;
using pgr::testkit::TempDir;

namespace {

std::string record(float x, float y, float z, float i) {
  std::string s(16, '\0');
  const float v[] = {x, y, z, i};
  std::memcpy(s.data(), v, 16);
  return s;
}

}  // namespace

TEST(FrameIo, BinaryRoundTripIsExactForFloat32Values) {
  TempDir dir;
  PointCloud cloud(1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(-50.0f, 50.0f);
  for (int i = 0; i < 1000; ++i) {
    const float a[] = {u(rng)};
    cloud.add_point({u(rng), u(rng), u(rng)}, a);
  }
  save_frame_binary(cloud, dir / "000007.bin");
  const PointCloud back = load_frame_binary(dir / "000007.bin");
  EXPECT_EQ(back.frame_id(), "000007");
  ASSERT_EQ(back.size(), cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    EXPECT_EQ(back.position(i).x, cloud.position(i).x);
    EXPECT_EQ(back.position(i).z, cloud.position(i).z);
    EXPECT_EQ(back.attributes(i)[0], cloud.attributes(i)[0]);
  }
}

TEST(FrameIo, EmptyFileIsEmptyFrame) {
  TempDir dir;
  write_file_atomic(dir / "e.bin", std::string());
  EXPECT_TRUE(load_frame_binary(dir / "e.bin").empty());
}

TEST(FrameIo, RejectsTruncatedRecord) {
  TempDir dir;
  write_file_atomic(dir / "t.bin", record(1, 2, 3, 4) + "abc");
  EXPECT_THROW(load_frame_binary(dir / "t.bin"), FormatError);
}

TEST(FrameIo, ReportsNonFinitePointIndex) {
  TempDir dir;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  write_file_atomic(dir / "n.bin", record(1, 2, 3, 4) + record(0, 0, 0, 0) + record(1, nan, 0, 0));
  try {
    load_frame_binary(dir / "n.bin");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.point_index(), 2u);
  }
}

TEST(FrameIo, MissingFileIsIoError) {
  EXPECT_THROW(load_frame_binary("/nonexistent/x.bin"), IoError);
}

TEST(FrameIo, SaveRequiresOneAttribute) {
  TempDir dir;
  EXPECT_THROW(save_frame_binary(PointCloud(0), dir / "x.bin"), ContractError);
}

TEST(FrameIo, BoxesRoundTrip) {
  std::mt19937_64 rng(5);
  std::vector<Box3D> boxes;
  for (int i = 0; i < 20; ++i) boxes.push_back(testkit::random_box(rng));
  EXPECT_EQ(parse_boxes(serialize_boxes(boxes)), boxes);
}

TEST(FrameIo, BoxErrorsNameTheEntry) {
  const std::string text =
      R"([{"class":"Car","cx":0,"cy":0,"cz":0,"length":1,"width":1,"height":1,"yaw":0},
          {"class":"Car","cx":0,"cy":0,"cz":0,"length":-1,"width":1,"height":1,"yaw":0}])";
  try {
    parse_boxes(text);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("box entry 1"), std::string::npos);
  }
  EXPECT_THROW(parse_boxes("{"), ParseError);
  EXPECT_THROW(parse_boxes(R"([{"class":"Truck","cx":0,"cy":0,"cz":0,"length":1,"width":1,"height":1,"yaw":0}])"),
               ParseError);
}

TEST(FrameIo, GroundMaskRoundTrip) {
  const GroundMask mask{true, false, false, true};
  EXPECT_EQ(parse_ground_mask(serialize_ground_mask(mask)), mask);
  EXPECT_THROW(parse_ground_mask("0\n2\n"), ParseError);
}

TEST(FrameIo, CompanionPaths) {
  EXPECT_EQ(boxes_path_for("/d/000042.bin"), std::filesystem::path("/d/000042.boxes.json"));
  EXPECT_EQ(ground_path_for("/d/000042.bin"), std::filesystem::path("/d/000042.ground.txt"));
}
