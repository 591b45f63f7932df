#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pgr/box3d.hpp"
#include "pgr/point_cloud.hpp"

namespace pgr {

// Binary frames: densely packed little-endian float32 records
// [x, y, z, intensity], no header (KITTI velodyne layout).
inline constexpr std::size_t kFrameRecordBytes = 16;

PointCloud load_frame_binary(const std::filesystem::path& path);
// Requires exactly one attribute per point.
void save_frame_binary(const PointCloud& cloud, const std::filesystem::path& path);

// Box annotations: a JSON array of objects with the fields
// class, cx, cy, cz, length, width, height, yaw.
std::vector<Box3D> parse_boxes(const std::string& text);
std::string serialize_boxes(const std::vector<Box3D>& boxes);
std::vector<Box3D> load_boxes(const std::filesystem::path& path);
void save_boxes(const std::vector<Box3D>& boxes, const std::filesystem::path& path);

// Ground masks: text, one '0' or '1' per line, line i <-> point i.
GroundMask parse_ground_mask(const std::string& text);
std::string serialize_ground_mask(const GroundMask& mask);
GroundMask load_ground_mask(const std::filesystem::path& path);
void save_ground_mask(const GroundMask& mask, const std::filesystem::path& path);

// Companion files share the frame's stem: 000042.bin -> 000042.boxes.json,
// 000042.ground.txt.
std::filesystem::path boxes_path_for(const std::filesystem::path& frame_path);
std::filesystem::path ground_path_for(const std::filesystem::path& frame_path);

// Writes to a sibling temporary file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const char> bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace pgr
