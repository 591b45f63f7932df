#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgr/point_cloud.hpp"

namespace pgr {

/// Geometry quantization settings. Coordinates are first expressed in
/// integer source units (`units_per_meter`, millimeters by default, the way
/// LiDAR frames are fed to octree codecs) and then multiplied by
/// geometry_scale before rounding. One quantization step is therefore
/// 1 / (geometry_scale * units_per_meter) meters.
struct CodecConfig {
  double geometry_scale = 1.0;      // in (0, 1]
  double units_per_meter = 1000.0;  // > 0

  void validate() const;
  double multiplier() const { return geometry_scale * units_per_meter; }
  double step_m() const { return 1.0 / multiplier(); }
};

// Octree keys interleave 21 bits per axis.
inline constexpr int kMaxOctreeDepth = 21;

struct QuantizedCloud {
  std::vector<std::array<std::uint32_t, 3>> coords;  // unique, Morton order
  std::vector<std::uint32_t> source_indices;         // input point per coord
  Vec3 offset;                                        // per-axis input minimum
  double geometry_scale = 1.0;
  double units_per_meter = 1.0;
};

// q = floor((p - min) * multiplier + 0.5) per axis. Of several points sharing
// a cell, the last one in input order survives.
QuantizedCloud quantize(const PointCloud& cloud, const CodecConfig& cfg);

struct BitstreamHeader {
  std::string frame_id;
  double geometry_scale = 1.0;
  double units_per_meter = 1.0;
  Vec3 offset;
  std::uint64_t original_point_count = 0;  // frame size before preprocessing
  std::uint64_t point_count = 0;           // decoded points (occupied leaves)
  std::uint8_t depth = 0;
  std::uint8_t attribute_arity = 0;

  friend bool operator==(const BitstreamHeader&, const BitstreamHeader&) = default;
};

/// Container layout (little-endian):
///
///   offset  size  field
///   0       4     magic "PGRB"
///   4       1     version (1)
///   5       2     frame id length L
///   7       L     frame id bytes
///   7+L     8     geometry_scale (f64)
///   15+L    8     units_per_meter (f64)
///   23+L    24    offset x, y, z (3 x f64)
///   47+L    8     original point count (u64)
///   55+L    8     point count (u64)
///   63+L    1     octree depth (u8)
///   64+L    1     attribute arity (u8)
///   65+L    8     geometry payload bytes G (u64)
///   73+L    8     attribute payload bytes A (u64)
///   81+L    4     CRC-32 of bytes [0, 81+L) followed by both payloads
///   85+L    G     arithmetic-coded occupancy bytes, breadth first
///   85+L+G  A     attributes as f32, leaf (Morton) order
struct Bitstream {
  static constexpr std::uint8_t kVersion = 1;
  static constexpr std::size_t kFixedHeaderBytes = 85;

  BitstreamHeader header;
  std::vector<std::uint8_t> geometry_payload;
  std::vector<std::uint8_t> attribute_payload;

  std::size_t size_bytes() const {
    return kFixedHeaderBytes + header.frame_id.size() + geometry_payload.size() +
           attribute_payload.size();
  }

  std::vector<std::uint8_t> serialize() const;
  // Throws DecodeError on bad magic/version, truncation or checksum mismatch.
  static Bitstream parse(std::span<const std::uint8_t> bytes);

  friend bool operator==(const Bitstream&, const Bitstream&) = default;
};

// original_point_count defaults to cloud.size(); pass the pre-removal count
// so bits-per-point reflects the points that preprocessing dropped.
Bitstream encode_frame(const PointCloud& cloud, const CodecConfig& cfg,
                       std::optional<std::uint64_t> original_point_count = std::nullopt);

PointCloud decode_frame(const Bitstream& bitstream);

// Total container bits / original point count. DomainError when that count is 0.
double measure_bpp(const Bitstream& bitstream);

void write_bitstream(const Bitstream& bitstream, const std::filesystem::path& path);
Bitstream read_bitstream(const std::filesystem::path& path);

}  // namespace pgr
