#include "pgr/frame_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pgr/errors.hpp"

namespace pgr {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

float read_f32_le(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

void write_f32_le(float v, char* out) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) out[b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return std::move(ss).str();
}

void write_file_atomic(const fs::path& path, std::span<const char> bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for '" + path.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

PointCloud load_frame_binary(const fs::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() % kFrameRecordBytes != 0) {
    throw FormatError("'" + path.string() + "': size " + std::to_string(bytes.size()) +
                      " is not a multiple of " + std::to_string(kFrameRecordBytes) + " bytes");
  }
  const std::size_t n = bytes.size() / kFrameRecordBytes;
  PointCloud cloud(1, path.stem().string());
  cloud.reserve(n);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* rec = data + i * kFrameRecordBytes;
    const float x = read_f32_le(rec);
    const float y = read_f32_le(rec + 4);
    const float z = read_f32_le(rec + 8);
    const float intensity = read_f32_le(rec + 12);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(intensity)) {
      throw DataError("'" + path.string() + "': non-finite value", i);
    }
    cloud.add_point(Vec3{x, y, z}, std::span<const float>(&intensity, 1));
  }
  return cloud;
}

void save_frame_binary(const PointCloud& cloud, const fs::path& path) {
  if (cloud.attribute_arity() != 1) {
    throw ContractError("binary frames carry exactly one attribute, cloud has " +
                        std::to_string(cloud.attribute_arity()));
  }
  std::vector<char> bytes(cloud.size() * kFrameRecordBytes);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    char* rec = bytes.data() + i * kFrameRecordBytes;
    const Vec3& p = cloud.position(i);
    write_f32_le(static_cast<float>(p.x), rec);
    write_f32_le(static_cast<float>(p.y), rec + 4);
    write_f32_le(static_cast<float>(p.z), rec + 8);
    write_f32_le(cloud.attributes(i)[0], rec + 12);
  }
  write_file_atomic(path, bytes);
}

std::vector<Box3D> parse_boxes(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("box file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("box file must contain a JSON array");

  std::vector<Box3D> boxes;
  boxes.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& e = doc[i];
    Box3D box;
    try {
      box.label = parse_object_class(e.at("class").get<std::string>());
      box.center_x = e.at("cx").get<double>();
      box.center_y = e.at("cy").get<double>();
      box.center_z = e.at("cz").get<double>();
      box.length = e.at("length").get<double>();
      box.width = e.at("width").get<double>();
      box.height = e.at("height").get<double>();
      box.yaw = e.at("yaw").get<double>();
    } catch (const json::exception& ex) {
      throw ParseError("box entry " + std::to_string(i) + ": " + ex.what());
    } catch (const ParseError& ex) {
      throw ParseError("box entry " + std::to_string(i) + ": " + ex.what());
    }
    try {
      box.validate();
    } catch (const ValidationError& ex) {
      throw ValidationError("box entry " + std::to_string(i) + ": " + ex.what());
    }
    boxes.push_back(box);
  }
  return boxes;
}

std::string serialize_boxes(const std::vector<Box3D>& boxes) {
  json doc = json::array();
  for (const auto& b : boxes) {
    doc.push_back({{"class", std::string(to_string(b.label))},
                   {"cx", b.center_x},
                   {"cy", b.center_y},
                   {"cz", b.center_z},
                   {"length", b.length},
                   {"width", b.width},
                   {"height", b.height},
                   {"yaw", b.yaw}});
  }
  return doc.dump(2) + "\n";
}

std::vector<Box3D> load_boxes(const fs::path& path) {
  try {
    return parse_boxes(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError("'" + path.string() + "': " + e.what());
  }
}

void save_boxes(const std::vector<Box3D>& boxes, const fs::path& path) {
  const std::string text = serialize_boxes(boxes);
  write_file_atomic(path, text);
}

GroundMask parse_ground_mask(const std::string& text) {
  GroundMask mask;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "0") {
      mask.push_back(false);
    } else if (line == "1") {
      mask.push_back(true);
    } else {
      throw ParseError("ground mask line " + std::to_string(line_no) + ": expected 0 or 1");
    }
  }
  return mask;
}

std::string serialize_ground_mask(const GroundMask& mask) {
  std::string out;
  out.reserve(mask.size() * 2);
  for (bool g : mask) {
    out.push_back(g ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

GroundMask load_ground_mask(const fs::path& path) {
  try {
    return parse_ground_mask(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

void save_ground_mask(const GroundMask& mask, const fs::path& path) {
  write_file_atomic(path, serialize_ground_mask(mask));
}

fs::path boxes_path_for(const fs::path& frame_path) {
  fs::path p = frame_path;
  return p.replace_extension(".boxes.json");
}

fs::path ground_path_for(const fs::path& frame_path) {
  fs::path p = frame_path;
  return p.replace_extension(".ground.txt");
}

}  // namespace pgr
