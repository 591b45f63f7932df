#include "pgr/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include <zlib.h>

#include "pgr/arithmetic_coder.hpp"
#include "pgr/errors.hpp"
#include "pgr/frame_io.hpp"

namespace pgr {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'P', 'G', 'R', 'B'};
constexpr std::uint32_t kMaxCoord = (1u << kMaxOctreeDepth) - 1;

std::uint64_t morton_key(const std::array<std::uint32_t, 3>& c) {
  std::uint64_t key = 0;
  for (int b = kMaxOctreeDepth - 1; b >= 0; --b) {
    key = (key << 3) | (static_cast<std::uint64_t>((c[0] >> b) & 1u) << 2) |
          (static_cast<std::uint64_t>((c[1] >> b) & 1u) << 1) |
          static_cast<std::uint64_t>((c[2] >> b) & 1u);
  }
  return key;
}

std::array<std::uint32_t, 3> morton_decode(std::uint64_t key, int depth) {
  std::array<std::uint32_t, 3> c{0, 0, 0};
  for (int b = 0; b < depth; ++b) {
    const auto triple = static_cast<std::uint32_t>((key >> (3 * b)) & 7u);
    c[0] |= ((triple >> 2) & 1u) << b;
    c[1] |= ((triple >> 1) & 1u) << b;
    c[2] |= (triple & 1u) << b;
  }
  return c;
}

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    if constexpr (std::is_floating_point_v<T>) {
      using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
      put(std::bit_cast<U>(value));
    } else {
      for (std::size_t b = 0; b < sizeof(T); ++b) {
        out_.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(value) >> (8 * b)) & 0xFFu));
      }
    }
  }
  void put_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) return;
    const std::size_t at = out_.size();
    out_.resize(at + bytes.size());
    std::memcpy(out_.data() + at, bytes.data(), bytes.size());
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename T>
  T get() {
    if constexpr (std::is_floating_point_v<T>) {
      using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
      return std::bit_cast<T>(get<U>());
    } else {
      need(sizeof(T));
      std::uint64_t v = 0;
      for (std::size_t b = 0; b < sizeof(T); ++b) v |= static_cast<std::uint64_t>(in_[pos_ + b]) << (8 * b);
      pos_ += sizeof(T);
      return static_cast<T>(v);
    }
  }
  std::span<const std::uint8_t> get_bytes(std::uint64_t n) {
    need(n);
    auto s = in_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return s;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > in_.size() - pos_) throw DecodeError("bitstream truncated");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const std::uint8_t> head, std::span<const std::uint8_t> geom,
                     std::span<const std::uint8_t> attr) {
  uLong crc = crc32(0L, Z_NULL, 0);
  auto feed = [&](std::span<const std::uint8_t> s) {
    // zlib takes uInt lengths; feed in chunks.
    std::size_t done = 0;
    while (done < s.size()) {
      const std::size_t chunk = std::min<std::size_t>(s.size() - done, 1u << 30);
      crc = crc32(crc, s.data() + done, static_cast<uInt>(chunk));
      done += chunk;
    }
  };
  feed(head);
  feed(geom);
  feed(attr);
  return static_cast<std::uint32_t>(crc);
}

int depth_for(std::uint32_t max_coord) { return std::bit_width(max_coord); }

}  // namespace

void CodecConfig::validate() const {
  if (!(geometry_scale > 0.0 && geometry_scale <= 1.0)) {
    throw ValidationError("geometry_scale must lie in (0, 1]");
  }
  if (!(units_per_meter > 0.0) || !std::isfinite(units_per_meter)) {
    throw ValidationError("units_per_meter must be a finite value > 0");
  }
}

QuantizedCloud quantize(const PointCloud& cloud, const CodecConfig& cfg) {
  cfg.validate();
  QuantizedCloud q;
  q.geometry_scale = cfg.geometry_scale;
  q.units_per_meter = cfg.units_per_meter;
  if (cloud.empty()) return q;

  const auto positions = cloud.positions();
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  for (const Vec3& p : positions) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
  }
  q.offset = lo;

  const double m = cfg.multiplier();
  auto to_int = [&](double v, std::size_t i) {
    const double r = std::floor(v * m + 0.5);
    if (r > static_cast<double>(kMaxCoord)) {
      throw DataError("quantized coordinate exceeds " + std::to_string(kMaxOctreeDepth) +
                          " bits; lower geometry_scale",
                      i);
    }
    return static_cast<std::uint32_t>(r);
  };

  struct Entry {
    std::uint64_t key;
    std::uint32_t index;
    std::array<std::uint32_t, 3> coord;
  };
  std::vector<Entry> entries(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Vec3& p = positions[i];
    const std::array<std::uint32_t, 3> c{to_int(p.x - lo.x, i), to_int(p.y - lo.y, i),
                                         to_int(p.z - lo.z, i)};
    entries[i] = {morton_key(c), static_cast<std::uint32_t>(i), c};
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key < b.key : a.index < b.index;
  });
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k + 1 < entries.size() && entries[k + 1].key == entries[k].key) continue;
    q.coords.push_back(entries[k].coord);
    q.source_indices.push_back(entries[k].index);
  }
  return q;
}

Bitstream encode_frame(const PointCloud& cloud, const CodecConfig& cfg,
                       std::optional<std::uint64_t> original_point_count) {
  cfg.validate();
  if (cloud.attribute_arity() > std::numeric_limits<std::uint8_t>::max()) {
    throw ContractError("attribute arity exceeds 255");
  }
  if (cloud.frame_id().size() > std::numeric_limits<std::uint16_t>::max()) {
    throw ContractError("frame id too long");
  }
  const QuantizedCloud q = quantize(cloud, cfg);

  Bitstream bs;
  BitstreamHeader& h = bs.header;
  h.frame_id = cloud.frame_id();
  h.geometry_scale = cfg.geometry_scale;
  h.units_per_meter = cfg.units_per_meter;
  h.offset = q.offset;
  h.original_point_count = original_point_count.value_or(cloud.size());
  h.point_count = q.coords.size();
  h.attribute_arity = static_cast<std::uint8_t>(cloud.attribute_arity());

  std::uint32_t max_coord = 0;
  for (const auto& c : q.coords) max_coord = std::max({max_coord, c[0], c[1], c[2]});
  const int depth = depth_for(max_coord);
  h.depth = static_cast<std::uint8_t>(depth);

  if (depth > 0) {
    std::vector<std::uint64_t> keys;
    keys.reserve(q.coords.size());
    for (const auto& c : q.coords) keys.push_back(morton_key(c));  // sorted by quantize

    std::array<AdaptiveBitModel, 8> models{};
    BinaryArithmeticEncoder enc;
    for (int level = 0; level < depth; ++level) {
      const int shift = 3 * (depth - 1 - level);
      std::size_t k = 0;
      while (k < keys.size()) {
        const std::uint64_t node = keys[k] >> (shift + 3);
        std::uint8_t occupancy = 0;
        while (k < keys.size() && (keys[k] >> (shift + 3)) == node) {
          occupancy |= static_cast<std::uint8_t>(1u << ((keys[k] >> shift) & 7u));
          ++k;
        }
        for (int bit = 0; bit < 8; ++bit) enc.encode(((occupancy >> bit) & 1u) != 0, models[bit]);
      }
    }
    bs.geometry_payload = enc.finish();
  }

  ByteWriter attr(bs.attribute_payload);
  bs.attribute_payload.reserve(q.coords.size() * cloud.attribute_arity() * 4);
  for (std::uint32_t src : q.source_indices) {
    for (float a : cloud.attributes(src)) attr.put(a);
  }
  return bs;
}

PointCloud decode_frame(const Bitstream& bs) {
  const BitstreamHeader& h = bs.header;
  if (!(h.geometry_scale > 0.0 && h.geometry_scale <= 1.0) || !(h.units_per_meter > 0.0) ||
      !std::isfinite(h.units_per_meter)) {
    throw DecodeError("invalid quantization parameters in header");
  }
  if (!std::isfinite(h.offset.x) || !std::isfinite(h.offset.y) || !std::isfinite(h.offset.z)) {
    throw DecodeError("non-finite offset in header");
  }
  if (h.depth > kMaxOctreeDepth) throw DecodeError("octree depth out of range");
  const std::uint64_t expected_attr = h.point_count * h.attribute_arity * 4ull;
  if (h.point_count > (1ull << 40) || bs.attribute_payload.size() != expected_attr) {
    throw DecodeError("attribute payload size does not match point count");
  }

  std::vector<std::uint64_t> nodes;
  if (h.depth == 0) {
    if (h.point_count > 1) throw DecodeError("depth-0 stream must hold at most one point");
    if (!bs.geometry_payload.empty()) throw DecodeError("unexpected geometry payload");
    if (h.point_count == 1) nodes.push_back(0);
  } else {
    if (h.point_count == 0) throw DecodeError("non-empty octree with zero points");
    std::array<AdaptiveBitModel, 8> models{};
    BinaryArithmeticDecoder dec(bs.geometry_payload);
    nodes.push_back(0);
    std::vector<std::uint64_t> next;
    for (int level = 0; level < h.depth; ++level) {
      next.clear();
      for (std::uint64_t node : nodes) {
        std::uint8_t occupancy = 0;
        for (int bit = 0; bit < 8; ++bit) {
          if (dec.decode(models[bit])) occupancy |= static_cast<std::uint8_t>(1u << bit);
        }
        if (occupancy == 0) throw DecodeError("empty occupancy code for an occupied node");
        for (int child = 0; child < 8; ++child) {
          if ((occupancy >> child) & 1u) next.push_back((node << 3) | static_cast<std::uint64_t>(child));
        }
        if (next.size() > h.point_count) throw DecodeError("octree holds more nodes than points");
      }
      if (dec.overran()) throw DecodeError("geometry payload exhausted");
      nodes.swap(next);
    }
  }
  if (nodes.size() != h.point_count) throw DecodeError("decoded point count mismatch");

  PointCloud cloud(h.attribute_arity, h.frame_id);
  cloud.reserve(nodes.size());
  const double m = h.geometry_scale * h.units_per_meter;
  ByteReader attr(bs.attribute_payload);
  std::vector<float> values(h.attribute_arity);
  for (std::uint64_t key : nodes) {
    const auto c = morton_decode(key, h.depth);
    for (auto& v : values) v = attr.get<float>();
    try {
      cloud.add_point({c[0] / m + h.offset.x, c[1] / m + h.offset.y, c[2] / m + h.offset.z}, values);
    } catch (const DataError& e) {
      throw DecodeError(std::string("decoded invalid point: ") + e.what());
    }
  }
  return cloud;
}

double measure_bpp(const Bitstream& bs) {
  if (bs.header.original_point_count == 0) {
    throw DomainError("bits per point undefined for a frame with zero points");
  }
  return static_cast<double>(bs.size_bytes()) * 8.0 /
         static_cast<double>(bs.header.original_point_count);
}

std::vector<std::uint8_t> Bitstream::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(size_bytes());
  ByteWriter w(out);
  w.put_bytes(kMagic);
  w.put(kVersion);
  w.put(static_cast<std::uint16_t>(header.frame_id.size()));
  w.put_bytes({reinterpret_cast<const std::uint8_t*>(header.frame_id.data()), header.frame_id.size()});
  w.put(header.geometry_scale);
  w.put(header.units_per_meter);
  w.put(header.offset.x);
  w.put(header.offset.y);
  w.put(header.offset.z);
  w.put(header.original_point_count);
  w.put(header.point_count);
  w.put(header.depth);
  w.put(header.attribute_arity);
  w.put(static_cast<std::uint64_t>(geometry_payload.size()));
  w.put(static_cast<std::uint64_t>(attribute_payload.size()));
  w.put(crc_of(out, geometry_payload, attribute_payload));
  w.put_bytes(geometry_payload);
  w.put_bytes(attribute_payload);
  return out;
}

Bitstream Bitstream::parse(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.get_bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw DecodeError("bad magic");
  const auto version = r.get<std::uint8_t>();
  if (version != kVersion) throw DecodeError("unsupported bitstream version " + std::to_string(version));

  Bitstream bs;
  BitstreamHeader& h = bs.header;
  const auto id_len = r.get<std::uint16_t>();
  const auto id = r.get_bytes(id_len);
  h.frame_id.assign(id.begin(), id.end());
  h.geometry_scale = r.get<double>();
  h.units_per_meter = r.get<double>();
  h.offset.x = r.get<double>();
  h.offset.y = r.get<double>();
  h.offset.z = r.get<double>();
  h.original_point_count = r.get<std::uint64_t>();
  h.point_count = r.get<std::uint64_t>();
  h.depth = r.get<std::uint8_t>();
  h.attribute_arity = r.get<std::uint8_t>();
  const auto geom_len = r.get<std::uint64_t>();
  const auto attr_len = r.get<std::uint64_t>();
  const std::size_t head_len = r.position();
  const auto checksum = r.get<std::uint32_t>();
  if (geom_len > r.remaining() || attr_len > r.remaining() - geom_len) {
    throw DecodeError("bitstream truncated");
  }
  if (geom_len + attr_len != r.remaining()) throw DecodeError("trailing bytes after payloads");
  const auto geom = r.get_bytes(geom_len);
  const auto attr = r.get_bytes(attr_len);
  if (crc_of(bytes.first(head_len), geom, attr) != checksum) throw DecodeError("checksum mismatch");
  bs.geometry_payload.assign(geom.begin(), geom.end());
  bs.attribute_payload.assign(attr.begin(), attr.end());
  return bs;
}

void write_bitstream(const Bitstream& bs, const std::filesystem::path& path) {
  const auto bytes = bs.serialize();
  write_file_atomic(path, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

Bitstream read_bitstream(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  return Bitstream::parse({reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});
}

}  // namespace pgr
