#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pgr {

// Adaptive probability of a zero bit, 11-bit fixed point, starting at 1/2.
struct AdaptiveBitModel {
  static constexpr std::uint32_t kBits = 11;
  static constexpr std::uint32_t kOne = 1u << kBits;
  static constexpr std::uint32_t kAdaptShift = 5;

  std::uint16_t p0 = kOne / 2;

  void update(bool bit) {
    if (bit) {
      p0 = static_cast<std::uint16_t>(p0 - (p0 >> kAdaptShift));
    } else {
      p0 = static_cast<std::uint16_t>(p0 + ((kOne - p0) >> kAdaptShift));
    }
  }
};

/// Binary arithmetic (range) encoder with carry propagation.
class BinaryArithmeticEncoder {
 public:
  void encode(bool bit, AdaptiveBitModel& model);
  // Flushes pending state; the encoder must not be used afterwards.
  std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
};

/// Mirror of BinaryArithmeticEncoder. Reading past the end yields zero bytes;
/// corruption is detected by the container checksum, not here.
class BinaryArithmeticDecoder {
 public:
  explicit BinaryArithmeticDecoder(std::span<const std::uint8_t> data);

  bool decode(AdaptiveBitModel& model);
  bool overran() const noexcept { return pos_ > data_.size() + 4; }

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

}  // namespace pgr
