#include "pgr/arithmetic_coder.hpp"

namespace pgr {

namespace {
constexpr std::uint32_t kTop = 1u << 24;
}

void BinaryArithmeticEncoder::encode(bool bit, AdaptiveBitModel& model) {
  const std::uint32_t bound = (range_ >> AdaptiveBitModel::kBits) * model.p0;
  if (!bit) {
    range_ = bound;
  } else {
    low_ += bound;
    range_ -= bound;
  }
  model.update(bit);
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void BinaryArithmeticEncoder::shift_low() {
  if (low_ < 0xFF000000ULL || low_ > 0xFFFFFFFFULL) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t byte = cache_;
    do {
      out_.push_back(static_cast<std::uint8_t>(byte + carry));
      byte = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFULL) << 8;
}

std::vector<std::uint8_t> BinaryArithmeticEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

BinaryArithmeticDecoder::BinaryArithmeticDecoder(std::span<const std::uint8_t> data)
    : data_(data) {
  for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t BinaryArithmeticDecoder::next_byte() {
  const std::uint8_t b = pos_ < data_.size() ? data_[pos_] : 0;
  ++pos_;
  return b;
}

bool BinaryArithmeticDecoder::decode(AdaptiveBitModel& model) {
  const std::uint32_t bound = (range_ >> AdaptiveBitModel::kBits) * model.p0;
  bool bit;
  if (code_ < bound) {
    range_ = bound;
    bit = false;
  } else {
    code_ -= bound;
    range_ -= bound;
    bit = true;
  }
  model.update(bit);
  while (range_ < kTop) {
    range_ <<= 8;
    code_ = (code_ << 8) | next_byte();
  }
  return bit;
}

}  // namespace pgr
