#include "islanddb/bitpack.hpp"

#include <bit>

namespace islanddb {

PackedCodeVector::PackedCodeVector(std::uint32_t width_bits, std::uint64_t size)
    : width_(width_bits), size_(size) {
  if (width_bits == 0 || width_bits > kMaxWidthBits) {
    throw ContractError("code width must be in [1, 32] bits");
  }
  words_.resize((size * width_ + 63) / 64, 0);
}

std::uint32_t PackedCodeVector::get(std::uint64_t i) const {
  if (i >= size_) throw ContractError("packed code index out of range");
  const std::uint64_t bit = i * width_;
  const std::uint64_t word = bit / 64;
  const std::uint32_t shift = static_cast<std::uint32_t>(bit % 64);
  std::uint64_t v = words_[word] >> shift;
  if (shift + width_ > 64) {
    v |= words_[word + 1] << (64 - shift);
  }
  return static_cast<std::uint32_t>(v & mask());
}

void PackedCodeVector::set(std::uint64_t i, std::uint32_t code) {
  if (i >= size_) throw ContractError("packed code index out of range");
  if ((code & ~mask()) != 0) throw ContractError("code does not fit the configured width");
  const std::uint64_t bit = i * width_;
  const std::uint64_t word = bit / 64;
  const std::uint32_t shift = static_cast<std::uint32_t>(bit % 64);
  words_[word] = (words_[word] & ~(mask() << shift)) | (std::uint64_t{code} << shift);
  if (shift + width_ > 64) {
    const std::uint32_t spill = shift + width_ - 64;
    const std::uint64_t hi_mask = (1ULL << spill) - 1;
    words_[word + 1] = (words_[word + 1] & ~hi_mask) | (std::uint64_t{code} >> (64 - shift));
  }
}

void PackedCodeVector::push_back(std::uint32_t code) {
  const std::uint64_t needed_bits = (size_ + 1) * width_;
  if (needed_bits > words_.size() * 64) words_.push_back(0);
  ++size_;
  set(size_ - 1, code);
}

Bitmap::Bitmap(std::uint64_t size, bool value) : size_(size) {
  words_.resize((size + 63) / 64, value ? ~0ULL : 0);
  if (value && size % 64 != 0 && !words_.empty()) {
    words_.back() = (1ULL << (size % 64)) - 1;
  }
}

bool Bitmap::get(std::uint64_t i) const {
  if (i >= size_) throw ContractError("bitmap index out of range");
  return (words_[i / 64] >> (i % 64)) & 1;
}

void Bitmap::set(std::uint64_t i, bool value) {
  if (i >= size_) throw ContractError("bitmap index out of range");
  if (value) {
    words_[i / 64] |= 1ULL << (i % 64);
  } else {
    words_[i / 64] &= ~(1ULL << (i % 64));
  }
}

void Bitmap::push_back(bool value) {
  if (size_ % 64 == 0) words_.push_back(0);
  ++size_;
  set(size_ - 1, value);
}

std::uint64_t Bitmap::count_set() const {
  std::uint64_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

}  // namespace islanddb
