#pragma once

#include <cstdint>
#include <vector>

#include "islanddb/types.hpp"

namespace islanddb {

// Fixed-width codes packed little-endian into 64-bit words: code i occupies
// bits [i*width, (i+1)*width) of the word stream and may straddle a word
// boundary. Width is fixed at construction; growing a dictionary past its
// width budget requires re-encoding into a fresh vector.
class PackedCodeVector {
 public:
  static constexpr std::uint32_t kMaxWidthBits = 32;

  PackedCodeVector() = default;
  explicit PackedCodeVector(std::uint32_t width_bits, std::uint64_t size = 0);

  std::uint32_t width_bits() const { return width_; }
  std::uint64_t size() const { return size_; }
  std::uint64_t packed_bytes() const { return words_.size() * sizeof(std::uint64_t); }

  std::uint32_t get(std::uint64_t i) const;
  void set(std::uint64_t i, std::uint32_t code);
  void push_back(std::uint32_t code);

  bool operator==(const PackedCodeVector& other) const = default;

 private:
  std::uint64_t mask() const { return width_ == 64 ? ~0ULL : (1ULL << width_) - 1; }

  std::vector<std::uint64_t> words_;
  std::uint32_t width_ = 1;
  std::uint64_t size_ = 0;
};

class Bitmap {
 public:
  Bitmap() = default;
  explicit Bitmap(std::uint64_t size, bool value = false);

  std::uint64_t size() const { return size_; }
  std::uint64_t byte_size() const { return words_.size() * sizeof(std::uint64_t); }

  bool get(std::uint64_t i) const;
  void set(std::uint64_t i, bool value);
  void push_back(bool value);
  std::uint64_t count_set() const;

  bool operator==(const Bitmap& other) const = default;

 private:
  std::vector<std::uint64_t> words_;
  std::uint64_t size_ = 0;
};

}  // namespace islanddb
