#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "islanddb/bitpack.hpp"
#include "islanddb/types.hpp"

namespace islanddb {

// Order-preserving dictionary: values are sorted and strictly distinct, so
// code order equals value order and range predicates can be evaluated on
// codes directly.
class Dictionary {
 public:
  Dictionary() = default;

  static Dictionary from_sorted_unique(std::vector<Value> values);
  static Dictionary build(std::span<const Value> values);

  // max(1, ceil(log2(size))); one bit minimum so a single-value column still
  // has a defined layout.
  static std::uint32_t width_for(std::uint64_t dictionary_size);

  std::uint32_t size() const { return static_cast<std::uint32_t>(values_.size()); }
  std::uint32_t code_width_bits() const { return width_for(values_.size()); }
  std::uint64_t byte_size() const { return values_.size() * sizeof(Value); }
  const std::vector<Value>& values() const { return values_; }

  Value value_at(std::uint32_t code) const {
    if (code >= values_.size()) throw CorruptionError("dictionary code out of range");
    return values_[code];
  }

  // Exact lookup; nullopt when absent.
  std::optional<std::uint32_t> code_of(Value v) const;
  // First code whose value is >= v (== size() when none).
  std::uint32_t lower_bound_code(Value v) const;

  bool operator==(const Dictionary& other) const = default;

 private:
  std::vector<Value> values_;
};

// Bit-packed codes plus a validity bitmap. Deleted positions keep their slot
// (and their last code) so positions stay stable for update routing; validity
// alone decides whether a read sees the slot.
struct EncodedColumn {
  PackedCodeVector codes;
  Bitmap validity;

  std::uint64_t size() const { return codes.size(); }
  std::uint64_t packed_bytes() const { return codes.packed_bytes() + validity.byte_size(); }

  bool operator==(const EncodedColumn& other) const = default;
};

// One immutable state of a column. Publication swaps a shared_ptr to one of
// these; nothing inside is ever mutated afterwards, so readers that hold the
// pointer never see a partial state.
struct ColumnVersion {
  std::uint64_t version_id = 0;
  // Largest commit id whose effects are contained in this version; 0 for the
  // initially loaded state.
  CommitId created_at = 0;
  std::shared_ptr<const Dictionary> dictionary;
  EncodedColumn column;
  // Slots (live or deleted) currently holding each code. Maintained so update
  // application can drop values no slot references anymore without rescanning.
  std::vector<std::uint32_t> code_usage;

  std::uint64_t content_checksum() const;
};

struct EncodeResult {
  Dictionary dictionary;
  EncodedColumn column;
  std::vector<std::uint32_t> code_usage;
};

// Builds the dictionary from live values only; dead positions get code 0 and
// validity 0 (their input value is a don't-care).
EncodeResult encode_column(std::span<const Value> values, const Bitmap* validity = nullptr);

// dict[code] for every slot, dead or live. The exact inverse of encode on
// live positions; dead slots yield whatever value their retained code names.
std::vector<Value> decode_column(const Dictionary& dict, const EncodedColumn& column);

std::shared_ptr<const ColumnVersion> make_column_version(std::uint64_t version_id,
                                                         CommitId created_at,
                                                         std::span<const Value> values,
                                                         const Bitmap* validity = nullptr);

}  // namespace islanddb
