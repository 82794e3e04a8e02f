#include "islanddb/column.hpp"

#include <algorithm>
#include <bit>

namespace islanddb {

Dictionary Dictionary::from_sorted_unique(std::vector<Value> values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i - 1] >= values[i]) {
      throw ContractError("dictionary values must be sorted and distinct");
    }
  }
  Dictionary d;
  d.values_ = std::move(values);
  return d;
}

Dictionary Dictionary::build(std::span<const Value> values) {
  std::vector<Value> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  Dictionary d;
  d.values_ = std::move(v);
  return d;
}

std::uint32_t Dictionary::width_for(std::uint64_t dictionary_size) {
  if (dictionary_size <= 1) return 1;
  return std::bit_width(dictionary_size - 1);
}

std::optional<std::uint32_t> Dictionary::code_of(Value v) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), v);
  if (it == values_.end() || *it != v) return std::nullopt;
  return static_cast<std::uint32_t>(it - values_.begin());
}

std::uint32_t Dictionary::lower_bound_code(Value v) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), v);
  return static_cast<std::uint32_t>(it - values_.begin());
}

std::uint64_t ColumnVersion::content_checksum() const {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (Value v : dictionary->values()) h = hash_combine(h, static_cast<std::uint64_t>(v));
  for (std::uint64_t i = 0; i < column.size(); ++i) {
    h = hash_combine(h, column.codes.get(i));
    h = hash_combine(h, column.validity.get(i) ? 1 : 0);
  }
  return h;
}

EncodeResult encode_column(std::span<const Value> values, const Bitmap* validity) {
  if (validity && validity->size() != values.size()) {
    throw ContractError("validity bitmap size must match value count");
  }
  std::vector<Value> live;
  live.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!validity || validity->get(i)) live.push_back(values[i]);
  }
  // An all-dead or empty column still needs one dictionary slot for code 0.
  if (live.empty()) live.push_back(0);

  EncodeResult r;
  r.dictionary = Dictionary::build(live);
  r.column.codes = PackedCodeVector(r.dictionary.code_width_bits());
  r.code_usage.assign(r.dictionary.size(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool is_live = !validity || validity->get(i);
    std::uint32_t code = 0;
    if (is_live) {
      auto c = r.dictionary.code_of(values[i]);
      if (!c) throw CorruptionError("live value missing from freshly built dictionary");
      code = *c;
    }
    r.column.codes.push_back(code);
    r.column.validity.push_back(is_live);
    r.code_usage[code]++;
  }
  return r;
}

std::vector<Value> decode_column(const Dictionary& dict, const EncodedColumn& column) {
  std::vector<Value> out;
  out.reserve(column.size());
  for (std::uint64_t i = 0; i < column.size(); ++i) {
    out.push_back(dict.value_at(column.codes.get(i)));
  }
  return out;
}

std::shared_ptr<const ColumnVersion> make_column_version(std::uint64_t version_id,
                                                         CommitId created_at,
                                                         std::span<const Value> values,
                                                         const Bitmap* validity) {
  auto enc = encode_column(values, validity);
  auto v = std::make_shared<ColumnVersion>();
  v->version_id = version_id;
  v->created_at = created_at;
  v->dictionary = std::make_shared<const Dictionary>(std::move(enc.dictionary));
  v->column = std::move(enc.column);
  v->code_usage = std::move(enc.code_usage);
  return v;
}

}  // namespace islanddb
