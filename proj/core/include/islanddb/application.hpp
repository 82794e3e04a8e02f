#pragma once

#include <memory>

#include "islanddb/column.hpp"
#include "islanddb/shipping.hpp"

namespace islanddb {

// Random accesses into dictionary structures (value reads, merge comparisons,
// remap and hash-index hits, binary-search probes). The two application paths
// are separable by this counter: the merge-based path stays linear in
// column size + batch size, the rebuild path pays a log factor per entry.
struct ApplyCounters {
  std::uint64_t dict_lookups = 0;
  std::uint64_t merge_comparisons = 0;

  void reset() { *this = {}; }
};

inline constexpr std::uint32_t kInvalidCode = 0xffffffffu;

// Order-preserving code translation between two dictionaries. Codes mapped to
// kInvalidCode were dropped from the new dictionary; the producer guarantees
// no surviving slot still references them.
struct RemapIndex {
  std::vector<std::uint32_t> old_to_new;

  std::uint32_t at(std::uint32_t old_code) const {
    if (old_code >= old_to_new.size()) throw CorruptionError("remap code out of range");
    return old_to_new[old_code];
  }
};

struct DictionaryMerge {
  Dictionary merged;
  RemapIndex old_remap;                       // old code -> new code
  std::vector<std::uint32_t> update_remap;    // update-dictionary code -> new code
  std::uint64_t comparisons = 0;              // bounded by |old| + |update|
};

// Sorted distinct payload values of the batch's insert/modify entries.
Dictionary build_update_dictionary(const UpdateBatch& batch);

// Linear two-pointer merge of two sorted dictionaries; keeps every old value.
DictionaryMerge merge_dictionaries(const Dictionary& old_dict, const Dictionary& update_dict);

// Merge-based application: stages the batch (last write per offset wins),
// builds the update dictionary, merges it with the still-referenced part of
// the old dictionary, then re-encodes by translating codes through the remap.
// Never decodes untouched entries and never searches the old column, so its
// lookup counter is O(n + m).
std::shared_ptr<const ColumnVersion> apply_batch(const ColumnVersion& base,
                                                 const UpdateBatch& batch,
                                                 std::uint64_t new_version_id,
                                                 double dict_rebuild_factor,
                                                 ApplyCounters& counters);

// Rebuild-based application: decodes the whole column, applies updates to the
// decoded values, sorts the updated column into a fresh dictionary, and
// re-encodes every slot by binary search. Output is byte-identical to
// apply_batch; its lookup counter is Theta((n + m) log(n + m)) on shuffled
// inputs. Serves both as the equivalence oracle and as the application path
// of the naive multiple-instance engine mode.
std::shared_ptr<const ColumnVersion> naive_apply(const ColumnVersion& base,
                                                 const UpdateBatch& batch,
                                                 std::uint64_t new_version_id,
                                                 double dict_rebuild_factor,
                                                 ApplyCounters& counters);

}  // namespace islanddb
