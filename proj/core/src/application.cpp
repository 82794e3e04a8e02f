#include "islanddb/application.hpp"

#include <algorithm>
#include <unordered_map>

namespace islanddb {

namespace {

// Net effect of a batch on one offset after last-write-wins collapsing.
// Deleted slots keep their last value (the dictionary retains it until the
// rebuild threshold trips), so a delete only overrides liveness.
struct StagedSlot {
  Value value = 0;
  bool has_value = false;
  bool has_live_override = false;
  bool live = false;
};

struct StagedBatch {
  std::unordered_map<std::uint64_t, StagedSlot> slots;
  std::uint64_t new_length = 0;
  CommitId last_commit = 0;
};

StagedBatch stage_batch(std::uint64_t old_length, const UpdateBatch& batch) {
  StagedBatch staged;
  staged.new_length = old_length;
  std::uint64_t prev_commit = 0;
  for (const ColumnUpdate& u : batch.updates) {
    if (u.commit_id < prev_commit) {
      throw CorruptionError("update batch is not commit-ordered");
    }
    prev_commit = u.commit_id;
    staged.last_commit = u.commit_id;
    switch (u.kind) {
      case UpdateKind::Insert: {
        if (u.offset != staged.new_length) {
          throw CorruptionError("insert offset is not the next free slot");
        }
        StagedSlot& s = staged.slots[u.offset];
        s.value = u.payload;
        s.has_value = true;
        s.has_live_override = true;
        s.live = true;
        staged.new_length++;
        break;
      }
      case UpdateKind::Modify: {
        if (u.offset >= staged.new_length) {
          throw CorruptionError("modify offset out of range");
        }
        StagedSlot& s = staged.slots[u.offset];
        s.value = u.payload;
        s.has_value = true;
        break;
      }
      case UpdateKind::Delete: {
        if (u.offset >= staged.new_length) {
          throw CorruptionError("delete offset out of range");
        }
        StagedSlot& s = staged.slots[u.offset];
        s.has_live_override = true;
        s.live = false;
        break;
      }
    }
  }
  return staged;
}

// Two-pointer merge; old values are kept only while `old_usage[code] > 0`
// (pass nullptr to keep everything). Comparison count is bounded by
// |old| + |update| because every comparison advances at least one pointer.
DictionaryMerge merge_core(const Dictionary& old_dict, const std::uint32_t* old_usage,
                           const Dictionary& update_dict) {
  DictionaryMerge out;
  const auto& ov = old_dict.values();
  const auto& uv = update_dict.values();
  out.old_remap.old_to_new.assign(ov.size(), kInvalidCode);
  out.update_remap.assign(uv.size(), kInvalidCode);

  std::vector<Value> merged;
  merged.reserve(ov.size() + uv.size());
  std::size_t i = 0, j = 0;
  while (i < ov.size() || j < uv.size()) {
    const bool old_live = i < ov.size() && (old_usage == nullptr || old_usage[i] > 0);
    if (i < ov.size() && !old_live) {
      ++i;
      continue;
    }
    if (i < ov.size() && j < uv.size()) {
      out.comparisons++;
      if (ov[i] < uv[j]) {
        out.old_remap.old_to_new[i] = static_cast<std::uint32_t>(merged.size());
        merged.push_back(ov[i]);
        ++i;
      } else if (uv[j] < ov[i]) {
        out.update_remap[j] = static_cast<std::uint32_t>(merged.size());
        merged.push_back(uv[j]);
        ++j;
      } else {
        const auto code = static_cast<std::uint32_t>(merged.size());
        out.old_remap.old_to_new[i] = code;
        out.update_remap[j] = code;
        merged.push_back(ov[i]);
        ++i;
        ++j;
      }
    } else if (i < ov.size()) {
      out.old_remap.old_to_new[i] = static_cast<std::uint32_t>(merged.size());
      merged.push_back(ov[i]);
      ++i;
    } else {
      out.update_remap[j] = static_cast<std::uint32_t>(merged.size());
      merged.push_back(uv[j]);
      ++j;
    }
  }
  out.merged = Dictionary::from_sorted_unique(std::move(merged));
  return out;
}

std::shared_ptr<ColumnVersion> clone_base(const ColumnVersion& base, std::uint64_t version_id) {
  auto v = std::make_shared<ColumnVersion>();
  v->version_id = version_id;
  v->created_at = base.created_at;
  v->dictionary = base.dictionary;
  v->column = base.column;
  v->code_usage = base.code_usage;
  return v;
}

// Shrinks the dictionary back to the live value set once stale entries
// outnumber it by the configured factor. Runs identically in both application
// paths so their outputs stay byte-identical. The rebuilt form is canonical:
// dead slots drop their retained value and return to code 0.
void maybe_compact(ColumnVersion& v, double rebuild_factor, ApplyCounters& counters) {
  if (rebuild_factor <= 0) return;
  std::vector<bool> live_code(v.dictionary->size(), false);
  std::uint64_t live_distinct = 0;
  for (std::uint64_t i = 0; i < v.column.size(); ++i) {
    if (!v.column.validity.get(i)) continue;
    const std::uint32_t c = v.column.codes.get(i);
    if (!live_code[c]) {
      live_code[c] = true;
      ++live_distinct;
    }
  }
  if (static_cast<double>(v.dictionary->size()) <=
      rebuild_factor * static_cast<double>(std::max<std::uint64_t>(1, live_distinct))) {
    return;
  }

  std::vector<Value> values;
  values.reserve(v.column.size());
  for (std::uint64_t i = 0; i < v.column.size(); ++i) {
    counters.dict_lookups++;
    values.push_back(v.dictionary->value_at(v.column.codes.get(i)));
  }
  auto enc = encode_column(values, &v.column.validity);
  counters.dict_lookups += v.column.size();  // re-encode lookups
  v.dictionary = std::make_shared<const Dictionary>(std::move(enc.dictionary));
  v.column = std::move(enc.column);
  v.code_usage = std::move(enc.code_usage);
}

}  // namespace

Dictionary build_update_dictionary(const UpdateBatch& batch) {
  std::vector<Value> payloads;
  payloads.reserve(batch.updates.size());
  for (const ColumnUpdate& u : batch.updates) {
    if (u.kind != UpdateKind::Delete) payloads.push_back(u.payload);
  }
  return Dictionary::build(payloads);
}

DictionaryMerge merge_dictionaries(const Dictionary& old_dict, const Dictionary& update_dict) {
  return merge_core(old_dict, nullptr, update_dict);
}

std::shared_ptr<const ColumnVersion> apply_batch(const ColumnVersion& base,
                                                 const UpdateBatch& batch,
                                                 std::uint64_t new_version_id,
                                                 double dict_rebuild_factor,
                                                 ApplyCounters& counters) {
  const std::uint64_t old_n = base.column.size();
  StagedBatch staged = stage_batch(old_n, batch);
  if (staged.slots.empty()) return clone_base(base, new_version_id);

  // Stage 1: sorted dictionary of the final staged values plus a hash index
  // value -> update code, so re-encoding a touched slot costs one lookup.
  std::vector<Value> staged_values;
  staged_values.reserve(staged.slots.size());
  for (const auto& [offset, slot] : staged.slots) {
    if (slot.has_value) staged_values.push_back(slot.value);
  }
  const Dictionary update_dict = Dictionary::build(staged_values);
  std::unordered_map<Value, std::uint32_t> update_code_of;
  update_code_of.reserve(update_dict.size());
  for (std::uint32_t c = 0; c < update_dict.size(); ++c) {
    update_code_of.emplace(update_dict.value_at(c), c);
    counters.dict_lookups++;
  }

  // Replaced slots release their old code; values nothing references anymore
  // drop out of the merge below.
  std::vector<std::uint32_t> usage = base.code_usage;
  for (const auto& [offset, slot] : staged.slots) {
    if (slot.has_value && offset < old_n) {
      usage[base.column.codes.get(offset)]--;
    }
  }

  DictionaryMerge merge = merge_core(*base.dictionary, usage.data(), update_dict);
  counters.merge_comparisons += merge.comparisons;
  counters.dict_lookups += merge.comparisons;

  // Stage 2: translate every slot through the remaps; no binary search over
  // the old column anywhere.
  auto v = std::make_shared<ColumnVersion>();
  v->version_id = new_version_id;
  v->created_at = std::max(base.created_at, staged.last_commit);
  v->column.codes = PackedCodeVector(merge.merged.code_width_bits());
  v->code_usage.assign(merge.merged.size(), 0);
  for (std::uint64_t o = 0; o < staged.new_length; ++o) {
    std::uint32_t code;
    bool live;
    auto it = staged.slots.find(o);
    if (it == staged.slots.end()) {
      code = merge.old_remap.at(base.column.codes.get(o));
      live = base.column.validity.get(o);
      counters.dict_lookups++;
    } else {
      const StagedSlot& s = it->second;
      if (s.has_value) {
        code = merge.update_remap[update_code_of.find(s.value)->second];
        counters.dict_lookups++;
      } else {
        code = merge.old_remap.at(base.column.codes.get(o));
        counters.dict_lookups++;
      }
      live = s.has_live_override ? s.live
                                 : (o < old_n ? base.column.validity.get(o) : true);
    }
    if (code == kInvalidCode) throw CorruptionError("slot references a dropped code");
    v->column.codes.push_back(code);
    v->column.validity.push_back(live);
    v->code_usage[code]++;
  }
  v->dictionary = std::make_shared<const Dictionary>(std::move(merge.merged));

  maybe_compact(*v, dict_rebuild_factor, counters);
  return v;
}

std::shared_ptr<const ColumnVersion> naive_apply(const ColumnVersion& base,
                                                 const UpdateBatch& batch,
                                                 std::uint64_t new_version_id,
                                                 double dict_rebuild_factor,
                                                 ApplyCounters& counters) {
  const std::uint64_t old_n = base.column.size();
  StagedBatch staged = stage_batch(old_n, batch);
  if (staged.slots.empty()) return clone_base(base, new_version_id);

  // Decompress: one dictionary access per existing entry.
  std::vector<Value> values;
  values.reserve(staged.new_length);
  Bitmap validity;
  for (std::uint64_t o = 0; o < old_n; ++o) {
    counters.dict_lookups++;
    values.push_back(base.dictionary->value_at(base.column.codes.get(o)));
    validity.push_back(base.column.validity.get(o));
  }

  // Apply the staged updates to the decoded column.
  for (std::uint64_t o = old_n; o < staged.new_length; ++o) {
    values.push_back(0);
    validity.push_back(false);
  }
  for (const auto& [offset, slot] : staged.slots) {
    if (slot.has_value) values[offset] = slot.value;
    if (slot.has_live_override) validity.set(offset, slot.live);
  }

  // Rebuild the dictionary by sorting the updated column (deleted slots keep
  // their value and stay in the sort), then recompress every slot through a
  // counted binary search.
  const Dictionary dict = Dictionary::build(values);
  const auto search = [&](Value v) {
    const auto& dv = dict.values();
    std::size_t lo = 0, hi = dv.size();
    while (lo < hi) {
      counters.dict_lookups++;
      const std::size_t mid = (lo + hi) / 2;
      if (dv[mid] < v) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return static_cast<std::uint32_t>(lo);
  };

  auto v = std::make_shared<ColumnVersion>();
  v->version_id = new_version_id;
  v->created_at = std::max(base.created_at, staged.last_commit);
  v->column.codes = PackedCodeVector(dict.code_width_bits());
  v->code_usage.assign(dict.size(), 0);
  for (std::uint64_t o = 0; o < staged.new_length; ++o) {
    const std::uint32_t code = search(values[o]);
    v->column.codes.push_back(code);
    v->column.validity.push_back(validity.get(o));
    v->code_usage[code]++;
  }
  v->dictionary = std::make_shared<const Dictionary>(dict);

  maybe_compact(*v, dict_rebuild_factor, counters);
  return v;
}

}  // namespace islanddb
