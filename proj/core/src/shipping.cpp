#include "islanddb/shipping.hpp"

#include <algorithm>
#include <bit>
#include <queue>

namespace islanddb {

TargetIndex::TargetIndex(const TopologyModel* topo, std::uint64_t expected_rows_per_table)
    : topo_(topo) {
  if (topo_ == nullptr) throw ContractError("target index needs a topology");
  // Bucket count scales with the column partition a key lands in; power of
  // two so the modulo stays cheap.
  bucket_count_ = std::bit_ceil(std::max<std::uint64_t>(64, expected_rows_per_table));
  buckets_.resize(bucket_count_);
}

void TargetIndex::register_table(TableId table, std::uint32_t column_count) {
  if (table != column_counts_.size()) {
    throw ContractError("tables must be registered densely in id order");
  }
  column_counts_.push_back(column_count);
  offset_to_row_.emplace_back();
  row_to_offset_.emplace_back();
}

std::uint64_t TargetIndex::register_row(TableId table, RowId row) {
  if (table >= column_counts_.size()) throw NotFoundError("table not registered");
  auto& rows = row_to_offset_[table];
  if (auto it = rows.find(row); it != rows.end()) return it->second;

  const std::uint64_t offset = offset_to_row_[table].size();
  offset_to_row_[table].push_back(row);
  rows.emplace(row, offset);

  const std::uint64_t segment = offset / topo_->segment_size();
  const std::uint32_t vault = topo_->segment_vault(table, segment);
  const ShipLocation loc{topo_->group_of_vault(vault), vault, offset};
  for (ColumnId c = 0; c < column_counts_[table]; ++c) {
    const RecordKey key{table, row, c};
    buckets_[bucket_of(key)].push_back({key, loc.partition_offset});
  }
  return offset;
}

std::optional<ShipLocation> TargetIndex::locate(const RecordKey& key) const {
  if (key.table >= column_counts_.size()) return std::nullopt;
  for (const Entry& e : buckets_[bucket_of(key)]) {
    if (e.key == key) {
      const std::uint64_t segment = e.offset / topo_->segment_size();
      const std::uint32_t vault = topo_->segment_vault(key.table, segment);
      return ShipLocation{topo_->group_of_vault(vault), vault, e.offset};
    }
  }
  return std::nullopt;
}

std::uint64_t TargetIndex::hash_key(const RecordKey& key) {
  return hash_combine(hash_combine(key.table, key.row), key.column);
}

std::uint64_t TargetIndex::table_length(TableId table) const {
  if (table >= offset_to_row_.size()) throw NotFoundError("table not registered");
  return offset_to_row_[table].size();
}

RowId TargetIndex::row_at_offset(TableId table, std::uint64_t offset) const {
  if (table >= offset_to_row_.size()) throw NotFoundError("table not registered");
  if (offset >= offset_to_row_[table].size()) throw NotFoundError("offset not allocated");
  return offset_to_row_[table][offset];
}

FinalLog merge_logs(std::span<UpdateLog* const> logs, CommitId safe_bound, std::size_t capacity) {
  struct Head {
    CommitId commit_id;
    std::size_t log_index;
  };
  const auto greater = [](const Head& a, const Head& b) {
    return a.commit_id > b.commit_id;  // ids are unique across logs
  };
  std::priority_queue<Head, std::vector<Head>, decltype(greater)> heads(greater);

  std::vector<UpdateLog::Cursor> cursors;
  std::vector<std::uint64_t> limits;
  cursors.reserve(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    cursors.push_back(logs[i]->cursor_at_consumed());
    limits.push_back(logs[i]->size());  // snapshot once; later appends wait for the next round
    if (cursors[i].position() < limits[i]) {
      const UpdateLogEntry& e = logs[i]->entry_at(cursors[i]);
      if (e.commit_id <= safe_bound) heads.push({e.commit_id, i});
    }
  }

  FinalLog out;
  while (!heads.empty()) {
    // A commit's entries are contiguous in one log, so draining the current
    // head until the commit id changes keeps commits whole.
    if (out.entries.size() >= capacity &&
        heads.top().commit_id != out.entries.back().commit_id) {
      break;
    }
    const std::size_t i = heads.top().log_index;
    heads.pop();
    UpdateLog& log = *logs[i];
    out.entries.push_back(log.entry_at(cursors[i]));
    log.advance(cursors[i]);
    if (cursors[i].position() < limits[i]) {
      const UpdateLogEntry& e = log.entry_at(cursors[i]);
      if (e.commit_id <= safe_bound) heads.push({e.commit_id, i});
    }
  }

  for (std::size_t i = 0; i < logs.size(); ++i) {
    logs[i]->mark_consumed(cursors[i].position());
  }
  return out;
}

RouteResult route_final_log(const FinalLog& final_log, TargetIndex& index,
                            const TopologyModel& topo) {
  RouteResult out;
  std::unordered_map<ColumnKey, std::size_t> batch_of;
  for (const UpdateLogEntry& e : final_log.entries) {
    std::optional<ShipLocation> loc;
    if (e.kind == UpdateKind::Insert) {
      index.register_row(e.key.table, e.key.row);
      loc = index.locate(e.key);
    } else {
      loc = index.locate(e.key);
      if (!loc) {
        // The key was never shipped an insert (e.g. the row predates the
        // analytical replica and was dropped, or upstream skipped it); the
        // update has no target and is counted instead of applied.
        out.orphan_updates++;
        continue;
      }
    }

    const ColumnKey col{e.key.table, e.key.column};
    auto [it, inserted] = batch_of.try_emplace(col, out.batches.size());
    if (inserted) {
      UpdateBatch b;
      b.column = col;
      b.vault_group = topo.home_group(col.table);
      out.batches.push_back(std::move(b));
    }
    out.batches[it->second].updates.push_back(
        {loc->partition_offset, e.kind, e.payload, e.commit_id, e.commit_time});
  }
  return out;
}

bool shipping_trigger(std::uint64_t pending, SteadyTime now, SteadyTime last_ship,
                      std::uint64_t threshold, std::chrono::milliseconds staleness) {
  if (pending == 0) return false;
  if (pending >= threshold) return true;
  return now - last_ship >= staleness;
}

}  // namespace islanddb
