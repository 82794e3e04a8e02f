#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "islanddb/topology.hpp"
#include "islanddb/update_log.hpp"

namespace islanddb {

// Physical target of one record field on the analytical side.
struct ShipLocation {
  std::uint32_t vault_group = 0;
  std::uint32_t vault = 0;
  std::uint64_t partition_offset = 0;  // position in the column's index space

  friend bool operator==(const ShipLocation&, const ShipLocation&) = default;
};

// Chained hash index from record key to analytical location. Offsets are
// allocated per table in first-insert order and never reused, so a row's
// position in every column of its table is identical and stable; the owning
// vault is derived from the offset's segment, exactly like task homing.
class TargetIndex {
 public:
  TargetIndex(const TopologyModel* topo, std::uint64_t expected_rows_per_table);

  void register_table(TableId table, std::uint32_t column_count);

  // Allocates the next offset of `table` for `row` and indexes every column's
  // key. No-op with the existing offset when the row is already known.
  std::uint64_t register_row(TableId table, RowId row);

  std::optional<ShipLocation> locate(const RecordKey& key) const;

  static std::uint64_t hash_key(const RecordKey& key);
  std::uint64_t bucket_of(const RecordKey& key) const { return hash_key(key) % bucket_count_; }
  std::uint64_t bucket_count() const { return bucket_count_; }

  std::uint64_t table_length(TableId table) const;
  RowId row_at_offset(TableId table, std::uint64_t offset) const;

 private:
  struct Entry {
    RecordKey key;
    std::uint64_t offset;
  };

  const TopologyModel* topo_;
  std::uint64_t bucket_count_;
  std::vector<std::vector<Entry>> buckets_;
  std::vector<std::uint32_t> column_counts_;          // per table
  std::vector<std::vector<RowId>> offset_to_row_;     // per table, offset -> row id
  std::vector<std::unordered_map<RowId, std::uint64_t>> row_to_offset_;
};

// Globally commit-ordered merge of one shipping round.
struct FinalLog {
  static constexpr std::size_t kCapacity = 1024;
  std::vector<UpdateLogEntry> entries;
};

// Merges the pending sections of all per-thread logs into one commit-ordered
// round. Only entries with commit_id <= safe_bound are taken (larger ids may
// still be mid-publication). At most `capacity` entries are merged, except
// that a commit's entries are never split across rounds: the round extends
// past capacity until the last taken commit is complete. Consumed positions
// are marked on the input logs.
FinalLog merge_logs(std::span<UpdateLog* const> logs, CommitId safe_bound,
                    std::size_t capacity = FinalLog::kCapacity);

// One column's slice of a round, in commit order.
struct ColumnUpdate {
  std::uint64_t offset = 0;
  UpdateKind kind = UpdateKind::Modify;
  Value payload = 0;
  CommitId commit_id = 0;
  SteadyTime commit_time{};
};

struct UpdateBatch {
  ColumnKey column;
  std::uint32_t vault_group = 0;  // group whose application worker consumes it
  std::vector<ColumnUpdate> updates;
};

struct RouteResult {
  std::vector<UpdateBatch> batches;  // ordered by first appearance in the round
  std::uint64_t orphan_updates = 0;  // modifies/deletes whose key was never registered
};

// Splits a round into per-column buffers: resolves each entry's location
// (registering insert targets on first sight), drops orphans, and groups by
// column while preserving commit order within each buffer.
RouteResult route_final_log(const FinalLog& final_log, TargetIndex& index,
                            const TopologyModel& topo);

// Ship when enough updates are pending or when anything pending has waited
// out the staleness budget.
bool shipping_trigger(std::uint64_t pending, SteadyTime now, SteadyTime last_ship,
                      std::uint64_t threshold, std::chrono::milliseconds staleness);

}  // namespace islanddb
