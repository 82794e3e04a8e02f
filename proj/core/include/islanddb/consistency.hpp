#pragma once

#include <deque>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "islanddb/column.hpp"

namespace islanddb {

// Pinned, mutually consistent set of column versions for one query. All pins
// are taken at a single cutoff commit id; reads through the snapshot touch
// only immutable data and need no locks.
struct QuerySnapshot {
  struct Pin {
    ColumnKey column;
    std::shared_ptr<const ColumnVersion> version;
    std::uint64_t chain_entry_id = 0;
  };

  std::uint64_t query_id = 0;
  CommitId cutoff = 0;
  std::vector<Pin> pins;
  bool released = false;

  const ColumnVersion& version_of(const ColumnKey& column) const {
    for (const Pin& p : pins) {
      if (p.column == column) return *p.version;
    }
    throw NotFoundError("column is not pinned by this snapshot");
  }
};

// Column-granularity lazy snapshotting over immutable column versions.
//
// Writes land as whole new versions via publish_round; each column then
// carries a dirty flag. A query creates a snapshot-chain entry for a column
// only if the column is dirty and the chain head does not already reflect the
// main replica; otherwise it shares the existing head. Chain entries are
// refcounted, and any non-head entry is deleted as soon as its last query
// releases it. The head survives at refcount zero so the next clean query
// can share it.
//
// Rounds publish every column they touched inside one critical section and
// then advance the frontier: the largest commit id whose effects are fully
// applied on the analytical side. Acquire reads the frontier as the query
// cutoff under the same mutex, so a pinned set always equals a replay of the
// update log through its cutoff. Scans never hold the mutex, so publication
// never waits on running queries.
class SnapshotManager {
 public:
  void register_column(const ColumnKey& column, std::shared_ptr<const ColumnVersion> initial);
  bool has_column(const ColumnKey& column) const;

  std::shared_ptr<const ColumnVersion> main_version(const ColumnKey& column) const;
  bool dirty(const ColumnKey& column) const;
  CommitId frontier() const;

  // Swaps one column's main replica and marks it dirty. Does not advance the
  // frontier; use publish_round for frontier-coupled publication.
  void publish(const ColumnKey& column, std::shared_ptr<const ColumnVersion> version);

  // Atomically publishes every column a shipping round touched and advances
  // the frontier to the round's last commit id.
  void publish_round(
      const std::vector<std::pair<ColumnKey, std::shared_ptr<const ColumnVersion>>>& versions,
      CommitId new_frontier);

  QuerySnapshot acquire(const std::vector<ColumnKey>& columns);
  void release(QuerySnapshot& snapshot);

  // Decoded read through a pinned version; NotFound for dead or out-of-range
  // offsets.
  Value read_snapshot(const QuerySnapshot& snapshot, const ColumnKey& column,
                      std::uint64_t offset) const;

  // Introspection for tests and counters.
  std::size_t chain_length(const ColumnKey& column) const;
  std::uint32_t head_refcount(const ColumnKey& column) const;
  std::uint64_t snapshots_created() const;
  std::uint64_t snapshots_shared() const;

 private:
  struct ChainEntry {
    std::shared_ptr<const ColumnVersion> version;
    std::uint64_t entry_id = 0;
    std::uint32_t refcount = 0;
  };

  struct ColumnState {
    std::shared_ptr<const ColumnVersion> main;
    bool dirty = false;
    std::deque<ChainEntry> chain;  // front = head = newest
  };

  ColumnState& state_of(const ColumnKey& column);
  const ColumnState& state_of(const ColumnKey& column) const;

  mutable std::mutex mutex_;
  std::unordered_map<ColumnKey, ColumnState> columns_;
  CommitId frontier_ = 0;
  std::uint64_t next_query_id_ = 1;
  std::uint64_t next_entry_id_ = 1;
  std::uint64_t snapshots_created_ = 0;
  std::uint64_t snapshots_shared_ = 0;
};

}  // namespace islanddb
