#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "islanddb/txn_engine.hpp"

namespace islanddb {

// Newest-first per-field version chain. Entries are immutable once linked;
// the head pointer is the only mutable cell. Visibility rule: the newest
// entry with begin <= cutoff wins; a tombstone there means the field (and
// with it the row) is absent at that cutoff.
struct VersionChainEntry {
  CommitId begin = 0;
  Value value = 0;
  bool tombstone = false;
  VersionChainEntry* next = nullptr;  // next older
};

// Single-instance MVCC bookkeeping for the si-mvcc baseline: every committed
// write appends a chain entry while the writer still holds its table lock
// (via WriteHook), so chain order matches commit order. Analytical reads
// traverse from the head and pay one step per examined entry; the traversal
// counter is the measurable cost of reading consistent-but-old data in place.
class MvccStore : public WriteHook {
 public:
  MvccStore() = default;
  ~MvccStore() override;
  MvccStore(const MvccStore&) = delete;
  MvccStore& operator=(const MvccStore&) = delete;

  void register_table(TableId table, std::uint32_t column_count);

  // Baseline row (commit id 0); used for bulk load before transactions run.
  void load_row(TableId table, RowId row, const std::vector<Value>& tuple);

  void on_insert(CommitId id, TableId table, RowId row, const std::vector<Value>& tuple) override;
  void on_modify(CommitId id, TableId table, RowId row, ColumnId column, Value value) override;
  void on_delete(CommitId id, TableId table, RowId row,
                 const std::vector<Value>& last_tuple) override;

  // Newest value with begin <= cutoff; nullopt when the field is absent
  // (never written or tombstoned) at that cutoff.
  std::optional<Value> read(TableId table, RowId row, ColumnId column, CommitId cutoff) const;

  // Rows visible at `cutoff` in ascending row-id order, with the requested
  // columns materialized. One chain traversal per (row, column) pair.
  struct TableScan {
    std::vector<RowId> rows;
    std::vector<std::vector<Value>> columns;  // columns[i] parallel to rows
  };
  TableScan scan(TableId table, const std::vector<ColumnId>& columns, CommitId cutoff) const;

  std::uint64_t traversal_steps() const { return steps_.load(); }
  std::uint64_t traversal_reads() const { return reads_.load(); }
  std::size_t chain_length(TableId table, RowId row, ColumnId column) const;

 private:
  struct RowChains {
    std::vector<std::atomic<VersionChainEntry*>> cells;
    explicit RowChains(std::size_t n) : cells(n) {}
  };
  struct Table {
    std::uint32_t column_count = 0;
    // Writers inserting new rows take the mutex exclusively; value appends
    // and readers share it. Ordered map gives deterministic scan order.
    mutable std::shared_mutex mutex;
    std::map<RowId, std::unique_ptr<RowChains>> rows;
  };

  const VersionChainEntry* visible(const VersionChainEntry* head, CommitId cutoff) const;
  void append(Table& t, RowId row, ColumnId column, VersionChainEntry* entry);

  std::vector<std::unique_ptr<Table>> tables_;
  mutable std::atomic<std::uint64_t> steps_{0};
  mutable std::atomic<std::uint64_t> reads_{0};
};

}  // namespace islanddb
