#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "islanddb/commit_clock.hpp"
#include "islanddb/row_store.hpp"
#include "islanddb/update_log.hpp"

namespace islanddb {

enum class TxnOpKind : std::uint8_t {
  Read,    // read one field
  Insert,  // insert a full tuple
  Delete,  // delete a row
  Modify,  // set one field to an absolute value
  Add,     // add a delta to one field (read-modify-write under the table lock)
};

struct TxnOp {
  TxnOpKind kind = TxnOpKind::Read;
  TableId table = 0;
  RowId row = 0;
  ColumnId column = 0;
  Value value = 0;
  std::vector<Value> tuple;  // Insert only

  static TxnOp read(TableId t, RowId r, ColumnId c) { return {TxnOpKind::Read, t, r, c, 0, {}}; }
  static TxnOp insert(TableId t, std::vector<Value> tuple) {
    return {TxnOpKind::Insert, t, 0, 0, 0, std::move(tuple)};
  }
  static TxnOp del(TableId t, RowId r) { return {TxnOpKind::Delete, t, r, 0, 0, {}}; }
  static TxnOp modify(TableId t, RowId r, ColumnId c, Value v) {
    return {TxnOpKind::Modify, t, r, c, v, {}};
  }
  static TxnOp add(TableId t, RowId r, ColumnId c, Value delta) {
    return {TxnOpKind::Add, t, r, c, delta, {}};
  }
};

enum class AbortReason : std::uint8_t { None, RowMissing, BadTuple, BadTable };

struct TxnResult {
  bool committed = false;
  AbortReason abort_reason = AbortReason::None;
  CommitId commit_id = 0;
  std::vector<Value> reads;
  // Row ids assigned to Insert ops, in op order.
  std::vector<RowId> inserted_rows;
};

// Observes committed writes while the issuing transaction still holds its
// table locks. Baseline engines hang their bookkeeping here (dirty-column
// flags for full-copy snapshots, version-chain appends for MVCC).
class WriteHook {
 public:
  virtual ~WriteHook() = default;
  virtual void on_insert(CommitId id, TableId table, RowId row,
                         const std::vector<Value>& tuple) = 0;
  virtual void on_modify(CommitId id, TableId table, RowId row, ColumnId column, Value value) = 0;
  virtual void on_delete(CommitId id, TableId table, RowId row,
                         const std::vector<Value>& last_tuple) = 0;
};

// Transactional island: row stores under per-table locks, a global commit
// clock, and one commit-ordered update log per worker thread. A transaction
// validates every op against the current state, then applies its writes and
// appends log entries while still holding the locks of every table it
// touched, so per-table apply order always matches commit-id order.
class TxnEngine {
 public:
  struct Options {
    std::size_t thread_count = 1;
    bool record_update_logs = true;
    WriteHook* write_hook = nullptr;
  };

  explicit TxnEngine(Options options);

  TableId create_table(TableSchema schema);
  std::size_t table_count() const { return tables_.size(); }
  const TableSchema& schema(TableId table) const;

  // Bulk population before any transactions run; assigns dense row ids from 0
  // and does not produce log entries (the loaded state is the commit-0
  // baseline every replica starts from).
  void load_rows(TableId table, const std::vector<std::vector<Value>>& tuples);

  // Executes one transaction on behalf of worker `thread`. All ops are
  // validated first; any failure aborts the whole transaction without side
  // effects. Commit ids are assigned only to committed transactions.
  TxnResult execute_txn(std::size_t thread, std::span<const TxnOp> ops);

  CommitClock& clock() { return clock_; }
  const CommitClock& clock() const { return clock_; }

  UpdateLog& log(std::size_t thread) { return *logs_[thread]; }
  std::size_t log_count() const { return logs_.size(); }
  std::uint64_t pending_update_count() const;

  std::uint64_t committed_count() const { return committed_.load(); }
  std::uint64_t aborted_count() const { return aborted_.load(); }

  // Unsynchronized access for quiesced-state inspection (checksums, replica
  // rebuild oracles). Callers must ensure no transaction is in flight.
  const RowStore& table(TableId table) const;
  RowStore& mutable_table(TableId table);
  std::mutex& table_mutex(TableId table);

 private:
  struct TableSlot {
    std::unique_ptr<RowStore> store;
    std::unique_ptr<std::mutex> mutex;
  };

  Options options_;
  std::vector<TableSlot> tables_;
  CommitClock clock_;
  std::vector<std::unique_ptr<UpdateLog>> logs_;
  std::atomic<std::uint64_t> committed_{0};
  std::atomic<std::uint64_t> aborted_{0};
};

}  // namespace islanddb
