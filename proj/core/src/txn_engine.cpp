#include "islanddb/txn_engine.hpp"

#include <algorithm>

namespace islanddb {

TxnEngine::TxnEngine(Options options) : options_(options), clock_(options.thread_count) {
  if (options_.thread_count == 0) throw ConfigError("transaction engine needs >= 1 thread");
  logs_.reserve(options_.thread_count);
  for (std::size_t i = 0; i < options_.thread_count; ++i) {
    logs_.push_back(std::make_unique<UpdateLog>());
  }
}

TableId TxnEngine::create_table(TableSchema schema) {
  schema.validate();
  tables_.push_back({std::make_unique<RowStore>(std::move(schema)), std::make_unique<std::mutex>()});
  return static_cast<TableId>(tables_.size() - 1);
}

const TableSchema& TxnEngine::schema(TableId table) const {
  return this->table(table).schema();
}

const RowStore& TxnEngine::table(TableId table) const {
  if (table >= tables_.size()) throw NotFoundError("table does not exist");
  return *tables_[table].store;
}

RowStore& TxnEngine::mutable_table(TableId table) {
  if (table >= tables_.size()) throw NotFoundError("table does not exist");
  return *tables_[table].store;
}

std::mutex& TxnEngine::table_mutex(TableId table) {
  if (table >= tables_.size()) throw NotFoundError("table does not exist");
  return *tables_[table].mutex;
}

void TxnEngine::load_rows(TableId table, const std::vector<std::vector<Value>>& tuples) {
  RowStore& store = mutable_table(table);
  std::scoped_lock lock(table_mutex(table));
  for (const auto& t : tuples) store.insert(t);
}

std::uint64_t TxnEngine::pending_update_count() const {
  std::uint64_t n = 0;
  for (const auto& log : logs_) n += log->pending();
  return n;
}

TxnResult TxnEngine::execute_txn(std::size_t thread, std::span<const TxnOp> ops) {
  TxnResult result;

  // Lock every touched table in id order; the fixed order makes multi-table
  // transactions deadlock-free.
  std::vector<TableId> touched;
  for (const TxnOp& op : ops) {
    if (op.table >= tables_.size()) {
      result.abort_reason = AbortReason::BadTable;
      aborted_.fetch_add(1, std::memory_order_relaxed);
      return result;
    }
    touched.push_back(op.table);
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  std::vector<std::unique_lock<std::mutex>> locks;
  locks.reserve(touched.size());
  for (TableId t : touched) locks.emplace_back(*tables_[t].mutex);

  // Validate before applying anything. Inserted rows become visible to later
  // ops of the same transaction, deleted rows stop being valid targets.
  std::vector<std::uint64_t> pending_inserts(tables_.size(), 0);
  std::vector<std::pair<TableId, RowId>> pending_deletes;
  const auto deleted_here = [&](TableId t, RowId r) {
    return std::find(pending_deletes.begin(), pending_deletes.end(), std::pair{t, r}) !=
           pending_deletes.end();
  };
  const auto row_visible = [&](const TxnOp& op) {
    const RowStore& store = *tables_[op.table].store;
    if (deleted_here(op.table, op.row)) return false;
    if (store.contains(op.row)) return true;
    return op.row >= store.next_row_id() &&
           op.row < store.next_row_id() + pending_inserts[op.table];
  };
  for (const TxnOp& op : ops) {
    const RowStore& store = *tables_[op.table].store;
    switch (op.kind) {
      case TxnOpKind::Insert:
        if (op.tuple.size() != store.column_count()) {
          result.abort_reason = AbortReason::BadTuple;
        } else {
          pending_inserts[op.table]++;
        }
        break;
      case TxnOpKind::Read:
      case TxnOpKind::Modify:
      case TxnOpKind::Add:
        if (op.column >= store.column_count() || !row_visible(op)) {
          result.abort_reason = AbortReason::RowMissing;
        }
        break;
      case TxnOpKind::Delete:
        if (!row_visible(op)) {
          result.abort_reason = AbortReason::RowMissing;
        } else {
          pending_deletes.emplace_back(op.table, op.row);
        }
        break;
    }
    if (result.abort_reason != AbortReason::None) {
      aborted_.fetch_add(1, std::memory_order_relaxed);
      return result;
    }
  }

  // Every committed transaction consumes a commit id, including read-only
  // ones; aborted transactions never reach this point.
  const CommitId id = clock_.begin_commit(thread);
  const SteadyTime now = std::chrono::steady_clock::now();

  std::vector<UpdateLogEntry> entries;
  for (const TxnOp& op : ops) {
    RowStore& store = *tables_[op.table].store;
    switch (op.kind) {
      case TxnOpKind::Read:
        result.reads.push_back(store.field(op.row, op.column));
        break;
      case TxnOpKind::Insert: {
        const RowId row = store.insert(op.tuple);
        result.inserted_rows.push_back(row);
        if (options_.write_hook) options_.write_hook->on_insert(id, op.table, row, op.tuple);
        if (options_.record_update_logs) {
          for (ColumnId c = 0; c < store.column_count(); ++c) {
            entries.push_back({id, UpdateKind::Insert, op.tuple[c], {op.table, row, c}, now});
          }
        }
        break;
      }
      case TxnOpKind::Delete: {
        const std::vector<Value> last = store.tuple(op.row);
        store.remove(op.row);
        if (options_.write_hook) options_.write_hook->on_delete(id, op.table, op.row, last);
        if (options_.record_update_logs) {
          for (ColumnId c = 0; c < store.column_count(); ++c) {
            entries.push_back({id, UpdateKind::Delete, 0, {op.table, op.row, c}, now});
          }
        }
        break;
      }
      case TxnOpKind::Modify:
      case TxnOpKind::Add: {
        const Value v =
            op.kind == TxnOpKind::Add ? store.field(op.row, op.column) + op.value : op.value;
        store.modify(op.row, op.column, v);
        if (options_.write_hook) options_.write_hook->on_modify(id, op.table, op.row, op.column, v);
        if (options_.record_update_logs) {
          entries.push_back({id, UpdateKind::Modify, v, {op.table, op.row, op.column}, now});
        }
        break;
      }
    }
  }

  // Log entries must be visible before the commit is published, otherwise the
  // shipping agent could treat a later commit as safe while ours is missing.
  if (!entries.empty()) {
    UpdateLog& log = *logs_[thread];
    for (const UpdateLogEntry& e : entries) log.append(e);
  }
  clock_.finish_commit(thread, id);

  result.committed = true;
  result.commit_id = id;
  committed_.fetch_add(1, std::memory_order_relaxed);
  return result;
}

}  // namespace islanddb
