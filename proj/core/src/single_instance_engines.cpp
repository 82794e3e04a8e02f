#include <atomic>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "engine_internal.hpp"
#include "islanddb/executor.hpp"
#include "islanddb/mvcc.hpp"
#include "islanddb/row_store.hpp"

namespace islanddb {
namespace {

// Shared skeleton of the single-instance baselines: one transactional row
// store serves both workloads, and analytical scans run on the same worker
// pool / topology model as the island engine so task accounting is
// comparable. Subclasses decide how a query obtains consistent column
// versions from the shared store.
class SingleInstanceEngine : public Engine {
 public:
  explicit SingleInstanceEngine(const EngineConfig& config, WriteHook* hook)
      : config_(config),
        topo_(config.topology),
        txn_(TxnEngine::Options{config.txn_threads, false, hook}),
        pool_(&topo_, WorkerPoolOptions{resolve_worker_cap(config), config.cross_group_stealing,
                                        config.record_scheduler_events}),
        analytics_(&topo_, &pool_, config.topology.remote_access_delay_ns) {}

  EngineMode mode() const override { return config_.mode; }

  const TableSchema& schema(TableId table) const override { return txn_.schema(table); }
  std::vector<TableSchema> schemas() const override { return schemas_; }

  void start() override {}
  void stop() override {}
  void drain() override {}

  TxnResult submit_txn(std::size_t thread, std::span<const TxnOp> ops) override {
    return txn_.execute_txn(thread, ops);
  }

  QueryResult submit_query(const QuerySpec& spec) override {
    const QueryPlan plan = plan_query(spec, schemas_);
    ExecutionInput input;
    prepare_input(plan, input);
    QueryResult result = analytics_.execute(plan, input);
    queries_.fetch_add(1, std::memory_order_relaxed);
    return result;
  }

  MetricsSnapshot metrics() override {
    MetricsSnapshot m;
    m.txns_committed = txn_.committed_count();
    m.txns_aborted = txn_.aborted_count();
    m.queries_executed = queries_.load();
    const SchedulerCounters& c = pool_.counters();
    m.local_column_accesses = c.local_column_accesses.load();
    m.remote_column_accesses = c.remote_column_accesses.load();
    m.local_dict_accesses = c.local_dict_accesses.load();
    m.remote_dict_accesses = c.remote_dict_accesses.load();
    m.steals_in_group = c.steals_in_group.load();
    m.steals_cross_group = c.steals_cross_group.load();
    m.tasks_executed = c.tasks_executed.load();
    fill_metrics(m);
    return m;
  }

  TxnEngine& txn_engine() override { return txn_; }

 protected:
  // Collect per-table column versions that are mutually consistent.
  virtual void prepare_input(const QueryPlan& plan, ExecutionInput& input) = 0;
  virtual void fill_metrics(MetricsSnapshot& m) = 0;

  // Referenced columns of `plan`, grouped per table in ascending order.
  static std::vector<std::pair<TableId, std::vector<ColumnId>>> columns_by_table(
      const QueryPlan& plan) {
    std::vector<std::pair<TableId, std::vector<ColumnId>>> grouped;
    for (const ColumnKey& key : plan.referenced_columns) {  // already sorted
      if (grouped.empty() || grouped.back().first != key.table) {
        grouped.emplace_back(key.table, std::vector<ColumnId>{});
      }
      grouped.back().second.push_back(key.column);
    }
    return grouped;
  }

  EngineConfig config_;
  TopologyModel topo_;
  TxnEngine txn_;
  WorkerPool pool_;
  AnalyticalEngine analytics_;
  std::vector<TableSchema> schemas_;
  std::atomic<std::uint64_t> queries_{0};
  std::atomic<std::uint64_t> version_counter_{0};
};

// Snapshot-isolation-by-copy baseline: the engine keeps one encoded copy of
// every column and a dirty flag per column. A query that touches a dirty
// column stops the writers of that table (its table lock) and deep-copies the
// column from the row store before scanning; clean columns reuse the cached
// copy byte-for-byte. Copied bytes are the isolation cost this baseline pays.
class SnapshotCopyEngine final : public SingleInstanceEngine, private WriteHook {
 public:
  explicit SnapshotCopyEngine(const EngineConfig& config)
      : SingleInstanceEngine(config, static_cast<WriteHook*>(this)) {}

  TableId create_table(TableSchema schema) override {
    const TableId id = txn_.create_table(std::move(schema));
    schemas_.push_back(txn_.schema(id));
    auto state = std::make_unique<TableCache>();
    // Count-construct: CachedColumn holds an atomic and cannot be moved.
    // Columns start dirty so a pre-load query pays for its own copy.
    state->columns = std::vector<CachedColumn>(schemas_[id].columns.size());
    cache_.push_back(std::move(state));
    return id;
  }

  void load_rows(TableId table, const std::vector<std::vector<Value>>& rows) override {
    txn_.load_rows(table, rows);
    // Loading is part of setup; the initial copy is not charged to queries.
    std::lock_guard<std::mutex> lk(cache_mutex_);
    std::vector<ColumnId> all(schemas_[table].columns.size());
    for (ColumnId c = 0; c < all.size(); ++c) all[c] = c;
    rebuild_columns(table, all, /*charge_bytes=*/false);
  }

  std::uint64_t state_checksum() override {
    // Every clean cached column must match the row store projection.
    for (TableId t = 0; t < cache_.size(); ++t) {
      const RowStore& store = txn_.table(t);
      const std::vector<RowId> rows = store.sorted_row_ids();
      for (ColumnId c = 0; c < cache_[t]->columns.size(); ++c) {
        const CachedColumn& cached = cache_[t]->columns[c];
        if (cached.dirty.load(std::memory_order_relaxed) || !cached.version) continue;
        if (cached.version->column.size() != rows.size()) {
          throw CorruptionError("clean cached column has stale length");
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const auto& v = *cached.version;
          if (!v.column.validity.get(i) ||
              v.dictionary->value_at(v.column.codes.get(i)) != store.field(rows[i], c)) {
            throw CorruptionError("clean cached column diverges from the row store");
          }
        }
      }
    }
    return checksum_rows(txn_, schemas_.size());
  }

 private:
  struct CachedColumn {
    std::shared_ptr<const ColumnVersion> version;
    std::atomic<bool> dirty{true};
  };
  struct TableCache {
    std::vector<CachedColumn> columns;
  };

  void on_insert(CommitId, TableId table, RowId, const std::vector<Value>&) override {
    mark_all_dirty(table);
  }
  void on_delete(CommitId, TableId table, RowId, const std::vector<Value>&) override {
    mark_all_dirty(table);
  }
  void on_modify(CommitId, TableId table, RowId, ColumnId column, Value) override {
    cache_[table]->columns[column].dirty.store(true, std::memory_order_release);
  }

  void mark_all_dirty(TableId table) {
    for (CachedColumn& c : cache_[table]->columns) {
      c.dirty.store(true, std::memory_order_release);
    }
  }

  // Caller holds cache_mutex_. Takes the table's transaction lock, so writers
  // wait while the copy is made.
  void rebuild_columns(TableId table, const std::vector<ColumnId>& columns, bool charge_bytes) {
    if (columns.empty()) return;
    std::lock_guard<std::mutex> table_lock(txn_.table_mutex(table));
    const RowStore& store = txn_.table(table);
    const std::vector<RowId> rows = store.sorted_row_ids();
    const CommitId at = txn_.clock().last_assigned();
    for (const ColumnId c : columns) {
      std::vector<Value> values;
      values.reserve(rows.size());
      for (const RowId r : rows) values.push_back(store.field(r, c));
      auto version =
          make_column_version(version_counter_.fetch_add(1) + 1, at, values, nullptr);
      if (charge_bytes) {
        copied_bytes_.fetch_add(version->column.packed_bytes() + version->dictionary->byte_size(),
                                std::memory_order_relaxed);
      }
      CachedColumn& cached = cache_[table]->columns[c];
      cached.version = std::move(version);
      cached.dirty.store(false, std::memory_order_release);
    }
  }

  void prepare_input(const QueryPlan& plan, ExecutionInput& input) override {
    std::lock_guard<std::mutex> lk(cache_mutex_);
    CommitId cutoff = 0;
    for (const auto& [table, columns] : columns_by_table(plan)) {
      std::vector<ColumnId> stale;
      for (const ColumnId c : columns) {
        if (cache_[table]->columns[c].dirty.load(std::memory_order_acquire)) {
          stale.push_back(c);
        }
      }
      rebuild_columns(table, stale, /*charge_bytes=*/true);
      for (const ColumnId c : columns) {
        const CachedColumn& cached = cache_[table]->columns[c];
        input.versions.emplace(ColumnKey{table, c}, cached.version);
        cutoff = std::max(cutoff, cached.version->created_at);
      }
    }
    input.cutoff = cutoff;
  }

  void fill_metrics(MetricsSnapshot& m) override {
    m.snapshot_bytes = copied_bytes_.load();
  }

  std::mutex cache_mutex_;
  std::vector<std::unique_ptr<TableCache>> cache_;
  std::atomic<std::uint64_t> copied_bytes_{0};
};

// Multi-version single-instance baseline: committed writes append to
// per-field version chains, and a query materializes transient column
// versions by scanning the chains at its cutoff. No copies are kept; the
// cost moves into chain traversal during every query.
class VersionChainEngine final : public SingleInstanceEngine {
 public:
  explicit VersionChainEngine(const EngineConfig& config)
      : SingleInstanceEngine(config, &store_) {}

  TableId create_table(TableSchema schema) override {
    const TableId id = txn_.create_table(std::move(schema));
    schemas_.push_back(txn_.schema(id));
    store_.register_table(id, static_cast<std::uint32_t>(schemas_[id].columns.size()));
    return id;
  }

  void load_rows(TableId table, const std::vector<std::vector<Value>>& rows) override {
    const RowId first = txn_.table(table).next_row_id();
    txn_.load_rows(table, rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      store_.load_row(table, first + i, rows[i]);
    }
  }

  std::uint64_t state_checksum() override {
    const CommitId bound = txn_.clock().visible_bound();
    for (TableId t = 0; t < schemas_.size(); ++t) {
      const RowStore& store = txn_.table(t);
      for (const RowId row : store.sorted_row_ids()) {
        for (ColumnId c = 0; c < schemas_[t].columns.size(); ++c) {
          const auto v = store_.read(t, row, c, bound);
          if (!v || *v != store.field(row, c)) {
            throw CorruptionError("version chains diverge from the row store");
          }
        }
      }
    }
    return checksum_rows(txn_, schemas_.size());
  }

 private:
  void prepare_input(const QueryPlan& plan, ExecutionInput& input) override {
    const CommitId cutoff = txn_.clock().visible_bound();
    for (const auto& [table, columns] : columns_by_table(plan)) {
      const MvccStore::TableScan scan = store_.scan(table, columns, cutoff);
      for (std::size_t i = 0; i < columns.size(); ++i) {
        input.versions.emplace(
            ColumnKey{table, columns[i]},
            make_column_version(version_counter_.fetch_add(1) + 1, cutoff, scan.columns[i],
                                nullptr));
      }
    }
    input.cutoff = cutoff;
  }

  void fill_metrics(MetricsSnapshot& m) override {
    m.mvcc_steps = store_.traversal_steps();
    m.mvcc_reads = store_.traversal_reads();
  }

  MvccStore store_;
};

}  // namespace

std::unique_ptr<Engine> make_snapshot_copy_engine(const EngineConfig& config) {
  return std::make_unique<SnapshotCopyEngine>(config);
}

std::unique_ptr<Engine> make_version_chain_engine(const EngineConfig& config) {
  return std::make_unique<VersionChainEngine>(config);
}

}  // namespace islanddb
