#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "engine_internal.hpp"
#include "islanddb/application.hpp"
#include "islanddb/consistency.hpp"
#include "islanddb/executor.hpp"
#include "islanddb/shipping.hpp"

namespace islanddb {
namespace {

using Clock = std::chrono::steady_clock;

double micros_between(SteadyTime a, SteadyTime b) {
  return std::chrono::duration<double, std::micro>(b - a).count();
}

// Two-island engine: a transactional row-store island and an analytical
// island of dictionary-encoded column replicas, connected by update shipping.
// A background agent merges the per-thread logs into commit-ordered rounds,
// routes them into per-column batches, and hands each batch to the
// application worker of its home vault group. When every batch of a round is
// applied, all produced versions are published atomically and the frontier
// advances, so analytical snapshots always equal a log-prefix replay.
//
// The naive flag (multiple-instance baseline) swaps the merge-based update
// application for the full rebuild path; everything else is identical.
class IslandEngine final : public Engine {
 public:
  explicit IslandEngine(const EngineConfig& config)
      : config_(config),
        naive_(config.mode == EngineMode::MiNaive),
        topo_(config.topology),
        txn_(TxnEngine::Options{config.txn_threads, true, nullptr}),
        index_(&topo_, config.expected_rows_per_table),
        pool_(&topo_, WorkerPoolOptions{resolve_worker_cap(config), config.cross_group_stealing,
                                        config.record_scheduler_events}),
        analytics_(&topo_, &pool_, config.topology.remote_access_delay_ns) {
    appliers_.reserve(topo_.groups());
    for (std::uint32_t g = 0; g < topo_.groups(); ++g) {
      appliers_.push_back(std::make_unique<GroupApplier>());
    }
  }

  ~IslandEngine() override { stop(); }

  EngineMode mode() const override { return config_.mode; }

  TableId create_table(TableSchema schema) override {
    const TableId id = txn_.create_table(std::move(schema));
    const TableSchema& s = txn_.schema(id);
    schemas_.push_back(s);
    index_.register_table(id, static_cast<std::uint32_t>(s.columns.size()));
    for (ColumnId c = 0; c < s.columns.size(); ++c) {
      snapshots_.register_column(ColumnKey{id, c},
                                 make_column_version(next_version_id(), 0, {}, nullptr));
    }
    return id;
  }

  void load_rows(TableId table, const std::vector<std::vector<Value>>& rows) override {
    txn_.load_rows(table, rows);
    const RowStore& store = txn_.table(table);
    for (const RowId row : store.sorted_row_ids()) {
      index_.register_row(table, row);
    }
    // Rebuild each column replica from the row store in offset order. The
    // loaded state is the commit-0 baseline, so the frontier stays put.
    const std::uint64_t length = index_.table_length(table);
    for (ColumnId c = 0; c < schemas_[table].columns.size(); ++c) {
      std::vector<Value> values;
      values.reserve(length);
      for (std::uint64_t o = 0; o < length; ++o) {
        values.push_back(store.field(index_.row_at_offset(table, o), c));
      }
      snapshots_.publish(ColumnKey{table, c},
                         make_column_version(next_version_id(), 0, values, nullptr));
    }
  }

  const TableSchema& schema(TableId table) const override { return txn_.schema(table); }
  std::vector<TableSchema> schemas() const override { return schemas_; }

  void start() override {
    if (started_) return;
    running_.store(true, std::memory_order_release);
    last_ship_ = Clock::now();
    for (auto& g : appliers_) {
      g->thread = std::thread([this, gp = g.get()] { applier_loop(*gp); });
    }
    agent_ = std::thread([this] { agent_loop(); });
    started_ = true;
  }

  void stop() override {
    if (!started_) return;
    running_.store(false, std::memory_order_release);
    if (agent_.joinable()) agent_.join();
    for (auto& g : appliers_) {
      {
        std::lock_guard<std::mutex> lk(g->mutex);
      }
      g->cv.notify_all();
      if (g->thread.joinable()) g->thread.join();
    }
    started_ = false;
  }

  TxnResult submit_txn(std::size_t thread, std::span<const TxnOp> ops) override {
    return txn_.execute_txn(thread, ops);
  }

  QueryResult submit_query(const QuerySpec& spec) override {
    const QueryPlan plan = plan_query(spec, schemas_);
    QuerySnapshot snapshot = snapshots_.acquire(plan.referenced_columns);
    ExecutionInput input;
    input.cutoff = snapshot.cutoff;
    for (const QuerySnapshot::Pin& pin : snapshot.pins) {
      input.versions.emplace(pin.column, pin.version);
    }
    try {
      QueryResult result = analytics_.execute(plan, input);
      snapshots_.release(snapshot);
      queries_.fetch_add(1, std::memory_order_relaxed);
      return result;
    } catch (...) {
      snapshots_.release(snapshot);
      throw;
    }
  }

  void drain() override {
    for (;;) {
      if (txn_.pending_update_count() > 0) {
        if (!run_round()) {
          // Entries exist but sit above the safe bound: their transactions
          // are still mid-publication. Give them a moment to finish.
          std::this_thread::sleep_for(std::chrono::microseconds(100));
        }
        continue;
      }
      // The logs are consumed, but the background agent may be mid-round:
      // merge_logs consumes entries before the round publishes. Taking the
      // round mutex waits that round out; publication happens before the
      // mutex is released, so a clean recheck means everything is visible.
      std::lock_guard<std::mutex> lk(round_mutex_);
      if (txn_.pending_update_count() == 0) return;
    }
  }

  MetricsSnapshot metrics() override {
    MetricsSnapshot m;
    m.txns_committed = txn_.committed_count();
    m.txns_aborted = txn_.aborted_count();
    m.queries_executed = queries_.load();
    collector_.fill(m);
    m.shipped_entries = shipped_entries_.load();
    m.orphan_updates = orphan_updates_.load();
    m.dict_lookups = apply_dict_lookups_.load();
    m.merge_comparisons = apply_merge_comparisons_.load();
    const SchedulerCounters& c = pool_.counters();
    m.local_column_accesses = c.local_column_accesses.load();
    m.remote_column_accesses = c.remote_column_accesses.load();
    m.local_dict_accesses = c.local_dict_accesses.load();
    m.remote_dict_accesses = c.remote_dict_accesses.load();
    m.steals_in_group = c.steals_in_group.load();
    m.steals_cross_group = c.steals_cross_group.load();
    m.tasks_executed = c.tasks_executed.load();
    m.snapshots_created = snapshots_.snapshots_created();
    m.snapshots_shared = snapshots_.snapshots_shared();
    return m;
  }

  std::uint64_t state_checksum() override {
    verify_replicas();
    return checksum_rows(txn_, schemas_.size());
  }

  TxnEngine& txn_engine() override { return txn_; }

  // Test access.
  SnapshotManager& snapshot_manager() { return snapshots_; }
  WorkerPool& worker_pool() { return pool_; }

 private:
  struct RoundState {
    std::mutex mutex;
    std::condition_variable done_cv;
    std::size_t remaining = 0;
    std::vector<std::pair<ColumnKey, std::shared_ptr<const ColumnVersion>>> results;
    bool failed = false;
    std::string error;
  };

  struct ApplyJob {
    UpdateBatch batch;
    std::shared_ptr<RoundState> round;
  };

  struct GroupApplier {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<ApplyJob> jobs;
    std::thread thread;
  };

  std::uint64_t next_version_id() { return version_counter_.fetch_add(1) + 1; }

  void agent_loop() {
    while (running_.load(std::memory_order_acquire)) {
      const std::uint64_t pending = txn_.pending_update_count();
      const SteadyTime now = Clock::now();
      if (shipping_trigger(pending, now, last_ship_, config_.ship_threshold,
                           std::chrono::milliseconds(config_.staleness_timer_ms))) {
        run_round();
      } else {
        std::this_thread::sleep_for(std::chrono::microseconds(200));
      }
    }
  }

  // One shipping round: merge, route, apply on the group workers, publish
  // atomically. Returns false when nothing below the safe bound was pending.
  bool run_round() {
    std::lock_guard<std::mutex> round_lock(round_mutex_);

    std::vector<UpdateLog*> logs;
    logs.reserve(txn_.log_count());
    for (std::size_t i = 0; i < txn_.log_count(); ++i) logs.push_back(&txn_.log(i));

    const SteadyTime t0 = Clock::now();
    const CommitId bound = txn_.clock().visible_bound();
    FinalLog final_log = merge_logs(logs, bound, config_.ship_threshold);
    if (final_log.entries.empty()) return false;

    RouteResult routed = route_final_log(final_log, index_, topo_);
    collector_.record_ship_us(micros_between(t0, Clock::now()));

    // One freshness sample per committed transaction in the round.
    std::vector<SteadyTime> commit_times;
    CommitId last_seen = 0;
    for (const UpdateLogEntry& e : final_log.entries) {
      if (e.commit_id != last_seen) {
        commit_times.push_back(e.commit_time);
        last_seen = e.commit_id;
      }
    }
    const CommitId frontier = final_log.entries.back().commit_id;

    auto round = std::make_shared<RoundState>();
    round->remaining = routed.batches.size();
    round->results.reserve(routed.batches.size());
    for (UpdateBatch& batch : routed.batches) {
      GroupApplier& g = *appliers_[batch.vault_group];
      {
        std::lock_guard<std::mutex> lk(g.mutex);
        g.jobs.push_back(ApplyJob{std::move(batch), round});
      }
      g.cv.notify_one();
    }

    {
      std::unique_lock<std::mutex> lk(round->mutex);
      round->done_cv.wait(lk, [&] { return round->remaining == 0; });
      if (round->failed) {
        throw Error("update application failed: " + round->error);
      }
    }

    snapshots_.publish_round(round->results, frontier);

    const SteadyTime published = Clock::now();
    std::vector<double> freshness;
    freshness.reserve(commit_times.size());
    for (const SteadyTime t : commit_times) freshness.push_back(micros_between(t, published));
    collector_.record_freshness_us(freshness);

    shipped_entries_.fetch_add(final_log.entries.size(), std::memory_order_relaxed);
    orphan_updates_.fetch_add(routed.orphan_updates, std::memory_order_relaxed);
    last_ship_ = published;
    return true;
  }

  void applier_loop(GroupApplier& g) {
    while (true) {
      ApplyJob job;
      {
        std::unique_lock<std::mutex> lk(g.mutex);
        g.cv.wait(lk, [&] {
          return !g.jobs.empty() || !running_.load(std::memory_order_acquire);
        });
        if (g.jobs.empty()) {
          if (!running_.load(std::memory_order_acquire)) return;
          continue;
        }
        job = std::move(g.jobs.front());
        g.jobs.pop_front();
      }

      std::shared_ptr<const ColumnVersion> next;
      try {
        const std::shared_ptr<const ColumnVersion> base = snapshots_.main_version(job.batch.column);
        ApplyCounters counters;
        const SteadyTime t0 = Clock::now();
        next = naive_ ? naive_apply(*base, job.batch, next_version_id(),
                                    config_.dict_rebuild_factor, counters)
                      : apply_batch(*base, job.batch, next_version_id(),
                                    config_.dict_rebuild_factor, counters);
        collector_.record_apply_us(micros_between(t0, Clock::now()));
        apply_dict_lookups_.fetch_add(counters.dict_lookups, std::memory_order_relaxed);
        apply_merge_comparisons_.fetch_add(counters.merge_comparisons, std::memory_order_relaxed);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(job.round->mutex);
        if (!job.round->failed) {
          job.round->failed = true;
          job.round->error = e.what();
        }
      }

      {
        std::lock_guard<std::mutex> lk(job.round->mutex);
        if (next) job.round->results.emplace_back(job.batch.column, std::move(next));
        job.round->remaining -= 1;
        if (job.round->remaining == 0) job.round->done_cv.notify_all();
      }
    }
  }

  // Cross-checks every column replica against the row store: same length,
  // same membership, same values on live slots. Quiesced callers only.
  void verify_replicas() {
    for (TableId t = 0; t < schemas_.size(); ++t) {
      const RowStore& store = txn_.table(t);
      const std::uint64_t length = index_.table_length(t);
      for (ColumnId c = 0; c < schemas_[t].columns.size(); ++c) {
        const auto version = snapshots_.main_version(ColumnKey{t, c});
        if (version->column.size() != length) {
          throw CorruptionError("column replica length diverges from the location index");
        }
        std::uint64_t live = 0;
        for (std::uint64_t o = 0; o < length; ++o) {
          const RowId row = index_.row_at_offset(t, o);
          if (version->column.validity.get(o)) {
            ++live;
            if (!store.contains(row) ||
                store.field(row, c) != version->dictionary->value_at(version->column.codes.get(o))) {
              throw CorruptionError(
                  "column replica diverges from the row store: table " + std::to_string(t) +
                  " column " + std::to_string(c) + " offset " + std::to_string(o) + " row " +
                  std::to_string(row) + " replica " +
                  std::to_string(version->dictionary->value_at(version->column.codes.get(o))) +
                  " store " + (store.contains(row) ? std::to_string(store.field(row, c)) : "gone"));
            }
          } else if (store.contains(row)) {
            throw CorruptionError("replica marks a live row dead");
          }
        }
        if (live != store.row_count()) {
          throw CorruptionError("replica live-row count diverges from the row store");
        }
      }
    }
  }

  EngineConfig config_;
  bool naive_ = false;
  TopologyModel topo_;
  TxnEngine txn_;
  TargetIndex index_;
  SnapshotManager snapshots_;
  WorkerPool pool_;
  AnalyticalEngine analytics_;
  MetricsCollector collector_;
  std::vector<TableSchema> schemas_;

  std::vector<std::unique_ptr<GroupApplier>> appliers_;
  std::thread agent_;
  std::atomic<bool> running_{false};
  bool started_ = false;

  std::mutex round_mutex_;
  SteadyTime last_ship_{};

  std::atomic<std::uint64_t> version_counter_{0};
  std::atomic<std::uint64_t> queries_{0};
  std::atomic<std::uint64_t> shipped_entries_{0};
  std::atomic<std::uint64_t> orphan_updates_{0};
  std::atomic<std::uint64_t> apply_dict_lookups_{0};
  std::atomic<std::uint64_t> apply_merge_comparisons_{0};
};

}  // namespace

std::unique_ptr<Engine> make_island_engine(const EngineConfig& config) {
  return std::make_unique<IslandEngine>(config);
}

}  // namespace islanddb
