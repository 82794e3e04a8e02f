#include "islanddb/executor.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

namespace islanddb {
namespace {

constexpr std::size_t kJoinShards = 64;

struct AccessTally {
  std::uint64_t col_local = 0;
  std::uint64_t col_remote = 0;
  std::uint64_t dict_local = 0;
  std::uint64_t dict_remote = 0;

  void column(bool local, std::uint64_t n = 1) { (local ? col_local : col_remote) += n; }
  void dict(bool local, std::uint64_t n = 1) { (local ? dict_local : dict_remote) += n; }
  std::uint64_t remote_total() const { return col_remote + dict_remote; }
};

void flush_tally(SchedulerCounters& counters, const AccessTally& t) {
  counters.local_column_accesses.fetch_add(t.col_local, std::memory_order_relaxed);
  counters.remote_column_accesses.fetch_add(t.col_remote, std::memory_order_relaxed);
  counters.local_dict_accesses.fetch_add(t.dict_local, std::memory_order_relaxed);
  counters.remote_dict_accesses.fetch_add(t.dict_remote, std::memory_order_relaxed);
}

void inject_delay(std::uint64_t remote_accesses, std::uint64_t delay_ns) {
  if (delay_ns == 0 || remote_accesses == 0) return;
  const auto budget = std::chrono::nanoseconds(remote_accesses * delay_ns);
  const auto until = std::chrono::steady_clock::now() + budget;
  while (std::chrono::steady_clock::now() < until) {
    // busy wait: models access latency without yielding the worker
  }
}

// Binary search over the sorted dictionary, counting every probe so the
// work shows up in the access tallies exactly once per comparison.
std::uint32_t counted_lower_bound(const Dictionary& d, Value v, std::uint64_t& probes) {
  std::uint32_t lo = 0;
  std::uint32_t hi = d.size();
  while (lo < hi) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    ++probes;
    if (d.value_at(mid) < v) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::uint32_t counted_upper_bound(const Dictionary& d, Value v, std::uint64_t& probes) {
  std::uint32_t lo = 0;
  std::uint32_t hi = d.size();
  while (lo < hi) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    ++probes;
    if (d.value_at(mid) <= v) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// Half-open code interval [lo, hi) equivalent to a value predicate.
struct CodeRange {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
  bool empty() const { return lo >= hi; }
};

CodeRange compile_predicate(const Predicate& p, const Dictionary& d, std::uint64_t& probes) {
  const std::uint32_t n = d.size();
  switch (p.op) {
    case Predicate::Op::Lt:
      return {0, counted_lower_bound(d, p.a, probes)};
    case Predicate::Op::Le:
      return {0, counted_upper_bound(d, p.a, probes)};
    case Predicate::Op::Gt:
      return {counted_upper_bound(d, p.a, probes), n};
    case Predicate::Op::Ge:
      return {counted_lower_bound(d, p.a, probes), n};
    case Predicate::Op::Eq: {
      const std::uint32_t lo = counted_lower_bound(d, p.a, probes);
      const bool hit = lo < n && d.value_at(lo) == p.a;
      return {lo, hit ? lo + 1 : lo};
    }
    case Predicate::Op::Between: {
      const std::uint32_t lo = counted_lower_bound(d, p.a, probes);
      return {lo, counted_upper_bound(d, p.b, probes)};
    }
  }
  throw ContractError("unknown predicate operator");
}

struct BuildGroup {
  std::uint64_t count = 0;
  std::vector<long long> sums;  // one per build-side sum aggregate
};

struct JoinShard {
  std::mutex mutex;
  std::unordered_map<Value, BuildGroup> groups;
};

std::size_t shard_of(Value key) {
  return static_cast<std::size_t>(splitmix64(static_cast<std::uint64_t>(key)) % kJoinShards);
}

struct SharedAggregate {
  std::atomic<long long> sum{0};
  std::atomic<std::uint64_t> count{0};
  std::atomic<long long> min_value{std::numeric_limits<long long>::max()};
  std::atomic<long long> max_value{std::numeric_limits<long long>::min()};
};

struct LocalAggregate {
  long long sum = 0;
  std::uint64_t count = 0;
  long long min_value = std::numeric_limits<long long>::max();
  long long max_value = std::numeric_limits<long long>::min();
};

void merge_aggregate(SharedAggregate& shared, const LocalAggregate& local) {
  if (local.sum != 0) shared.sum.fetch_add(local.sum, std::memory_order_relaxed);
  if (local.count != 0) shared.count.fetch_add(local.count, std::memory_order_relaxed);
  long long seen = shared.min_value.load(std::memory_order_relaxed);
  while (local.min_value < seen &&
         !shared.min_value.compare_exchange_weak(seen, local.min_value,
                                                 std::memory_order_relaxed)) {
  }
  seen = shared.max_value.load(std::memory_order_relaxed);
  while (local.max_value > seen &&
         !shared.max_value.compare_exchange_weak(seen, local.max_value,
                                                 std::memory_order_relaxed)) {
  }
}

// Per-query execution state shared by all of its tasks. Lives on the
// coordinating thread's stack; pool barriers guarantee tasks are done
// before it goes out of scope.
struct ExecState {
  const QueryPlan* plan = nullptr;
  const ExecutionInput* input = nullptr;
  const TopologyModel* topo = nullptr;

  std::vector<std::vector<std::uint32_t>> probe_selection;  // offsets per segment
  std::vector<std::vector<std::uint32_t>> build_selection;
  std::vector<JoinShard> shards;
  std::vector<SharedAggregate> aggregates;
  std::vector<int> build_sum_slot;  // aggregate index -> slot in BuildGroup::sums, -1 otherwise
  std::uint32_t build_sum_count = 0;

  const ColumnVersion& version(TableId t, ColumnId c) const {
    auto it = input->versions.find(ColumnKey{t, c});
    if (it == input->versions.end() || !it->second) {
      throw ContractError("execution input is missing a pinned column version");
    }
    return *it->second;
  }
};

std::uint64_t table_length(const ExecState& st, TableId t) {
  return st.version(t, 0).column.size();
}

// Shared scan skeleton for filter tasks on either input table.
void run_filter_task(ExecState& st, TableId table, const std::vector<Predicate>& preds,
                     std::uint64_t seg_begin, std::uint64_t seg_end,
                     std::vector<std::uint32_t>& selection, bool col_local, bool dict_local,
                     AccessTally& tally) {
  struct Compiled {
    const ColumnVersion* version;
    CodeRange range;
  };
  std::vector<Compiled> compiled;
  compiled.reserve(preds.size());
  bool impossible = false;
  for (const Predicate& p : preds) {
    const ColumnVersion& v = st.version(table, p.column);
    std::uint64_t probes = 0;
    const CodeRange r = compile_predicate(p, *v.dictionary, probes);
    tally.dict(dict_local, probes);
    if (r.empty()) impossible = true;
    compiled.push_back({&v, r});
  }
  if (impossible) return;

  const ColumnVersion& liveness = st.version(table, preds.empty() ? 0 : preds[0].column);
  for (std::uint64_t o = seg_begin; o < seg_end; ++o) {
    tally.column(col_local);  // liveness bit
    if (!liveness.column.validity.get(o)) continue;
    bool keep = true;
    for (const Compiled& c : compiled) {
      const std::uint32_t code = c.version->column.codes.get(o);
      tally.column(col_local);
      if (code < c.range.lo || code >= c.range.hi) {
        keep = false;
        break;
      }
    }
    if (keep) selection.push_back(static_cast<std::uint32_t>(o));
  }
}

Value read_value(const ColumnVersion& v, std::uint32_t offset, bool col_local, bool dict_local,
                 AccessTally& tally) {
  const std::uint32_t code = v.column.codes.get(offset);
  tally.column(col_local);
  const Value value = v.dictionary->value_at(code);
  tally.dict(dict_local);
  return value;
}

}  // namespace

AnalyticalEngine::AnalyticalEngine(const TopologyModel* topo, WorkerPool* pool,
                                   std::uint64_t remote_access_delay_ns)
    : topo_(topo), pool_(pool), remote_delay_ns_(remote_access_delay_ns) {}

QueryResult AnalyticalEngine::execute(const QueryPlan& plan, const ExecutionInput& input) {
  const QuerySpec& spec = plan.spec;
  const TopologyConfig& cfg = topo_->config();

  ExecState st;
  st.plan = &plan;
  st.input = &input;
  st.topo = topo_;

  // Consistency check: all pinned versions of one table must align.
  for (const ColumnKey& key : plan.referenced_columns) {
    if (st.version(key.table, key.column).column.size() != table_length(st, key.table)) {
      throw ContractError("pinned versions of one table have different lengths");
    }
  }

  st.aggregates = std::vector<SharedAggregate>(spec.aggregates.size());
  st.build_sum_slot.assign(spec.aggregates.size(), -1);
  for (std::size_t i = 0; i < spec.aggregates.size(); ++i) {
    const AggregateSpec& agg = spec.aggregates[i];
    if (agg.side == AggregateSpec::Side::Build && agg.kind == AggregateSpec::Kind::Sum) {
      st.build_sum_slot[i] = static_cast<int>(st.build_sum_count++);
    }
  }

  const std::uint64_t seg = cfg.segment_size;
  const std::uint64_t probe_len = table_length(st, spec.table);
  const std::uint64_t probe_segs = (probe_len + seg - 1) / seg;
  st.probe_selection.resize(probe_segs);

  std::uint64_t build_segs = 0;
  if (spec.join) {
    const std::uint64_t build_len = table_length(st, spec.join->build_table);
    build_segs = (build_len + seg - 1) / seg;
    st.build_selection.resize(build_segs);
    st.shards = std::vector<JoinShard>(kJoinShards);
  }

  std::uint64_t tasks_total = 0;
  const bool pin_to_vault = cfg.placement == Placement::Local;
  auto make_task = [&](TableId table, std::uint64_t segment) {
    Task t;
    t.task_id = next_task_id_.fetch_add(1, std::memory_order_relaxed);
    t.home_vault = topo_->segment_vault(table, segment);
    t.home_group = topo_->group_of_vault(t.home_vault);
    t.vault_pinned = pin_to_vault;
    ++tasks_total;
    return t;
  };

  auto locality = [&](TableId table, std::uint32_t home_vault, const TaskContext& ctx,
                      bool& col_local, bool& dict_local) {
    col_local = ctx.vault == home_vault;
    dict_local = topo_->dictionary_local(table, ctx.vault);
  };

  // Stage 1: filter scans. Probe and build scans are independent, so they
  // share one barrier.
  {
    std::vector<Task> tasks;
    for (std::uint64_t s = 0; s < probe_segs; ++s) {
      const std::uint64_t begin = s * seg;
      const std::uint64_t end = std::min(probe_len, begin + seg);
      Task t = make_task(spec.table, s);
      const std::uint32_t home_vault = t.home_vault;
      t.run = [&st, &spec, this, s, begin, end, home_vault, locality](const TaskContext& ctx) {
        AccessTally tally;
        bool col_local = false, dict_local = false;
        locality(spec.table, home_vault, ctx, col_local, dict_local);
        run_filter_task(st, spec.table, spec.predicates, begin, end, st.probe_selection[s],
                        col_local, dict_local, tally);
        flush_tally(pool_->counters(), tally);
        inject_delay(tally.remote_total(), remote_delay_ns_);
      };
      tasks.push_back(std::move(t));
    }
    if (spec.join) {
      const std::uint64_t build_len = table_length(st, spec.join->build_table);
      for (std::uint64_t s = 0; s < build_segs; ++s) {
        const std::uint64_t begin = s * seg;
        const std::uint64_t end = std::min(build_len, begin + seg);
        Task t = make_task(spec.join->build_table, s);
        const std::uint32_t home_vault = t.home_vault;
        t.run = [&st, &spec, this, s, begin, end, home_vault, locality](const TaskContext& ctx) {
          AccessTally tally;
          bool col_local = false, dict_local = false;
          locality(spec.join->build_table, home_vault, ctx, col_local, dict_local);
          run_filter_task(st, spec.join->build_table, spec.join->build_predicates, begin, end,
                          st.build_selection[s], col_local, dict_local, tally);
          flush_tally(pool_->counters(), tally);
          inject_delay(tally.remote_total(), remote_delay_ns_);
        };
        tasks.push_back(std::move(t));
      }
    }
    pool_->run_and_wait(std::move(tasks));
  }

  // Stage 2 (join only): fold filtered build rows into the sharded hash
  // table keyed by the join column: per-key pair count plus one running sum
  // per build-side sum aggregate.
  if (spec.join) {
    std::vector<Task> tasks;
    for (std::uint64_t s = 0; s < build_segs; ++s) {
      if (st.build_selection[s].empty()) continue;
      Task t = make_task(spec.join->build_table, s);
      const std::uint32_t home_vault = t.home_vault;
      t.run = [&st, &spec, this, s, home_vault, locality](const TaskContext& ctx) {
        AccessTally tally;
        bool col_local = false, dict_local = false;
        const TableId bt = spec.join->build_table;
        locality(bt, home_vault, ctx, col_local, dict_local);
        const ColumnVersion& key_col = st.version(bt, spec.join->build_key);

        std::unordered_map<Value, BuildGroup> local;
        for (const std::uint32_t o : st.build_selection[s]) {
          const Value key = read_value(key_col, o, col_local, dict_local, tally);
          BuildGroup& g = local[key];
          if (g.sums.empty()) g.sums.resize(st.build_sum_count, 0);
          g.count += 1;
          for (std::size_t i = 0; i < spec.aggregates.size(); ++i) {
            const int slot = st.build_sum_slot[i];
            if (slot < 0) continue;
            const ColumnVersion& v = st.version(bt, spec.aggregates[i].column);
            g.sums[static_cast<std::size_t>(slot)] +=
                read_value(v, o, col_local, dict_local, tally);
          }
        }
        for (const auto& [key, g] : local) {
          JoinShard& shard = st.shards[shard_of(key)];
          std::lock_guard<std::mutex> lk(shard.mutex);
          BuildGroup& dst = shard.groups[key];
          if (dst.sums.empty()) dst.sums.resize(st.build_sum_count, 0);
          dst.count += g.count;
          for (std::size_t i = 0; i < g.sums.size(); ++i) dst.sums[i] += g.sums[i];
        }
        flush_tally(pool_->counters(), tally);
        inject_delay(tally.remote_total(), remote_delay_ns_);
      };
      tasks.push_back(std::move(t));
    }
    pool_->run_and_wait(std::move(tasks));
  }

  // Stage 3: aggregate over the selected probe rows (probing the hash table
  // first when joining). The hash table is read-only past the build barrier.
  {
    std::vector<Task> tasks;
    for (std::uint64_t s = 0; s < probe_segs; ++s) {
      if (st.probe_selection[s].empty()) continue;
      Task t = make_task(spec.table, s);
      const std::uint32_t home_vault = t.home_vault;
      t.run = [&st, &spec, this, s, home_vault, locality](const TaskContext& ctx) {
        AccessTally tally;
        bool col_local = false, dict_local = false;
        locality(spec.table, home_vault, ctx, col_local, dict_local);

        std::vector<LocalAggregate> local(spec.aggregates.size());
        const ColumnVersion* probe_key_col =
            spec.join ? &st.version(spec.table, spec.join->probe_key) : nullptr;

        for (const std::uint32_t o : st.probe_selection[s]) {
          std::uint64_t multiplicity = 1;
          const BuildGroup* group = nullptr;
          if (spec.join) {
            const Value key = read_value(*probe_key_col, o, col_local, dict_local, tally);
            const JoinShard& shard = st.shards[shard_of(key)];
            auto it = shard.groups.find(key);
            if (it == shard.groups.end()) continue;
            group = &it->second;
            multiplicity = group->count;
            if (multiplicity == 0) continue;
          }
          for (std::size_t i = 0; i < spec.aggregates.size(); ++i) {
            const AggregateSpec& agg = spec.aggregates[i];
            LocalAggregate& acc = local[i];
            switch (agg.kind) {
              case AggregateSpec::Kind::Count:
                acc.count += multiplicity;
                break;
              case AggregateSpec::Kind::Sum:
                if (agg.side == AggregateSpec::Side::Build) {
                  acc.sum += group->sums[static_cast<std::size_t>(st.build_sum_slot[i])];
                } else {
                  const Value v = read_value(st.version(spec.table, agg.column), o, col_local,
                                             dict_local, tally);
                  acc.sum += v * static_cast<long long>(multiplicity);
                }
                break;
              case AggregateSpec::Kind::Min: {
                const Value v = read_value(st.version(spec.table, agg.column), o, col_local,
                                           dict_local, tally);
                acc.min_value = std::min<long long>(acc.min_value, v);
                break;
              }
              case AggregateSpec::Kind::Max: {
                const Value v = read_value(st.version(spec.table, agg.column), o, col_local,
                                           dict_local, tally);
                acc.max_value = std::max<long long>(acc.max_value, v);
                break;
              }
              case AggregateSpec::Kind::SumProduct: {
                const Value v1 = read_value(st.version(spec.table, agg.column), o, col_local,
                                            dict_local, tally);
                const Value v2 = read_value(st.version(spec.table, agg.column2), o, col_local,
                                            dict_local, tally);
                acc.sum += v1 * v2 * static_cast<long long>(multiplicity);
                break;
              }
            }
          }
        }
        for (std::size_t i = 0; i < local.size(); ++i) merge_aggregate(st.aggregates[i], local[i]);
        flush_tally(pool_->counters(), tally);
        inject_delay(tally.remote_total(), remote_delay_ns_);
      };
      tasks.push_back(std::move(t));
    }
    pool_->run_and_wait(std::move(tasks));
  }

  QueryResult result;
  result.cutoff = input.cutoff;
  result.tasks_executed = tasks_total;
  result.aggregates.reserve(spec.aggregates.size());
  for (std::size_t i = 0; i < spec.aggregates.size(); ++i) {
    const SharedAggregate& a = st.aggregates[i];
    switch (spec.aggregates[i].kind) {
      case AggregateSpec::Kind::Count:
        result.aggregates.push_back(static_cast<Value>(a.count.load()));
        break;
      case AggregateSpec::Kind::Sum:
      case AggregateSpec::Kind::SumProduct:
        result.aggregates.push_back(static_cast<Value>(a.sum.load()));
        break;
      case AggregateSpec::Kind::Min: {
        const long long v = a.min_value.load();
        result.aggregates.push_back(v == std::numeric_limits<long long>::max() ? 0 : v);
        break;
      }
      case AggregateSpec::Kind::Max: {
        const long long v = a.max_value.load();
        result.aggregates.push_back(v == std::numeric_limits<long long>::min() ? 0 : v);
        break;
      }
    }
  }
  return result;
}

}  // namespace islanddb
