#include "islanddb/bench.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>

namespace islanddb {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

// Uniform view over the three workload families.
struct WorkloadAdapter {
  std::vector<TableSchema> schemas;
  std::function<std::vector<std::vector<Value>>(TableId)> initial_rows;
  std::function<std::vector<TxnOp>(std::uint32_t, std::uint64_t)> txn_ops;  // null = read-only
  std::function<QuerySpec(std::uint64_t)> query;
  double write_ratio = 0.0;  // reporting only
};

WorkloadAdapter make_adapter(const BenchConfig& config) {
  WorkloadAdapter a;
  switch (config.workload) {
    case BenchConfig::Workload::Synthetic: {
      SyntheticSpec spec = config.synthetic;
      spec.seed = config.seed;
      spec.txn_threads = config.engine.txn_threads;
      auto w = std::make_shared<SyntheticWorkload>(spec);
      a.schemas = w->schemas();
      a.initial_rows = [w](TableId t) { return w->initial_rows(t); };
      a.txn_ops = [w](std::uint32_t th, std::uint64_t i) { return w->txn_ops(th, i); };
      a.query = [w](std::uint64_t i) { return w->query(i); };
      a.write_ratio = spec.write_ratio;
      break;
    }
    case BenchConfig::Workload::OrderEntry: {
      TpccSpec spec = config.order_entry;
      spec.seed = config.seed;
      auto w = std::make_shared<TpccWorkload>(spec);
      a.schemas = w->schemas();
      a.initial_rows = [w](TableId t) { return w->initial_rows(t); };
      a.txn_ops = [w](std::uint32_t th, std::uint64_t i) { return w->txn_ops(th, i); };
      a.query = [w](std::uint64_t i) { return w->query(i); };
      a.write_ratio = 1.0;  // every transaction writes
      break;
    }
    case BenchConfig::Workload::LineItemScan: {
      Tpch6Spec spec = config.line_item;
      spec.seed = config.seed;
      auto w = std::make_shared<Tpch6Workload>(spec);
      a.schemas = w->schemas();
      a.initial_rows = [w](TableId t) { return w->initial_rows(t); };
      a.txn_ops = nullptr;
      a.query = [w](std::uint64_t) { return w->query(); };
      a.write_ratio = 0.0;
      break;
    }
  }
  return a;
}

}  // namespace

BenchResult run_bench(const BenchConfig& config) {
  const WorkloadAdapter workload = make_adapter(config);

  std::unique_ptr<Engine> engine = build_engine(config.engine);
  for (const TableSchema& schema : workload.schemas) {
    const TableId id = engine->create_table(schema);
    engine->load_rows(id, workload.initial_rows(id));
  }
  engine->start();

  BenchResult result;
  result.query_results.resize(config.query_count);

  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto capture = [&](std::exception_ptr e) {
    std::lock_guard<std::mutex> lk(error_mutex);
    if (!first_error) first_error = e;
  };

  const bool has_txns = workload.txn_ops != nullptr && config.txns_per_thread > 0;
  const std::uint32_t txn_threads = config.engine.txn_threads;

  auto run_txn_phase = [&]() -> double {
    if (!has_txns) return 0.0;
    const Clock::time_point begin = Clock::now();
    std::vector<std::thread> threads;
    threads.reserve(txn_threads);
    for (std::uint32_t t = 0; t < txn_threads; ++t) {
      threads.emplace_back([&, t] {
        try {
          for (std::uint64_t i = 0; i < config.txns_per_thread; ++i) {
            const std::vector<TxnOp> ops = workload.txn_ops(t, i);
            engine->submit_txn(t, ops);
          }
        } catch (...) {
          capture(std::current_exception());
        }
      });
    }
    for (std::thread& th : threads) th.join();
    return seconds_between(begin, Clock::now());
  };

  auto run_query_phase = [&]() -> double {
    if (config.query_count == 0) return 0.0;
    const std::uint32_t submitters = std::max<std::uint32_t>(1, config.analytic_threads);
    const Clock::time_point begin = Clock::now();
    std::vector<std::thread> threads;
    threads.reserve(submitters);
    for (std::uint32_t t = 0; t < submitters; ++t) {
      threads.emplace_back([&, t] {
        try {
          for (std::uint64_t i = t; i < config.query_count; i += submitters) {
            const QuerySpec spec = workload.query(i);
            result.query_results[i] = engine->submit_query(spec).aggregates;
          }
        } catch (...) {
          capture(std::current_exception());
        }
      });
    }
    for (std::thread& th : threads) th.join();
    return seconds_between(begin, Clock::now());
  };

  const Clock::time_point wall_begin = Clock::now();
  if (config.serialized) {
    result.txn_seconds = run_txn_phase();
    engine->drain();
    result.query_seconds = run_query_phase();
  } else {
    // Mixed mode: transactional and analytical submitters run concurrently.
    std::thread txn_driver([&] { result.txn_seconds = run_txn_phase(); });
    result.query_seconds = run_query_phase();
    txn_driver.join();
  }
  engine->drain();
  result.wall_seconds = seconds_between(wall_begin, Clock::now());

  if (first_error) std::rethrow_exception(first_error);

  result.state_checksum = engine->state_checksum();
  result.metrics = engine->metrics();
  engine->stop();

  result.txn_count = result.metrics.txns_committed;
  result.query_count = result.metrics.queries_executed;
  result.txn_throughput =
      result.txn_seconds > 0 ? static_cast<double>(result.txn_count) / result.txn_seconds : 0.0;
  result.query_throughput =
      result.query_seconds > 0 ? static_cast<double>(result.query_count) / result.query_seconds
                               : 0.0;
  return result;
}

std::string csv_header() {
  return "mode,seed,txn_threads,analytic_threads,txn_count,query_count,write_ratio,"
         "txn_tput,ana_tput,freshness_mean_us,freshness_p99_us,ship_latency_us,"
         "apply_latency_us,dict_lookups,local_accesses,remote_accesses,snapshot_bytes,"
         "mvcc_steps";
}

std::string csv_row(const BenchConfig& config, const BenchResult& result) {
  const WorkloadAdapter workload = make_adapter(config);
  char buf[512];
  // ana_tput is left empty for transaction-only runs instead of a misleading 0.
  char ana[64] = "";
  if (result.query_count > 0) {
    std::snprintf(ana, sizeof(ana), "%.3f", result.query_throughput);
  }
  std::snprintf(buf, sizeof(buf),
                "%s,%llu,%u,%u,%llu,%llu,%.3f,%.3f,%s,%.3f,%.3f,%.3f,%.3f,%llu,%llu,%llu,%llu,%llu",
                to_string(config.engine.mode).c_str(),
                static_cast<unsigned long long>(config.seed), config.engine.txn_threads,
                config.analytic_threads, static_cast<unsigned long long>(result.txn_count),
                static_cast<unsigned long long>(result.query_count), workload.write_ratio,
                result.txn_throughput, ana, result.metrics.freshness_mean_us,
                result.metrics.freshness_p99_us, result.metrics.ship_mean_us,
                result.metrics.apply_mean_us,
                static_cast<unsigned long long>(result.metrics.dict_lookups),
                static_cast<unsigned long long>(result.metrics.local_accesses()),
                static_cast<unsigned long long>(result.metrics.remote_accesses()),
                static_cast<unsigned long long>(result.metrics.snapshot_bytes),
                static_cast<unsigned long long>(result.metrics.mvcc_steps));
  return buf;
}

}  // namespace islanddb
