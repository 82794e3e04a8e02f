#pragma once

#include <string>
#include <vector>

#include "islanddb/engine.hpp"
#include "islanddb/workload.hpp"

namespace islanddb {

// One measured run: build an engine, load a workload, drive transactional
// and analytical submitters, drain, and collect metrics plus a state digest.
struct BenchConfig {
  enum class Workload { Synthetic, OrderEntry, LineItemScan };

  Workload workload = Workload::Synthetic;
  EngineConfig engine;

  SyntheticSpec synthetic;
  TpccSpec order_entry;
  Tpch6Spec line_item;

  std::uint64_t txns_per_thread = 1000;
  std::uint64_t query_count = 400;     // total analytical queries
  std::uint32_t analytic_threads = 4;  // concurrent query submitters

  // serialized: run all transactions, drain, then run all queries. Used for
  // cross-engine equivalence, where results must be schedule-independent.
  bool serialized = false;

  std::uint64_t seed = 1;  // overrides the per-workload seeds
};

struct BenchResult {
  MetricsSnapshot metrics;
  std::uint64_t txn_count = 0;
  std::uint64_t query_count = 0;
  double txn_seconds = 0.0;
  double query_seconds = 0.0;
  double wall_seconds = 0.0;
  double txn_throughput = 0.0;    // committed transactions / second
  double query_throughput = 0.0;  // queries / second
  std::uint64_t state_checksum = 0;
  // Aggregates of every query, in submission-index order; the equivalence
  // checks compare these across engines.
  std::vector<std::vector<Value>> query_results;
};

BenchResult run_bench(const BenchConfig& config);

// Fixed emission schema, one line per run.
std::string csv_header();
std::string csv_row(const BenchConfig& config, const BenchResult& result);

}  // namespace islanddb
