#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>

#include "islanddb/column.hpp"
#include "islanddb/query.hpp"
#include "islanddb/scheduler.hpp"
#include "islanddb/topology.hpp"
#include "islanddb/types.hpp"

namespace islanddb {

// Immutable column versions a query runs against, keyed by column. All
// versions of one table must have equal length (positionally aligned).
struct ExecutionInput {
  std::unordered_map<ColumnKey, std::shared_ptr<const ColumnVersion>> versions;
  CommitId cutoff = 0;
};

// Runs planned queries as staged task batches on a worker pool:
//   filter stage (probe and build scans), build stage (join hash table),
//   final stage (probe + aggregate). Dependent stages are separated by
//   pool barriers; tasks within a stage are independent and commutative.
//
// Tasks work directly on dictionary codes: predicates are translated to
// code ranges (the encoding is order-preserving), so filtering never
// decodes. Every packed-code read and dictionary probe is tallied as a
// local or remote access against the topology placement, and an optional
// per-remote-access delay models the distance.
class AnalyticalEngine {
 public:
  AnalyticalEngine(const TopologyModel* topo, WorkerPool* pool,
                   std::uint64_t remote_access_delay_ns = 0);

  // Thread-safe; many queries may execute concurrently on the shared pool.
  QueryResult execute(const QueryPlan& plan, const ExecutionInput& input);

 private:
  const TopologyModel* topo_;
  WorkerPool* pool_;
  std::uint64_t remote_delay_ns_;
  std::atomic<std::uint64_t> next_task_id_{0};
};

}  // namespace islanddb
