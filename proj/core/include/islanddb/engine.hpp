#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "islanddb/metrics.hpp"
#include "islanddb/query.hpp"
#include "islanddb/schema.hpp"
#include "islanddb/topology.hpp"
#include "islanddb/txn_engine.hpp"
#include "islanddb/types.hpp"

namespace islanddb {

struct EngineConfig {
  EngineMode mode = EngineMode::Polynesia;
  std::uint32_t txn_threads = 4;

  TopologyConfig topology;

  // Update shipping fires when this many log entries are pending, or when
  // the oldest unshipped work exceeds the staleness timer.
  std::uint64_t ship_threshold = 1024;
  std::uint32_t staleness_timer_ms = 10;

  // Replica dictionaries are rebuilt when they exceed this factor times the
  // live distinct-value count.
  double dict_rebuild_factor = 2.0;

  bool cross_group_stealing = true;

  // Caps analytical worker threads (floored at one per vault). 0 = read the
  // ISLANDDB_THREADS environment variable; if unset, use the topology's full
  // complement.
  std::uint32_t worker_cap = 0;

  bool record_scheduler_events = false;

  // Sizing hint for the row-location index.
  std::uint64_t expected_rows_per_table = 4096;

  void validate() const;
};

// Common control surface over the four engine builds. Lifecycle:
//   create_table / load_rows   (cold, single-threaded)
//   start                      (spins background machinery)
//   submit_txn / submit_query  (concurrent)
//   drain                      (push all committed work to the replicas)
//   stop                       (joins background threads; idempotent)
// metrics() and state_checksum() expect a quiesced engine for stable values.
class Engine {
 public:
  virtual ~Engine() = default;

  virtual EngineMode mode() const = 0;

  virtual TableId create_table(TableSchema schema) = 0;
  virtual void load_rows(TableId table, const std::vector<std::vector<Value>>& rows) = 0;
  virtual const TableSchema& schema(TableId table) const = 0;
  virtual std::vector<TableSchema> schemas() const = 0;

  virtual void start() = 0;
  virtual void stop() = 0;

  // `thread` selects the submitting transactional worker slot
  // (0 <= thread < txn_threads); each slot must be driven by one thread.
  virtual TxnResult submit_txn(std::size_t thread, std::span<const TxnOp> ops) = 0;

  virtual QueryResult submit_query(const QuerySpec& spec) = 0;

  // Blocks until every committed transaction is visible to analytics.
  virtual void drain() = 0;

  virtual MetricsSnapshot metrics() = 0;

  // Order-independent digest of the logical table contents (the row store).
  // Engines with replicas verify them against the row store first and throw
  // CorruptionError on divergence. Call quiesced.
  virtual std::uint64_t state_checksum() = 0;

  // Direct access to the transactional island. Every engine build is backed
  // by the same row-store core; embedders use this for point reads and
  // verification harnesses use it to replay the update logs. The reference
  // stays valid for the engine's lifetime.
  virtual TxnEngine& txn_engine() = 0;
};

std::unique_ptr<Engine> build_engine(const EngineConfig& config);

EngineMode parse_engine_mode(const std::string& name);
std::string to_string(EngineMode mode);

// Shared helper: digest of all rows of all tables, independent of row order.
std::uint64_t checksum_rows(const TxnEngine& txn, std::size_t table_count);

}  // namespace islanddb
