#pragma once

#include <cstdint>
#include <mutex>
#include <vector>

namespace islanddb {

// Point-in-time view of everything an engine measures. Latencies and
// freshness are microseconds. Fields that do not apply to a given engine
// stay zero.
struct MetricsSnapshot {
  std::uint64_t txns_committed = 0;
  std::uint64_t txns_aborted = 0;
  std::uint64_t queries_executed = 0;

  // Data freshness: commit time -> visible-to-analytics time.
  std::uint64_t freshness_samples = 0;
  double freshness_mean_us = 0.0;
  double freshness_p99_us = 0.0;

  // Update shipping rounds (merge + route) and replica update application.
  std::uint64_t ship_rounds = 0;
  std::uint64_t shipped_entries = 0;
  std::uint64_t orphan_updates = 0;
  double ship_mean_us = 0.0;
  std::uint64_t applied_batches = 0;
  double apply_mean_us = 0.0;

  // Replica maintenance work.
  std::uint64_t dict_lookups = 0;
  std::uint64_t merge_comparisons = 0;

  // Analytical data placement.
  std::uint64_t local_column_accesses = 0;
  std::uint64_t remote_column_accesses = 0;
  std::uint64_t local_dict_accesses = 0;
  std::uint64_t remote_dict_accesses = 0;
  std::uint64_t steals_in_group = 0;
  std::uint64_t steals_cross_group = 0;
  std::uint64_t tasks_executed = 0;

  // Snapshot-copy engines: bytes deep-copied for query isolation.
  std::uint64_t snapshot_bytes = 0;
  // Version-chain engines: chain entries examined / values materialized.
  std::uint64_t mvcc_steps = 0;
  std::uint64_t mvcc_reads = 0;

  // Column-snapshot sharing.
  std::uint64_t snapshots_created = 0;
  std::uint64_t snapshots_shared = 0;

  std::uint64_t local_accesses() const { return local_column_accesses + local_dict_accesses; }
  std::uint64_t remote_accesses() const { return remote_column_accesses + remote_dict_accesses; }
};

// Thread-safe accumulator for the sample-based metrics (freshness, ship and
// apply latencies). Counter-style metrics live in their owning components;
// engines combine both into a MetricsSnapshot.
class MetricsCollector {
 public:
  void record_freshness_us(const std::vector<double>& samples);
  void record_ship_us(double micros);
  void record_apply_us(double micros);

  // Fills the freshness/ship/apply portion of a snapshot.
  void fill(MetricsSnapshot& out) const;
  void reset();

 private:
  mutable std::mutex mutex_;
  std::vector<double> freshness_us_;
  double ship_total_us_ = 0.0;
  std::uint64_t ship_count_ = 0;
  double apply_total_us_ = 0.0;
  std::uint64_t apply_count_ = 0;
};

// p-quantile (0 <= p <= 1) with linear interpolation; 0 for empty input.
double quantile(std::vector<double> samples, double p);

}  // namespace islanddb
