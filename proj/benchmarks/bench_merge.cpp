// Microbenchmarks for the update-shipping path: the commit-ordered k-way
// merge of per-thread logs and the routing of merged rounds to per-column
// buffers. Both mutate their inputs (consumption cursors, target index), so
// they rebuild state outside the measured window and report manual time.

#include <benchmark/benchmark.h>

#include <chrono>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "islanddb/shipping.hpp"
#include "islanddb/topology.hpp"
#include "islanddb/update_log.hpp"

namespace {

using namespace islanddb;
using Clock = std::chrono::steady_clock;

// Fills `logs` with whole commits round-robined by a seeded coin, entries in
// commit order per log — the exact shape transaction workers produce.
std::uint64_t fill_logs(std::vector<std::unique_ptr<UpdateLog>>& logs, std::uint64_t commits,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uint64_t entries = 0;
  for (CommitId c = 1; c <= commits; ++c) {
    UpdateLog& log = *logs[rng() % logs.size()];
    const int count = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < count; ++e) {
      UpdateLogEntry entry;
      entry.commit_id = c;
      entry.kind = rng() % 8 == 0 ? UpdateKind::Insert : UpdateKind::Modify;
      entry.payload = static_cast<Value>(rng() % 100000);
      entry.key = RecordKey{0, static_cast<RowId>(rng() % 65536), static_cast<ColumnId>(rng() % 4)};
      log.append(entry);
      ++entries;
    }
  }
  return entries;
}

// Draining k-way merge of fresh logs. Args: {log count, commits}.
void BM_MergeLogs(benchmark::State& state) {
  const auto log_count = static_cast<std::size_t>(state.range(0));
  const auto commits = static_cast<std::uint64_t>(state.range(1));

  std::uint64_t entries = 0;
  for (auto _ : state) {
    std::vector<std::unique_ptr<UpdateLog>> logs;
    for (std::size_t i = 0; i < log_count; ++i) logs.push_back(std::make_unique<UpdateLog>());
    entries = fill_logs(logs, commits, 23);
    std::vector<UpdateLog*> ptrs;
    for (auto& log : logs) ptrs.push_back(log.get());

    const auto start = Clock::now();
    std::uint64_t merged = 0;
    for (;;) {
      const FinalLog round = merge_logs(ptrs, commits);
      if (round.entries.empty()) break;
      merged += round.entries.size();
    }
    state.SetIterationTime(std::chrono::duration<double>(Clock::now() - start).count());
    benchmark::DoNotOptimize(merged);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(entries));
}
BENCHMARK(BM_MergeLogs)
    ->UseManualTime()
    ->Args({2, 1 << 14})
    ->Args({8, 1 << 14})
    ->Args({32, 1 << 14});

// Routing one merged round into per-column buffers through the record
// location index. Arg: entries per round.
void BM_RouteFinalLog(benchmark::State& state) {
  const auto entries = static_cast<std::uint64_t>(state.range(0));
  const TopologyModel topo(TopologyConfig{16, 4, 1, 1024, Placement::Hybrid, 0});

  std::mt19937_64 rng(29);
  FinalLog round;
  for (std::uint64_t i = 0; i < entries; ++i) {
    UpdateLogEntry entry;
    entry.commit_id = 1 + i / 4;
    // Half the modifies hit preregistered rows, the rest are inserts.
    const bool insert = rng() % 2 == 0;
    entry.kind = insert ? UpdateKind::Insert : UpdateKind::Modify;
    entry.payload = static_cast<Value>(rng() % 100000);
    const RowId row = insert ? 100000 + i : rng() % 4096;
    entry.key = RecordKey{0, row, static_cast<ColumnId>(rng() % 4)};
    round.entries.push_back(entry);
  }

  for (auto _ : state) {
    TargetIndex index(&topo, 8192);
    index.register_table(0, 4);
    for (RowId r = 0; r < 4096; ++r) index.register_row(0, r);

    const auto start = Clock::now();
    RouteResult routed = route_final_log(round, index, topo);
    state.SetIterationTime(std::chrono::duration<double>(Clock::now() - start).count());
    benchmark::DoNotOptimize(routed.batches);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(entries));
}
BENCHMARK(BM_RouteFinalLog)->UseManualTime()->Arg(1024)->Arg(16384);

}  // namespace

BENCHMARK_MAIN();
