// Microbenchmarks for replica update application: the merge-based path
// (linear in column size + batch size) against the rebuild-based path
// (decode, re-sort, re-encode everything). Both are pure functions of their
// inputs, so one prepared (column, batch) pair serves every iteration.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "islanddb/application.hpp"
#include "islanddb/column.hpp"

namespace {

using namespace islanddb;

struct PreparedCase {
  std::shared_ptr<const ColumnVersion> base;
  UpdateBatch batch;
};

PreparedCase prepare_case(std::uint64_t n, std::uint64_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  constexpr std::uint64_t kDomain = 65536;
  std::vector<Value> values(n);
  for (auto& v : values) v = static_cast<Value>(rng() % kDomain);

  PreparedCase c;
  c.base = make_column_version(1, 0, values, nullptr);
  c.batch.column = ColumnKey{0, 0};
  std::uint64_t next_offset = n;  // inserts extend the column densely
  for (std::uint64_t k = 0; k < m; ++k) {
    const std::uint64_t roll = rng() % 10;
    if (roll < 7) {
      c.batch.updates.push_back({rng() % n, UpdateKind::Modify,
                                 static_cast<Value>(rng() % kDomain),
                                 static_cast<CommitId>(k + 1),
                                 {}});
    } else {
      c.batch.updates.push_back({next_offset++, UpdateKind::Insert,
                                 static_cast<Value>(rng() % kDomain),
                                 static_cast<CommitId>(k + 1),
                                 {}});
    }
  }
  return c;
}

// Args: {column slots, batch updates}.
void BM_ApplyMerge(benchmark::State& state) {
  const PreparedCase c = prepare_case(static_cast<std::uint64_t>(state.range(0)),
                                      static_cast<std::uint64_t>(state.range(1)), 31);
  ApplyCounters counters;
  for (auto _ : state) {
    counters.reset();
    auto next = apply_batch(*c.base, c.batch, 2, 2.0, counters);
    benchmark::DoNotOptimize(next);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(1));
  state.counters["dict_lookups"] = static_cast<double>(counters.dict_lookups);
}
BENCHMARK(BM_ApplyMerge)
    ->Args({10000, 256})
    ->Args({10000, 4096})
    ->Args({100000, 256})
    ->Args({100000, 4096});

void BM_ApplyRebuild(benchmark::State& state) {
  const PreparedCase c = prepare_case(static_cast<std::uint64_t>(state.range(0)),
                                      static_cast<std::uint64_t>(state.range(1)), 31);
  ApplyCounters counters;
  for (auto _ : state) {
    counters.reset();
    auto next = naive_apply(*c.base, c.batch, 2, 2.0, counters);
    benchmark::DoNotOptimize(next);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(1));
  state.counters["dict_lookups"] = static_cast<double>(counters.dict_lookups);
}
BENCHMARK(BM_ApplyRebuild)
    ->Args({10000, 256})
    ->Args({10000, 4096})
    ->Args({100000, 256})
    ->Args({100000, 4096});

}  // namespace

BENCHMARK_MAIN();
