// Microbenchmarks for the columnar storage hot paths: dictionary encode,
// decode, and random access through the bit-packed code vector.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "islanddb/column.hpp"

namespace {

using islanddb::decode_column;
using islanddb::encode_column;
using islanddb::EncodeResult;
using islanddb::PackedCodeVector;
using islanddb::Value;

std::vector<Value> random_values(std::uint64_t n, std::uint64_t cardinality, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Value> values(n);
  for (auto& v : values) v = static_cast<Value>(rng() % cardinality);
  return values;
}

// Dictionary build + re-encode of a full column. Args: {rows, cardinality}.
void BM_EncodeColumn(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const auto cardinality = static_cast<std::uint64_t>(state.range(1));
  const std::vector<Value> values = random_values(n, cardinality, 17);

  for (auto _ : state) {
    EncodeResult result = encode_column(values);
    benchmark::DoNotOptimize(result.column.codes);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
  state.counters["code_bits"] = static_cast<double>(
      encode_column(values).column.codes.width_bits());
}
BENCHMARK(BM_EncodeColumn)
    ->Args({int64_t{1} << 14, 16})
    ->Args({int64_t{1} << 14, 1 << 16})
    ->Args({int64_t{1} << 18, 16})
    ->Args({int64_t{1} << 18, 1 << 16});

// Full-column decode back to values. Args: {rows, cardinality}.
void BM_DecodeColumn(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const auto cardinality = static_cast<std::uint64_t>(state.range(1));
  const EncodeResult encoded = encode_column(random_values(n, cardinality, 18));

  for (auto _ : state) {
    std::vector<Value> decoded = decode_column(encoded.dictionary, encoded.column);
    benchmark::DoNotOptimize(decoded);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_DecodeColumn)
    ->Args({int64_t{1} << 18, 16})
    ->Args({int64_t{1} << 18, 1 << 16});

// Sequential scan through packed codes, the inner loop of every filter
// task. Arg: code width in bits.
void BM_PackedScan(benchmark::State& state) {
  const auto width = static_cast<std::uint32_t>(state.range(0));
  constexpr std::uint64_t kCodes = 1 << 18;
  PackedCodeVector codes(width);
  std::mt19937_64 rng(19);
  for (std::uint64_t i = 0; i < kCodes; ++i) {
    codes.push_back(static_cast<std::uint32_t>(rng()) & ((1u << width) - 1));
  }

  for (auto _ : state) {
    std::uint64_t sum = 0;
    for (std::uint64_t i = 0; i < kCodes; ++i) sum += codes.get(i);
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(kCodes));
}
BENCHMARK(BM_PackedScan)->Arg(4)->Arg(12)->Arg(21);

}  // namespace

BENCHMARK_MAIN();
