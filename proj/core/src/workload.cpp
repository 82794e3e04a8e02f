#include "islanddb/workload.hpp"

#include <random>
#include <string>

namespace islanddb {
namespace {

// Independent deterministic stream per (seed, purpose, a, b).
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t a = 0,
                       std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(seed ^ (purpose * 0x9e3779b97f4a7c15ULL));
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return std::mt19937_64(s);
}

std::uint64_t pick(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi_inclusive) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi_inclusive)(rng);
}

bool chance(std::mt19937_64& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

constexpr std::uint64_t kSynInit = 1;
constexpr std::uint64_t kSynTxn = 2;
constexpr std::uint64_t kSynQuery = 3;
constexpr Value kJoinKeyDomain = 100;  // column 0 cardinality, keeps joins productive

}  // namespace

SyntheticWorkload::SyntheticWorkload(SyntheticSpec spec) : spec_(spec) {
  if (spec_.tables == 0 || spec_.columns_per_table == 0 || spec_.rows_per_table == 0) {
    throw ConfigError("synthetic workload needs at least one table, column, and row");
  }
  if (spec_.txn_threads == 0) throw ConfigError("synthetic workload needs txn threads");
  if (spec_.min_ops == 0 || spec_.min_ops > spec_.max_ops) {
    throw ConfigError("synthetic op count range is invalid");
  }
  if (spec_.value_domain <= 0) throw ConfigError("value domain must be positive");
}

Value SyntheticWorkload::column_value(ColumnId column, std::uint64_t raw) const {
  const Value domain = column == 0 ? kJoinKeyDomain : spec_.value_domain;
  return static_cast<Value>(raw % static_cast<std::uint64_t>(domain));
}

std::vector<TableSchema> SyntheticWorkload::schemas() const {
  std::vector<TableSchema> out;
  for (std::uint32_t t = 0; t < spec_.tables; ++t) {
    TableSchema s;
    s.name = "syn" + std::to_string(t);
    for (std::uint32_t c = 0; c < spec_.columns_per_table; ++c) {
      s.columns.push_back({"c" + std::to_string(c), LogicalType::Int64});
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<Value>> SyntheticWorkload::initial_rows(TableId table) const {
  auto rng = stream(spec_.seed, kSynInit, table);
  std::vector<std::vector<Value>> rows;
  rows.reserve(spec_.rows_per_table);
  for (std::uint64_t r = 0; r < spec_.rows_per_table; ++r) {
    std::vector<Value> tuple;
    tuple.reserve(spec_.columns_per_table);
    for (std::uint32_t c = 0; c < spec_.columns_per_table; ++c) {
      tuple.push_back(column_value(c, rng()));
    }
    rows.push_back(std::move(tuple));
  }
  return rows;
}

std::vector<TxnOp> SyntheticWorkload::txn_ops(std::uint32_t thread, std::uint64_t index) const {
  auto rng = stream(spec_.seed, kSynTxn, thread, index);
  const std::uint32_t count =
      static_cast<std::uint32_t>(pick(rng, spec_.min_ops, spec_.max_ops));
  const std::uint64_t threads = spec_.txn_threads;
  // Rows owned by `thread`: row = thread + k * threads.
  const std::uint64_t owned = (spec_.rows_per_table + threads - 1 - thread) / threads;

  std::vector<TxnOp> ops;
  ops.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const TableId table = static_cast<TableId>(pick(rng, 0, spec_.tables - 1));
    const ColumnId column = static_cast<ColumnId>(pick(rng, 0, spec_.columns_per_table - 1));
    if (chance(rng, spec_.write_ratio) && owned > 0) {
      const RowId row = thread + pick(rng, 0, owned - 1) * threads;
      ops.push_back(TxnOp::modify(table, row, column, column_value(column, rng())));
    } else {
      const RowId row = pick(rng, 0, spec_.rows_per_table - 1);
      ops.push_back(TxnOp::read(table, row, column));
    }
  }
  return ops;
}

QuerySpec SyntheticWorkload::query(std::uint64_t index) const {
  auto rng = stream(spec_.seed, kSynQuery, index);
  QuerySpec q;
  q.table = static_cast<TableId>(pick(rng, 0, spec_.tables - 1));

  const bool join = spec_.tables >= 2 && chance(rng, spec_.join_fraction);
  const auto band = [&](ColumnId c) {
    const Value domain = c == 0 ? kJoinKeyDomain : spec_.value_domain;
    const Value width = std::max<Value>(1, domain / 5);
    const Value lo = static_cast<Value>(pick(rng, 0, static_cast<std::uint64_t>(domain - 1)));
    return Predicate::between(c, lo, std::min<Value>(domain - 1, lo + width));
  };

  // Predicates stay off column 0, which serves as the join key.
  const ColumnId filter_col =
      spec_.columns_per_table == 1
          ? 0
          : static_cast<ColumnId>(pick(rng, 1, spec_.columns_per_table - 1));
  q.predicates.push_back(band(filter_col));

  const ColumnId agg_col = static_cast<ColumnId>(pick(rng, 0, spec_.columns_per_table - 1));
  q.aggregates.push_back(AggregateSpec::count());
  q.aggregates.push_back(AggregateSpec::sum(agg_col));

  if (join) {
    TableId build = static_cast<TableId>(pick(rng, 0, spec_.tables - 2));
    if (build >= q.table) ++build;  // distinct from the probe table
    JoinClause j;
    j.build_table = build;
    j.probe_key = 0;
    j.build_key = 0;
    if (spec_.columns_per_table > 1) {
      const ColumnId bc = static_cast<ColumnId>(pick(rng, 1, spec_.columns_per_table - 1));
      j.build_predicates.push_back(band(bc));
      q.aggregates.push_back(AggregateSpec::sum(bc, AggregateSpec::Side::Build));
    }
    q.join = std::move(j);
  } else {
    q.aggregates.push_back(AggregateSpec::max(agg_col));
  }
  return q;
}

Tpch6Workload::Tpch6Workload(Tpch6Spec spec) : spec_(spec) {
  if (spec_.rows == 0) throw ConfigError("line-item table needs rows");
}

std::vector<TableSchema> Tpch6Workload::schemas() const {
  TableSchema s;
  s.name = "lineitem";
  s.columns = {{"shipdate", LogicalType::Date},
               {"discount", LogicalType::Decimal},
               {"quantity", LogicalType::Int64},
               {"extendedprice", LogicalType::Decimal}};
  return {s};
}

std::vector<std::vector<Value>> Tpch6Workload::initial_rows(TableId table) const {
  if (table != 0) throw ConfigError("the line-item workload has one table");
  auto rng = stream(spec_.seed, 11);
  std::vector<std::vector<Value>> rows;
  rows.reserve(spec_.rows);
  for (std::uint64_t r = 0; r < spec_.rows; ++r) {
    // Ship dates are day numbers spanning 1992-01-01..1996-12-30; the query
    // band below selects calendar year 1994. Discounts are integer percent.
    const Value shipdate = static_cast<Value>(pick(rng, 8035, 9860));
    const Value discount = static_cast<Value>(pick(rng, 0, 10));
    const Value quantity = static_cast<Value>(pick(rng, 1, 50));
    const Value price = static_cast<Value>(pick(rng, 100, 100000));
    rows.push_back({shipdate, discount, quantity, price});
  }
  return rows;
}

QuerySpec Tpch6Workload::query() const {
  QuerySpec q;
  q.table = 0;
  q.predicates = {
      Predicate::between(kShipDate, 8766, 9130),  // 1994-01-01 <= d < 1995-01-01
      Predicate::between(kDiscount, 5, 7),
      Predicate::lt(kQuantity, 24),
  };
  q.aggregates = {AggregateSpec::sum_product(kExtendedPrice, kDiscount),
                  AggregateSpec::count()};
  return q;
}

}  // namespace islanddb
