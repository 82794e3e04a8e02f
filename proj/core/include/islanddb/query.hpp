#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "islanddb/schema.hpp"
#include "islanddb/types.hpp"

namespace islanddb {

// Conjunctive predicate over one column. Between is inclusive on both ends.
struct Predicate {
  enum class Op : std::uint8_t { Lt, Le, Gt, Ge, Eq, Between };

  ColumnId column = 0;
  Op op = Op::Lt;
  Value a = 0;
  Value b = 0;

  static Predicate lt(ColumnId c, Value v) { return {c, Op::Lt, v, 0}; }
  static Predicate le(ColumnId c, Value v) { return {c, Op::Le, v, 0}; }
  static Predicate gt(ColumnId c, Value v) { return {c, Op::Gt, v, 0}; }
  static Predicate ge(ColumnId c, Value v) { return {c, Op::Ge, v, 0}; }
  static Predicate eq(ColumnId c, Value v) { return {c, Op::Eq, v, 0}; }
  static Predicate between(ColumnId c, Value lo, Value hi) { return {c, Op::Between, lo, hi}; }
};

// Aggregates are commutative over the selected rows, so any task execution
// order produces the same result. For joins, Side picks which input table the
// aggregate column comes from; min/max are probe-side only.
struct AggregateSpec {
  enum class Kind : std::uint8_t { Count, Sum, Min, Max, SumProduct };
  enum class Side : std::uint8_t { Probe, Build };

  Kind kind = Kind::Count;
  Side side = Side::Probe;
  ColumnId column = 0;
  ColumnId column2 = 0;  // SumProduct only

  static AggregateSpec count() { return {Kind::Count, Side::Probe, 0, 0}; }
  static AggregateSpec sum(ColumnId c, Side s = Side::Probe) { return {Kind::Sum, s, c, 0}; }
  static AggregateSpec min(ColumnId c) { return {Kind::Min, Side::Probe, c, 0}; }
  static AggregateSpec max(ColumnId c) { return {Kind::Max, Side::Probe, c, 0}; }
  static AggregateSpec sum_product(ColumnId c1, ColumnId c2) {
    return {Kind::SumProduct, Side::Probe, c1, c2};
  }
};

// Equi-join: spec.table is the probe side, `build_table` is hashed.
struct JoinClause {
  TableId build_table = 0;
  ColumnId probe_key = 0;
  ColumnId build_key = 0;
  std::vector<Predicate> build_predicates;
};

// Structured query description: one table scan with conjunctive filters and
// aggregates, optionally joined against a second filtered table.
struct QuerySpec {
  TableId table = 0;
  std::vector<Predicate> predicates;
  std::optional<JoinClause> join;
  std::vector<AggregateSpec> aggregates;
};

struct PlanNode {
  enum class Kind : std::uint8_t { Scan, Filter, HashJoin, Aggregate };

  Kind kind = Kind::Scan;
  TableId table = 0;
  std::vector<std::unique_ptr<PlanNode>> children;
};

struct QueryPlan {
  QuerySpec spec;
  std::unique_ptr<PlanNode> root;
  // Every column the execution reads; the pin set for snapshot acquisition.
  std::vector<ColumnKey> referenced_columns;
};

// Validates the description against the schemas and builds the operator
// tree: scan -> filter -> aggregate, with a hash join of two filtered scan
// subtrees in between when a second table is involved.
QueryPlan plan_query(const QuerySpec& spec, const std::vector<TableSchema>& schemas);

struct QueryResult {
  std::vector<Value> aggregates;  // one slot per AggregateSpec, in spec order
  CommitId cutoff = 0;
  std::uint64_t tasks_executed = 0;
};

}  // namespace islanddb
