#include "islanddb/query.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace islanddb {
namespace {

const TableSchema& schema_for(const std::vector<TableSchema>& schemas, TableId table) {
  if (table >= schemas.size()) {
    throw PlanError("query references unknown table " + std::to_string(table));
  }
  return schemas[table];
}

void check_column(const TableSchema& schema, TableId table, ColumnId column) {
  if (column >= schema.columns.size()) {
    throw PlanError("query references unknown column " + std::to_string(column) +
                    " of table " + std::to_string(table));
  }
}

void check_predicates(const TableSchema& schema, TableId table,
                      const std::vector<Predicate>& preds) {
  for (const Predicate& p : preds) {
    check_column(schema, table, p.column);
    if (p.op == Predicate::Op::Between && p.a > p.b) {
      throw PlanError("between predicate has lower bound above upper bound");
    }
  }
}

std::unique_ptr<PlanNode> make_node(PlanNode::Kind kind, TableId table) {
  auto node = std::make_unique<PlanNode>();
  node->kind = kind;
  node->table = table;
  return node;
}

}  // namespace

QueryPlan plan_query(const QuerySpec& spec, const std::vector<TableSchema>& schemas) {
  const TableSchema& probe = schema_for(schemas, spec.table);
  check_predicates(probe, spec.table, spec.predicates);

  const TableSchema* build = nullptr;
  if (spec.join) {
    build = &schema_for(schemas, spec.join->build_table);
    check_column(probe, spec.table, spec.join->probe_key);
    check_column(*build, spec.join->build_table, spec.join->build_key);
    check_predicates(*build, spec.join->build_table, spec.join->build_predicates);
  }

  if (spec.aggregates.empty()) {
    throw PlanError("query has no aggregates");
  }
  for (const AggregateSpec& agg : spec.aggregates) {
    if (agg.side == AggregateSpec::Side::Build && !spec.join) {
      throw PlanError("build-side aggregate on a single-table query");
    }
    const bool needs_column = agg.kind != AggregateSpec::Kind::Count;
    if (needs_column) {
      if (agg.side == AggregateSpec::Side::Build) {
        check_column(*build, spec.join->build_table, agg.column);
      } else {
        check_column(probe, spec.table, agg.column);
      }
    }
    if (agg.kind == AggregateSpec::Kind::SumProduct) {
      if (agg.side == AggregateSpec::Side::Build) {
        throw PlanError("sum-product aggregates are probe-side only");
      }
      check_column(probe, spec.table, agg.column2);
    }
    if ((agg.kind == AggregateSpec::Kind::Min || agg.kind == AggregateSpec::Kind::Max) &&
        agg.side == AggregateSpec::Side::Build) {
      // Build rows fold into per-key counts and sums before probing, which
      // cannot reproduce an extremum over the joined pairs.
      throw PlanError("min/max aggregates are probe-side only");
    }
  }

  QueryPlan plan;
  plan.spec = spec;

  // Pin set: every column the execution touches, plus column 0 of each
  // involved table so row liveness is always observable.
  std::set<ColumnKey> keys;
  keys.insert(ColumnKey{spec.table, 0});
  for (const Predicate& p : spec.predicates) keys.insert(ColumnKey{spec.table, p.column});
  if (spec.join) {
    keys.insert(ColumnKey{spec.join->build_table, 0});
    keys.insert(ColumnKey{spec.table, spec.join->probe_key});
    keys.insert(ColumnKey{spec.join->build_table, spec.join->build_key});
    for (const Predicate& p : spec.join->build_predicates) {
      keys.insert(ColumnKey{spec.join->build_table, p.column});
    }
  }
  for (const AggregateSpec& agg : spec.aggregates) {
    if (agg.kind == AggregateSpec::Kind::Count) continue;
    const TableId t = agg.side == AggregateSpec::Side::Build ? spec.join->build_table : spec.table;
    keys.insert(ColumnKey{t, agg.column});
    if (agg.kind == AggregateSpec::Kind::SumProduct) keys.insert(ColumnKey{spec.table, agg.column2});
  }
  plan.referenced_columns.assign(keys.begin(), keys.end());

  auto probe_scan = make_node(PlanNode::Kind::Scan, spec.table);
  auto probe_filter = make_node(PlanNode::Kind::Filter, spec.table);
  probe_filter->children.push_back(std::move(probe_scan));

  auto root = make_node(PlanNode::Kind::Aggregate, spec.table);
  if (spec.join) {
    auto build_scan = make_node(PlanNode::Kind::Scan, spec.join->build_table);
    auto build_filter = make_node(PlanNode::Kind::Filter, spec.join->build_table);
    build_filter->children.push_back(std::move(build_scan));

    auto join = make_node(PlanNode::Kind::HashJoin, spec.table);
    join->children.push_back(std::move(probe_filter));
    join->children.push_back(std::move(build_filter));
    root->children.push_back(std::move(join));
  } else {
    root->children.push_back(std::move(probe_filter));
  }
  plan.root = std::move(root);
  return plan;
}

}  // namespace islanddb
