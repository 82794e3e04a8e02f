#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "islanddb/engine.hpp"
#include "islanddb/workload.hpp"
#include "support/oracles.hpp"

using namespace islanddb;
using islanddb::testing::TableSnapshot;
using islanddb::testing::reference_eval;

namespace {

Value column_sum(const RowStore& store, ColumnId c) {
  Value total = 0;
  for (const RowId r : store.sorted_row_ids()) total += store.field(r, c);
  return total;
}

bool same_ops(const std::vector<TxnOp>& a, const std::vector<TxnOp>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != b[i].kind || a[i].table != b[i].table || a[i].row != b[i].row ||
        a[i].column != b[i].column || a[i].value != b[i].value || a[i].tuple != b[i].tuple) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("synthetic streams are pure functions of (spec, thread, index)") {
  SyntheticSpec spec;
  spec.tables = 3;
  spec.rows_per_table = 500;
  spec.txn_threads = 4;
  spec.seed = 11;
  const SyntheticWorkload a(spec);
  const SyntheticWorkload b(spec);

  for (std::uint32_t t = 0; t < 4; ++t) {
    for (std::uint64_t i = 0; i < 50; ++i) {
      CHECK(same_ops(a.txn_ops(t, i), b.txn_ops(t, i)));
    }
  }
  for (TableId t = 0; t < 3; ++t) CHECK(a.initial_rows(t) == b.initial_rows(t));

  SyntheticSpec other = spec;
  other.seed = 12;
  const SyntheticWorkload c(other);
  bool any_difference = false;
  for (std::uint64_t i = 0; i < 20 && !any_difference; ++i) {
    any_difference = !same_ops(a.txn_ops(0, i), c.txn_ops(0, i));
  }
  CHECK(any_difference);
}

TEST_CASE("synthetic writes partition rows by thread so schedules cannot matter") {
  SyntheticSpec spec;
  spec.txn_threads = 4;
  spec.rows_per_table = 1000;
  spec.write_ratio = 0.9;
  const SyntheticWorkload w(spec);

  std::uint64_t writes = 0;
  for (std::uint32_t thread = 0; thread < 4; ++thread) {
    for (std::uint64_t i = 0; i < 300; ++i) {
      for (const TxnOp& op : w.txn_ops(thread, i)) {
        if (op.kind == TxnOpKind::Modify) {
          ++writes;
          CHECK(op.row % 4 == thread);
          CHECK(op.row < spec.rows_per_table);
        }
      }
    }
  }
  CHECK(writes > 1000);  // the 0.9 write ratio must actually produce writes
}

TEST_CASE("synthetic queries and values stay inside their declared domains") {
  SyntheticSpec spec;
  spec.tables = 4;
  spec.columns_per_table = 4;
  spec.rows_per_table = 200;
  spec.value_domain = 5000;
  const SyntheticWorkload w(spec);
  const std::vector<TableSchema> schemas = w.schemas();
  REQUIRE(schemas.size() == 4);

  for (TableId t = 0; t < 4; ++t) {
    for (const auto& row : w.initial_rows(t)) {
      REQUIRE(row.size() == 4);
      CHECK(row[0] < 100);  // join-key column is low cardinality
      for (const Value v : row) {
        CHECK(v >= 0);
        CHECK(v < 5000);
      }
    }
  }

  bool saw_join = false;
  bool saw_scan = false;
  for (std::uint64_t i = 0; i < 40; ++i) {
    const QuerySpec q = w.query(i);
    CHECK_NOTHROW(plan_query(q, schemas));
    (q.join ? saw_join : saw_scan) = true;
    if (q.join) CHECK(q.join->build_table != q.table);
  }
  CHECK(saw_join);
  CHECK(saw_scan);
}

TEST_CASE("workload specs reject degenerate parameters") {
  SyntheticSpec syn;
  syn.rows_per_table = 0;
  CHECK_THROWS_AS(SyntheticWorkload{syn}, ConfigError);
  syn = SyntheticSpec{};
  syn.min_ops = 5;
  syn.max_ops = 2;
  CHECK_THROWS_AS(SyntheticWorkload{syn}, ConfigError);

  TpccSpec tpcc;
  tpcc.items = 0;
  CHECK_THROWS_AS(TpccWorkload{tpcc}, ConfigError);
  tpcc = TpccSpec{};
  tpcc.min_order_lines = 20;
  tpcc.max_order_lines = 10;
  CHECK_THROWS_AS(TpccWorkload{tpcc}, ConfigError);

  Tpch6Spec scan;
  scan.rows = 0;
  CHECK_THROWS_AS(Tpch6Workload{scan}, ConfigError);
}

TEST_CASE("the order-entry mix alternates payment and new-order exactly") {
  const TpccWorkload w{TpccSpec{}};
  int payments = 0;
  int new_orders = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const std::vector<TxnOp> ops = w.txn_ops(0, i);
    REQUIRE(!ops.empty());
    if (ops.back().table == TpccWorkload::kHistory) {
      ++payments;
      REQUIRE(ops.size() == 6);
      CHECK(ops[0].kind == TxnOpKind::Add);
      CHECK(ops[0].table == TpccWorkload::kWarehouse);
    } else {
      ++new_orders;
      CHECK(ops[1].table == TpccWorkload::kOrders);
      CHECK(ops[2].table == TpccWorkload::kNewOrder);
    }
  }
  CHECK(payments == 500);
  CHECK(new_orders == 500);

  // Order keys derive from (thread, index), never from execution state.
  const std::vector<TxnOp> order = w.txn_ops(3, 5);
  CHECK(order[1].tuple[2] == 3LL * 1000000000LL + 5);
}

TEST_CASE("1000 order-entry transactions move money and stock consistently") {
  const TpccWorkload w{TpccSpec{}};

  TxnEngine txn({1, true, nullptr});
  for (const TableSchema& s : w.schemas()) txn.create_table(s);
  for (TableId t = 0; t < TpccWorkload::kTableCount; ++t) {
    txn.load_rows(t, w.initial_rows(t));
  }

  Value paid_total = 0;
  Value qty_total = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const std::vector<TxnOp> ops = w.txn_ops(0, i);
    const TxnResult r = txn.execute_txn(0, ops);
    REQUIRE(r.committed);
    for (const TxnOp& op : ops) {
      if (op.kind == TxnOpKind::Add && op.table == TpccWorkload::kWarehouse) {
        paid_total += op.value;
      }
      if (op.kind == TxnOpKind::Insert && op.table == TpccWorkload::kOrderLine) {
        qty_total += op.tuple[3];
      }
    }
  }
  CHECK(txn.committed_count() == 1000);
  CHECK(txn.aborted_count() == 0);

  const RowStore& orders = txn.table(TpccWorkload::kOrders);
  const RowStore& lines = txn.table(TpccWorkload::kOrderLine);
  CHECK(orders.sorted_row_ids().size() == 500);
  CHECK(txn.table(TpccWorkload::kNewOrder).sorted_row_ids().size() == 500);
  CHECK(txn.table(TpccWorkload::kHistory).sorted_row_ids().size() == 500);
  CHECK(column_sum(orders, 3) == static_cast<Value>(lines.sorted_row_ids().size()));

  // Every payment lands once in the warehouse, district, customer, and
  // history views of the same money.
  const TpccSpec& spec = w.spec();
  CHECK(column_sum(txn.table(TpccWorkload::kWarehouse), 0) == paid_total);
  CHECK(column_sum(txn.table(TpccWorkload::kDistrict), 2) == paid_total);
  CHECK(column_sum(txn.table(TpccWorkload::kCustomer), 3) == paid_total);
  CHECK(column_sum(txn.table(TpccWorkload::kHistory), 1) == paid_total);
  const Value customers =
      static_cast<Value>(spec.warehouses) * spec.districts_per_warehouse *
      spec.customers_per_district;
  CHECK(column_sum(txn.table(TpccWorkload::kCustomer), 2) == customers * 1000 - paid_total);

  // New orders advance district sequence numbers and drain stock.
  const Value districts = static_cast<Value>(spec.warehouses) * spec.districts_per_warehouse;
  CHECK(column_sum(txn.table(TpccWorkload::kDistrict), 3) == districts + 500);
  const RowStore& stock = txn.table(TpccWorkload::kStock);
  const Value stock_rows = static_cast<Value>(stock.sorted_row_ids().size());
  CHECK(column_sum(stock, 2) == stock_rows * 100 - qty_total);
  CHECK(column_sum(stock, 3) == qty_total);
  CHECK(column_sum(stock, 4) == static_cast<Value>(lines.sorted_row_ids().size()));

  const std::vector<TableSchema> schemas = w.schemas();
  for (std::uint64_t i = 0; i < 9; ++i) CHECK_NOTHROW(plan_query(w.query(i), schemas));
}

TEST_CASE("the band-filter revenue query matches a hand-computed 10-row oracle") {
  const Tpch6Workload w{Tpch6Spec{}};
  const QuerySpec q = w.query();

  // {shipdate, discount, quantity, extendedprice}; band edges are inclusive
  // for dates and discounts, exclusive at quantity 24.
  TableSnapshot snap;
  snap.rows = {
      {8766, 5, 1, 1000},   // on the lower date edge: counts, 5 * 1000
      {9130, 7, 23, 2000},  // on every upper edge: counts, 7 * 2000
      {8765, 6, 10, 3000},  // shipped one day early
      {9131, 6, 10, 3000},  // shipped one day late
      {9000, 4, 10, 3000},  // discount below the band
      {9000, 8, 10, 3000},  // discount above the band
      {9000, 6, 24, 3000},  // quantity at the exclusive limit
      {9000, 6, 23, 5000},  // counts, 6 * 5000
      {9000, 5, 1, 100},    // counts, 5 * 100
      {8900, 7, 22, 10},    // counts, 7 * 10
  };
  const std::vector<Value> got = reference_eval(q, {snap});
  CHECK(got == std::vector<Value>({49570, 5}));

  // The same 10 rows through a full engine produce the same answer.
  EngineConfig cfg;
  cfg.txn_threads = 1;
  cfg.topology.vaults = 4;
  cfg.topology.vault_group_size = 2;
  cfg.topology.workers_per_vault = 1;
  auto engine = build_engine(cfg);
  engine->create_table(w.schemas()[0]);
  engine->load_rows(0, snap.rows);
  engine->start();
  CHECK(engine->submit_query(q).aggregates == std::vector<Value>({49570, 5}));
  engine->stop();
}

TEST_CASE("generated line items stay in range and the empty band returns zero") {
  const Tpch6Workload w{Tpch6Spec{6000, 42}};
  const std::vector<std::vector<Value>> rows = w.initial_rows(0);
  REQUIRE(rows.size() == 6000);
  for (const auto& r : rows) {
    CHECK((r[0] >= 8035 && r[0] <= 9860));
    CHECK((r[1] >= 0 && r[1] <= 10));
    CHECK((r[2] >= 1 && r[2] <= 50));
    CHECK((r[3] >= 100 && r[3] <= 100000));
  }

  TableSnapshot snap;
  snap.rows = rows;
  const std::vector<Value> want = reference_eval(w.query(), {snap});
  CHECK(want[1] > 0);  // the band must select something in 6000 rows

  EngineConfig cfg;
  cfg.txn_threads = 1;
  cfg.topology.vaults = 4;
  cfg.topology.vault_group_size = 2;
  cfg.topology.workers_per_vault = 1;
  auto engine = build_engine(cfg);
  engine->create_table(w.schemas()[0]);
  engine->load_rows(0, rows);
  engine->start();
  CHECK(engine->submit_query(w.query()).aggregates == want);

  QuerySpec empty = w.query();
  empty.predicates[0] = Predicate::between(Tpch6Workload::kShipDate, 20000, 20001);
  CHECK(engine->submit_query(empty).aggregates == std::vector<Value>({0, 0}));
  CHECK(reference_eval(empty, {snap}) == std::vector<Value>({0, 0}));
  engine->stop();
}
