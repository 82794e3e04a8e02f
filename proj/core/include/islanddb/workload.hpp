#pragma once

#include <cstdint>
#include <vector>

#include "islanddb/query.hpp"
#include "islanddb/schema.hpp"
#include "islanddb/txn_engine.hpp"
#include "islanddb/types.hpp"

namespace islanddb {

// All generators are pure functions of (spec, thread, index): re-running any
// of them yields the identical op/query stream, so two engines fed the same
// streams must converge to the same logical state.

struct SyntheticSpec {
  std::uint32_t tables = 4;
  std::uint32_t columns_per_table = 4;
  std::uint64_t rows_per_table = 10000;
  Value value_domain = 1000000;  // column 0 is kept low-cardinality for joins
  std::uint32_t txn_threads = 4;
  double write_ratio = 0.5;
  std::uint32_t min_ops = 2;
  std::uint32_t max_ops = 6;
  double join_fraction = 0.3;
  std::uint64_t seed = 1;
};

// Uniform random read/modify transactions plus filter/join aggregate queries.
// Writes of thread T touch only rows with row % txn_threads == T: per-row
// write order equals one thread's program order, so the final state is
// independent of scheduling.
class SyntheticWorkload {
 public:
  explicit SyntheticWorkload(SyntheticSpec spec);

  const SyntheticSpec& spec() const { return spec_; }
  std::vector<TableSchema> schemas() const;
  std::vector<std::vector<Value>> initial_rows(TableId table) const;
  std::vector<TxnOp> txn_ops(std::uint32_t thread, std::uint64_t index) const;
  QuerySpec query(std::uint64_t index) const;

 private:
  Value column_value(ColumnId column, std::uint64_t raw) const;
  SyntheticSpec spec_;
};

struct TpccSpec {
  std::uint32_t warehouses = 1;
  std::uint32_t districts_per_warehouse = 10;
  std::uint32_t customers_per_district = 30;
  std::uint32_t items = 100;
  std::uint32_t min_order_lines = 5;
  std::uint32_t max_order_lines = 15;
  std::uint64_t seed = 7;
};

// Reduced order-entry workload: payment and new-order transactions in strict
// alternation per thread. Monetary and stock counters move through
// read-modify-write ops; orders, order lines, and history records are
// inserted. Orders are keyed by (thread, index) so op streams never depend
// on execution state.
class TpccWorkload {
 public:
  static constexpr TableId kWarehouse = 0;
  static constexpr TableId kDistrict = 1;
  static constexpr TableId kCustomer = 2;
  static constexpr TableId kHistory = 3;
  static constexpr TableId kOrders = 4;
  static constexpr TableId kNewOrder = 5;
  static constexpr TableId kOrderLine = 6;
  static constexpr TableId kStock = 7;
  static constexpr TableId kItem = 8;
  static constexpr std::size_t kTableCount = 9;

  explicit TpccWorkload(TpccSpec spec);

  const TpccSpec& spec() const { return spec_; }
  std::vector<TableSchema> schemas() const;
  std::vector<std::vector<Value>> initial_rows(TableId table) const;
  std::vector<TxnOp> txn_ops(std::uint32_t thread, std::uint64_t index) const;
  QuerySpec query(std::uint64_t index) const;

  RowId district_row(std::uint32_t w, std::uint32_t d) const;
  RowId customer_row(std::uint32_t w, std::uint32_t d, std::uint32_t c) const;
  RowId stock_row(std::uint32_t w, std::uint32_t item) const;

 private:
  TpccSpec spec_;
  std::vector<Value> item_prices_;  // fixed at init; order-line amounts derive from them
};

struct Tpch6Spec {
  std::uint64_t rows = 60000;
  std::uint64_t seed = 42;
};

// One fact table of line items and the classic band-filter revenue query:
// date in one year, discount in a narrow band, small quantities, summing
// extendedprice * discount. Dates are day numbers; discounts integer percent.
class Tpch6Workload {
 public:
  static constexpr ColumnId kShipDate = 0;
  static constexpr ColumnId kDiscount = 1;
  static constexpr ColumnId kQuantity = 2;
  static constexpr ColumnId kExtendedPrice = 3;

  explicit Tpch6Workload(Tpch6Spec spec);

  const Tpch6Spec& spec() const { return spec_; }
  std::vector<TableSchema> schemas() const;
  std::vector<std::vector<Value>> initial_rows(TableId table) const;
  QuerySpec query() const;

 private:
  Tpch6Spec spec_;
};

}  // namespace islanddb
