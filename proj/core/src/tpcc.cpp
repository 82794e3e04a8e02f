#include <random>
#include <string>

#include "islanddb/workload.hpp"

namespace islanddb {
namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t a = 0,
                       std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(seed ^ (purpose * 0xbf58476d1ce4e5b9ULL));
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return std::mt19937_64(s);
}

std::uint64_t pick(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi_inclusive) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi_inclusive)(rng);
}

constexpr std::uint64_t kInitItems = 1;
constexpr std::uint64_t kTxnStream = 2;
constexpr std::uint64_t kQueryStream = 3;

TableSchema make_schema(std::string name, std::initializer_list<const char*> cols) {
  TableSchema s;
  s.name = std::move(name);
  for (const char* c : cols) s.columns.push_back({c, LogicalType::Int64});
  return s;
}

}  // namespace

TpccWorkload::TpccWorkload(TpccSpec spec) : spec_(spec) {
  if (spec_.warehouses == 0 || spec_.districts_per_warehouse == 0 ||
      spec_.customers_per_district == 0 || spec_.items == 0) {
    throw ConfigError("order-entry workload scale factors must be positive");
  }
  if (spec_.min_order_lines == 0 || spec_.min_order_lines > spec_.max_order_lines) {
    throw ConfigError("order-line count range is invalid");
  }
  auto rng = stream(spec_.seed, kInitItems);
  item_prices_.reserve(spec_.items);
  for (std::uint32_t i = 0; i < spec_.items; ++i) {
    item_prices_.push_back(static_cast<Value>(pick(rng, 100, 10000)));  // cents
  }
}

RowId TpccWorkload::district_row(std::uint32_t w, std::uint32_t d) const {
  return static_cast<RowId>(w) * spec_.districts_per_warehouse + d;
}

RowId TpccWorkload::customer_row(std::uint32_t w, std::uint32_t d, std::uint32_t c) const {
  return district_row(w, d) * spec_.customers_per_district + c;
}

RowId TpccWorkload::stock_row(std::uint32_t w, std::uint32_t item) const {
  return static_cast<RowId>(w) * spec_.items + item;
}

std::vector<TableSchema> TpccWorkload::schemas() const {
  std::vector<TableSchema> out(kTableCount);
  out[kWarehouse] = make_schema("warehouse", {"ytd", "tax"});
  out[kDistrict] = make_schema("district", {"w", "tax", "ytd", "next_o"});
  out[kCustomer] = make_schema("customer", {"w", "d", "balance", "ytd_payment", "payment_cnt"});
  out[kHistory] = make_schema("history", {"c_row", "amount", "stamp"});
  out[kOrders] = make_schema("orders", {"d_row", "c_row", "o_key", "ol_cnt"});
  out[kNewOrder] = make_schema("new_order", {"o_key", "d_row"});
  out[kOrderLine] = make_schema("order_line", {"o_key", "d_row", "item", "qty", "amount"});
  out[kStock] = make_schema("stock", {"w", "item", "qty", "ytd", "order_cnt"});
  out[kItem] = make_schema("item", {"id", "price", "im"});
  return out;
}

std::vector<std::vector<Value>> TpccWorkload::initial_rows(TableId table) const {
  std::vector<std::vector<Value>> rows;
  switch (table) {
    case kWarehouse:
      for (std::uint32_t w = 0; w < spec_.warehouses; ++w) {
        rows.push_back({0, static_cast<Value>(w % 20)});
      }
      break;
    case kDistrict:
      for (std::uint32_t w = 0; w < spec_.warehouses; ++w) {
        for (std::uint32_t d = 0; d < spec_.districts_per_warehouse; ++d) {
          rows.push_back({static_cast<Value>(w), static_cast<Value>(d % 20), 0, 1});
        }
      }
      break;
    case kCustomer:
      for (std::uint32_t w = 0; w < spec_.warehouses; ++w) {
        for (std::uint32_t d = 0; d < spec_.districts_per_warehouse; ++d) {
          for (std::uint32_t c = 0; c < spec_.customers_per_district; ++c) {
            rows.push_back({static_cast<Value>(w), static_cast<Value>(d), 1000, 0, 0});
          }
        }
      }
      break;
    case kStock:
      for (std::uint32_t w = 0; w < spec_.warehouses; ++w) {
        for (std::uint32_t i = 0; i < spec_.items; ++i) {
          rows.push_back({static_cast<Value>(w), static_cast<Value>(i), 100, 0, 0});
        }
      }
      break;
    case kItem:
      for (std::uint32_t i = 0; i < spec_.items; ++i) {
        rows.push_back({static_cast<Value>(i), item_prices_[i], static_cast<Value>(i % 50)});
      }
      break;
    case kHistory:
    case kOrders:
    case kNewOrder:
    case kOrderLine:
      break;  // insert-only tables start empty
    default:
      throw ConfigError("unknown order-entry table");
  }
  return rows;
}

std::vector<TxnOp> TpccWorkload::txn_ops(std::uint32_t thread, std::uint64_t index) const {
  auto rng = stream(spec_.seed, kTxnStream, thread, index);
  const std::uint32_t w = static_cast<std::uint32_t>(pick(rng, 0, spec_.warehouses - 1));
  const std::uint32_t d =
      static_cast<std::uint32_t>(pick(rng, 0, spec_.districts_per_warehouse - 1));
  const std::uint32_t c =
      static_cast<std::uint32_t>(pick(rng, 0, spec_.customers_per_district - 1));
  const Value d_row = static_cast<Value>(district_row(w, d));
  const Value c_row = static_cast<Value>(customer_row(w, d, c));

  std::vector<TxnOp> ops;
  if (index % 2 == 0) {
    // Payment: push money through warehouse, district, and customer counters
    // and record a history row.
    const Value amount = static_cast<Value>(pick(rng, 100, 500000));
    ops.push_back(TxnOp::add(kWarehouse, w, 0, amount));
    ops.push_back(TxnOp::add(kDistrict, static_cast<RowId>(d_row), 2, amount));
    ops.push_back(TxnOp::add(kCustomer, static_cast<RowId>(c_row), 2, -amount));
    ops.push_back(TxnOp::add(kCustomer, static_cast<RowId>(c_row), 3, amount));
    ops.push_back(TxnOp::add(kCustomer, static_cast<RowId>(c_row), 4, 1));
    ops.push_back(TxnOp::insert(kHistory, {c_row, amount, static_cast<Value>(index)}));
  } else {
    // New order: take an order number, insert the order and its lines, and
    // move stock counters. The order key is (thread, index)-derived so the
    // op stream never depends on execution state.
    const Value o_key = static_cast<Value>(thread) * 1000000000LL + static_cast<Value>(index);
    const std::uint32_t lines =
        static_cast<std::uint32_t>(pick(rng, spec_.min_order_lines, spec_.max_order_lines));
    ops.push_back(TxnOp::add(kDistrict, static_cast<RowId>(d_row), 3, 1));
    ops.push_back(TxnOp::insert(kOrders, {d_row, c_row, o_key, static_cast<Value>(lines)}));
    ops.push_back(TxnOp::insert(kNewOrder, {o_key, d_row}));
    for (std::uint32_t l = 0; l < lines; ++l) {
      const std::uint32_t item = static_cast<std::uint32_t>(pick(rng, 0, spec_.items - 1));
      const Value qty = static_cast<Value>(pick(rng, 1, 10));
      const Value amount = qty * item_prices_[item];
      ops.push_back(TxnOp::insert(
          kOrderLine, {o_key, d_row, static_cast<Value>(item), qty, amount}));
      const RowId s_row = stock_row(w, item);
      ops.push_back(TxnOp::add(kStock, s_row, 2, -qty));
      ops.push_back(TxnOp::add(kStock, s_row, 3, qty));
      ops.push_back(TxnOp::add(kStock, s_row, 4, 1));
    }
  }
  return ops;
}

QuerySpec TpccWorkload::query(std::uint64_t index) const {
  auto rng = stream(spec_.seed, kQueryStream, index);
  QuerySpec q;
  switch (index % 3) {
    case 0: {
      // Revenue query: order lines joined with their items.
      q.table = kOrderLine;
      q.predicates.push_back(Predicate::ge(3, static_cast<Value>(pick(rng, 1, 5))));  // qty
      JoinClause j;
      j.build_table = kItem;
      j.probe_key = 2;  // order_line.item
      j.build_key = 0;  // item.id
      q.join = j;
      q.aggregates = {AggregateSpec::count(), AggregateSpec::sum(4),  // pair count, revenue
                      AggregateSpec::sum(1, AggregateSpec::Side::Build)};  // list prices
      break;
    }
    case 1:
      // Open-order backlog for one warehouse band.
      q.table = kNewOrder;
      q.predicates.push_back(
          Predicate::le(1, static_cast<Value>(district_row(spec_.warehouses - 1,
                                                           spec_.districts_per_warehouse - 1))));
      q.aggregates = {AggregateSpec::count(), AggregateSpec::max(0)};
      break;
    default:
      // Customer balance distribution.
      q.table = kCustomer;
      q.predicates.push_back(Predicate::lt(2, 1000));  // balance below its starting point
      q.aggregates = {AggregateSpec::count(), AggregateSpec::sum(2), AggregateSpec::min(2)};
      break;
  }
  return q;
}

}  // namespace islanddb
