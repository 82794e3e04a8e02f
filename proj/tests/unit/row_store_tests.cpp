#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "islanddb/row_store.hpp"

using namespace islanddb;

namespace {
TableSchema two_cols() {
  return TableSchema{"t", {{"a", LogicalType::Int64}, {"b", LogicalType::Int64}}};
}
}  // namespace

TEST_CASE("insert assigns dense ids and never reuses them") {
  RowStore s(two_cols());
  CHECK(s.insert({1, 2}) == 0);
  CHECK(s.insert({3, 4}) == 1);
  s.remove(0);
  CHECK(s.insert({5, 6}) == 2);  // id 0 stays retired
  CHECK(!s.contains(0));
  CHECK(s.row_count() == 2);
  CHECK(s.next_row_id() == 3);
}

TEST_CASE("field and tuple reads see modifications") {
  RowStore s(two_cols());
  const RowId r = s.insert({10, 20});
  s.modify(r, 1, 99);
  CHECK(s.field(r, 0) == 10);
  CHECK(s.field(r, 1) == 99);
  CHECK(s.tuple(r) == std::vector<Value>({10, 99}));
}

TEST_CASE("missing rows and bad columns throw") {
  RowStore s(two_cols());
  CHECK_THROWS_AS((void)s.field(0, 0), NotFoundError);
  const RowId r = s.insert({1, 2});
  CHECK_THROWS_AS((void)s.field(r, 5), Error);
  CHECK_THROWS_AS(s.modify(99, 0, 1), NotFoundError);
  CHECK_THROWS_AS(s.remove(99), NotFoundError);
  CHECK_THROWS_AS(s.insert({1}), Error);  // wrong arity
}

TEST_CASE("sorted row ids ascend after interleaved removals") {
  RowStore s(two_cols());
  for (Value i = 0; i < 10; ++i) s.insert({i, i});
  s.remove(3);
  s.remove(7);
  const std::vector<RowId> ids = s.sorted_row_ids();
  REQUIRE(ids.size() == 8);
  for (std::size_t i = 1; i < ids.size(); ++i) CHECK(ids[i - 1] < ids[i]);
  CHECK(std::find(ids.begin(), ids.end(), 3) == ids.end());
}

TEST_CASE("schema validation rejects empty shapes") {
  CHECK_THROWS_AS(RowStore(TableSchema{"", {{"a", LogicalType::Int64}}}), ConfigError);
  CHECK_THROWS_AS(RowStore(TableSchema{"t", {}}), ConfigError);
}
