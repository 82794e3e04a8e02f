#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "islanddb/mvcc.hpp"

using namespace islanddb;

namespace {
void load_two_rows(MvccStore& s) {
  s.register_table(0, 2);
  s.load_row(0, 0, {10, 11});
  s.load_row(0, 1, {20, 21});
}
}  // namespace

TEST_CASE("visibility picks the newest entry at or below the cutoff") {
  MvccStore s;
  load_two_rows(s);
  s.on_modify(5, 0, 0, 0, 100);
  s.on_modify(9, 0, 0, 0, 200);

  CHECK(s.read(0, 0, 0, 0).value() == 10);   // loaded baseline
  CHECK(s.read(0, 0, 0, 4).value() == 10);
  CHECK(s.read(0, 0, 0, 5).value() == 100);
  CHECK(s.read(0, 0, 0, 8).value() == 100);
  CHECK(s.read(0, 0, 0, 9).value() == 200);
  CHECK(s.read(0, 0, 1, 9).value() == 11);   // untouched column
  CHECK(!s.read(0, 7, 0, 9).has_value());    // unknown row
}

TEST_CASE("inserts appear and tombstones hide rows from older cutoffs onward") {
  MvccStore s;
  load_two_rows(s);
  s.on_insert(3, 0, 5, {50, 51});
  CHECK(!s.read(0, 5, 0, 2).has_value());
  CHECK(s.read(0, 5, 0, 3).value() == 50);

  s.on_delete(7, 0, 5, {50, 51});
  CHECK(s.read(0, 5, 0, 6).value() == 50);
  CHECK(!s.read(0, 5, 0, 7).has_value());
  CHECK(!s.read(0, 5, 0, 100).has_value());
}

TEST_CASE("scan materializes visible rows in ascending row order") {
  MvccStore s;
  load_two_rows(s);
  s.on_modify(2, 0, 1, 1, 99);
  s.on_insert(4, 0, 2, {30, 31});
  s.on_delete(6, 0, 0, {10, 11});

  const MvccStore::TableScan at3 = s.scan(0, {0, 1}, 3);
  CHECK(at3.rows == std::vector<RowId>({0, 1}));
  CHECK(at3.columns[0] == std::vector<Value>({10, 20}));
  CHECK(at3.columns[1] == std::vector<Value>({11, 99}));

  const MvccStore::TableScan at6 = s.scan(0, {0, 1}, 6);
  CHECK(at6.rows == std::vector<RowId>({1, 2}));
  CHECK(at6.columns[0] == std::vector<Value>({20, 30}));
  CHECK(at6.columns[1] == std::vector<Value>({99, 31}));
}

TEST_CASE("old cutoffs pay one step per newer chain entry") {
  MvccStore s;
  s.register_table(0, 1);
  s.load_row(0, 0, {0});

  CommitId next_commit = 100;
  const auto steps_for_updates = [&](int updates) {
    for (int i = 0; i < updates; ++i) {
      s.on_modify(next_commit++, 0, 0, 0, i);
    }
    const std::uint64_t before = s.traversal_steps();
    CHECK(s.read(0, 0, 0, 1).value() == 0);  // forced walk past all updates
    return s.traversal_steps() - before;
  };

  const std::uint64_t shallow = steps_for_updates(1);   // chain: 1 update + base
  const std::uint64_t deep = steps_for_updates(63);     // chain: 64 updates + base
  CHECK(deep > shallow);
  CHECK(s.chain_length(0, 0, 0) == 65);
  CHECK(s.traversal_reads() == 2);
  // Reading the newest state stays cheap regardless of history depth.
  const std::uint64_t before = s.traversal_steps();
  CHECK(s.read(0, 0, 0, 200).value() == 62);
  CHECK(s.traversal_steps() - before == 1);
}
