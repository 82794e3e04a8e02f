#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <memory>
#include <random>

#include "islanddb/shipping.hpp"

using namespace islanddb;

namespace {

UpdateLogEntry entry(CommitId id, TableId t, RowId r, ColumnId c, Value payload,
                     UpdateKind kind = UpdateKind::Modify) {
  UpdateLogEntry e;
  e.commit_id = id;
  e.kind = kind;
  e.payload = payload;
  e.key = {t, r, c};
  return e;
}

TopologyModel topo16() { return TopologyModel(TopologyConfig{}); }

// Random commit stream sliced round-robin-randomly over k logs; each commit
// lands whole in one log with 1..4 entries, ids dense from 1.
struct RandomLogs {
  std::vector<std::unique_ptr<UpdateLog>> logs;
  std::vector<UpdateLogEntry> all;  // global commit order

  RandomLogs(std::size_t k, CommitId commits, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) logs.push_back(std::make_unique<UpdateLog>());
    for (CommitId id = 1; id <= commits; ++id) {
      const std::size_t target = rng() % k;
      const int fanout = 1 + static_cast<int>(rng() % 4);
      for (int j = 0; j < fanout; ++j) {
        const UpdateLogEntry e =
            entry(id, 0, rng() % 64, static_cast<ColumnId>(rng() % 4),
                  static_cast<Value>(rng() % 1000));
        logs[target]->append(e);
        all.push_back(e);
      }
    }
  }

  std::vector<UpdateLog*> pointers() {
    std::vector<UpdateLog*> out;
    for (auto& l : logs) out.push_back(l.get());
    return out;
  }
};

}  // namespace

TEST_CASE("merged rounds equal the sorted concatenation of all logs") {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 50; ++round) {
    const CommitId commits = 20 + rng() % 150;
    RandomLogs fixture(8, commits, rng());
    auto ptrs = fixture.pointers();

    // Drain in rounds with a small capacity; concatenate what comes out.
    std::vector<UpdateLogEntry> merged;
    for (;;) {
      const FinalLog part = merge_logs(ptrs, commits, 64);
      if (part.entries.empty()) break;
      merged.insert(merged.end(), part.entries.begin(), part.entries.end());
    }
    REQUIRE(merged == fixture.all);
  }
}

TEST_CASE("entries above the safe bound wait for the next round") {
  RandomLogs fixture(8, 100, 99);
  auto ptrs = fixture.pointers();

  const FinalLog early = merge_logs(ptrs, 40, 100000);
  for (const UpdateLogEntry& e : early.entries) REQUIRE(e.commit_id <= 40);

  const FinalLog rest = merge_logs(ptrs, 100, 100000);
  std::vector<UpdateLogEntry> merged = early.entries;
  merged.insert(merged.end(), rest.entries.begin(), rest.entries.end());
  CHECK(merged == fixture.all);
}

TEST_CASE("a commit is never split across rounds") {
  UpdateLog log;
  // Commit 1: 5 entries, commit 2: 300 entries, commit 3: 1 entry.
  for (int i = 0; i < 5; ++i) log.append(entry(1, 0, i, 0, i));
  for (int i = 0; i < 300; ++i) log.append(entry(2, 0, i, 1, i));
  log.append(entry(3, 0, 0, 2, 0));
  UpdateLog* ptr = &log;

  // Capacity 8 lands mid-commit-2: the round must extend to its boundary.
  const FinalLog first = merge_logs({&ptr, 1}, 3, 8);
  REQUIRE(first.entries.size() == 305);
  CHECK(first.entries.back().commit_id == 2);

  const FinalLog second = merge_logs({&ptr, 1}, 3, 8);
  REQUIRE(second.entries.size() == 1);
  CHECK(second.entries.front().commit_id == 3);
}

TEST_CASE("capacity respects whole commits below the line") {
  UpdateLog log;
  for (CommitId id = 1; id <= 10; ++id) {
    log.append(entry(id, 0, id, 0, 1));
    log.append(entry(id, 0, id, 1, 2));
  }
  UpdateLog* ptr = &log;
  const FinalLog round = merge_logs({&ptr, 1}, 10, 5);
  // Five entries hit capacity inside commit 3; its second entry still comes.
  REQUIRE(round.entries.size() == 6);
  CHECK(round.entries.back().commit_id == 3);
}

TEST_CASE("target index allocates dense stable offsets per table") {
  const TopologyModel topo = topo16();
  TargetIndex index(&topo, 1024);
  index.register_table(0, 2);
  index.register_table(1, 1);

  CHECK(index.register_row(0, 100) == 0);
  CHECK(index.register_row(0, 7) == 1);
  CHECK(index.register_row(1, 100) == 0);   // independent space per table
  CHECK(index.register_row(0, 100) == 0);   // re-registration is a no-op
  CHECK(index.table_length(0) == 2);
  CHECK(index.row_at_offset(0, 1) == 7);

  // Every column of a row shares the offset.
  const auto a = index.locate({0, 7, 0});
  const auto b = index.locate({0, 7, 1});
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->partition_offset == 1);
  CHECK(b->partition_offset == 1);
  CHECK(a->vault == b->vault);

  CHECK(!index.locate({0, 999, 0}).has_value());
  CHECK(!index.locate({5, 0, 0}).has_value());
}

TEST_CASE("locations follow segment placement") {
  TopologyConfig cfg;
  cfg.segment_size = 10;
  cfg.placement = Placement::Hybrid;
  const TopologyModel topo(cfg);
  TargetIndex index(&topo, 64);
  index.register_table(0, 1);
  for (RowId r = 0; r < 25; ++r) index.register_row(0, r);

  for (RowId r = 0; r < 25; ++r) {
    const auto loc = index.locate({0, r, 0});
    REQUIRE(loc.has_value());
    CHECK(loc->vault == topo.segment_vault(0, r / 10));
    CHECK(loc->vault_group == topo.group_of_vault(loc->vault));
  }
}

TEST_CASE("routing groups by column, keeps commit order, counts orphans") {
  const TopologyModel topo = topo16();
  TargetIndex index(&topo, 64);
  index.register_table(0, 2);
  index.register_row(0, 0);

  FinalLog log;
  log.entries.push_back(entry(1, 0, 0, 0, 10));
  log.entries.push_back(entry(1, 0, 0, 1, 11));
  log.entries.push_back(entry(2, 0, 0, 0, 20));
  log.entries.push_back(entry(2, 0, 99, 1, 21));            // never registered: orphan
  log.entries.push_back(entry(3, 0, 1, 0, 30, UpdateKind::Insert));  // registers row 1
  log.entries.push_back(entry(4, 0, 1, 0, 40));             // now resolvable

  const RouteResult routed = route_final_log(log, index, topo);
  CHECK(routed.orphan_updates == 1);
  REQUIRE(routed.batches.size() == 2);

  const UpdateBatch& col0 = routed.batches[0];
  CHECK(col0.column == ColumnKey{0, 0});
  CHECK(col0.vault_group == topo.home_group(0));
  REQUIRE(col0.updates.size() == 4);
  CHECK(col0.updates[0].payload == 10);
  CHECK(col0.updates[1].payload == 20);
  CHECK(col0.updates[2].kind == UpdateKind::Insert);
  CHECK(col0.updates[2].offset == 1);  // dense allocation for the insert
  CHECK(col0.updates[3].payload == 40);
  for (std::size_t i = 1; i < col0.updates.size(); ++i) {
    CHECK(col0.updates[i - 1].commit_id <= col0.updates[i].commit_id);
  }

  const UpdateBatch& col1 = routed.batches[1];
  REQUIRE(col1.updates.size() == 1);
  CHECK(col1.updates[0].payload == 11);
}

TEST_CASE("shipping trigger thresholds") {
  const SteadyTime t0 = std::chrono::steady_clock::now();
  const auto ms = [&](int n) { return t0 + std::chrono::milliseconds(n); };

  CHECK(!shipping_trigger(0, ms(1000), t0, 10, std::chrono::milliseconds(5)));
  CHECK(shipping_trigger(10, ms(0), t0, 10, std::chrono::milliseconds(5)));
  CHECK(shipping_trigger(25, ms(0), t0, 10, std::chrono::milliseconds(5)));
  CHECK(!shipping_trigger(3, ms(2), t0, 10, std::chrono::milliseconds(5)));
  CHECK(shipping_trigger(3, ms(5), t0, 10, std::chrono::milliseconds(5)));
}
