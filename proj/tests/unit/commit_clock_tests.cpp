#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>
#include <vector>

#include "islanddb/commit_clock.hpp"

using namespace islanddb;

TEST_CASE("bound trails in-flight commits and catches up on finish") {
  CommitClock clock(2);
  CHECK(clock.visible_bound() == 0);

  const CommitId a = clock.begin_commit(0);
  CHECK(a == 1);
  CHECK(clock.visible_bound() == 0);  // commit 1 is mid-publication

  const CommitId b = clock.begin_commit(1);
  CHECK(b == 2);
  CHECK(clock.visible_bound() == 0);

  clock.finish_commit(1, b);
  // Commit 2 is done but 1 is still pending, so nothing below 1 is safe.
  CHECK(clock.visible_bound() == 0);

  clock.finish_commit(0, a);
  CHECK(clock.visible_bound() == 2);
  CHECK(clock.last_assigned() == 2);
}

TEST_CASE("read-only style begin/finish pairs advance the bound") {
  CommitClock clock(1);
  for (CommitId want = 1; want <= 100; ++want) {
    const CommitId id = clock.begin_commit(0);
    CHECK(id == want);
    clock.finish_commit(0, id);
    CHECK(clock.visible_bound() == want);
  }
}

// Protocol property under real concurrency: every id at or below a observed
// bound has fully finished publication at the moment the bound was read.
TEST_CASE("bound never includes an unfinished commit") {
  constexpr std::size_t kWriters = 4;
  constexpr int kPerWriter = 20000;
  CommitClock clock(kWriters);
  std::vector<std::atomic<bool>> done(kWriters * kPerWriter + 1);
  for (auto& d : done) d.store(false);

  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> violations{0};

  std::thread checker([&] {
    while (!stop.load(std::memory_order_acquire)) {
      const CommitId bound = clock.visible_bound();
      for (CommitId c = 1; c <= bound; ++c) {
        if (!done[c].load(std::memory_order_acquire)) {
          violations.fetch_add(1);
          return;
        }
      }
    }
  });

  std::vector<std::thread> writers;
  for (std::size_t w = 0; w < kWriters; ++w) {
    writers.emplace_back([&, w] {
      for (int i = 0; i < kPerWriter; ++i) {
        const CommitId id = clock.begin_commit(w);
        // "Publication work" happens here; mark it complete, then finish.
        done[id].store(true, std::memory_order_release);
        clock.finish_commit(w, id);
      }
    });
  }
  for (auto& t : writers) t.join();
  stop.store(true, std::memory_order_release);
  checker.join();

  CHECK(violations.load() == 0);
  CHECK(clock.last_assigned() == kWriters * kPerWriter);
  CHECK(clock.visible_bound() == clock.last_assigned());
}
