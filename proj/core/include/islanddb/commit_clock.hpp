#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "islanddb/types.hpp"

namespace islanddb {

// Global commit counter plus a per-thread publication slot. Commit ids are
// handed out before a transaction's effects (log entries, version chains)
// become visible, so a consumer that merged everything it can currently see
// could otherwise skip over a smaller id still being written. visible_bound()
// returns a commit id B such that every commit <= B is fully published; the
// shipping agent and MVCC readers only trust ids up to that bound.
class CommitClock {
 public:
  explicit CommitClock(std::size_t thread_count) : slots_(thread_count) {}

  std::size_t thread_count() const { return slots_.size(); }

  // Marks the slot in-flight and assigns the next id. Must be paired with
  // finish_commit on the same thread after all commit effects are visible.
  CommitId begin_commit(std::size_t slot) {
    slots_[slot].pending.store(true);
    return next_.fetch_add(1) + 1;
  }

  void finish_commit(std::size_t slot, CommitId id) {
    slots_[slot].visible.store(id);
    slots_[slot].pending.store(false);
  }

  CommitId last_assigned() const { return next_.load(); }

  CommitId visible_bound() const {
    // The counter must be read before the slot scan: any commit that turns
    // pending after this load gets an id greater than `bound`.
    CommitId bound = next_.load();
    for (const Slot& s : slots_) {
      if (s.pending.load()) {
        const CommitId v = s.visible.load();
        if (v < bound) bound = v;
      }
    }
    return bound;
  }

 private:
  struct alignas(64) Slot {
    std::atomic<bool> pending{false};
    std::atomic<CommitId> visible{0};
  };

  std::atomic<CommitId> next_{0};
  std::vector<Slot> slots_;
};

}  // namespace islanddb
