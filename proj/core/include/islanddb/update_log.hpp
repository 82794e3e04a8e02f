#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <vector>

#include "islanddb/types.hpp"

namespace islanddb {

using SteadyTime = std::chrono::steady_clock::time_point;

// One propagated write: the commit that produced it, what kind of change it
// is, the new field value, and the record key tying it to a column. Inserts
// and deletes of a row appear as one entry per column of the table.
struct UpdateLogEntry {
  CommitId commit_id = 0;
  UpdateKind kind = UpdateKind::Modify;
  Value payload = 0;
  RecordKey key;
  SteadyTime commit_time{};

  friend bool operator==(const UpdateLogEntry& a, const UpdateLogEntry& b) {
    return a.commit_id == b.commit_id && a.kind == b.kind && a.payload == b.payload &&
           a.key == b.key;
  }
};

// Append-only commit-ordered log owned by one transaction worker. Entries are
// stored in fixed chunks linked by atomic pointers, so the single shipping
// consumer can read everything below size() while the writer keeps appending;
// no element ever moves once written. Entries are never physically removed:
// consumption is tracked as a cursor position.
class UpdateLog {
 private:
  struct Chunk;

 public:
  static constexpr std::size_t kChunkCapacity = 1024;

  UpdateLog();
  ~UpdateLog();
  UpdateLog(const UpdateLog&) = delete;
  UpdateLog& operator=(const UpdateLog&) = delete;

  // Writer side (one thread).
  void append(const UpdateLogEntry& entry);

  // Safe to call from any thread.
  std::uint64_t size() const { return size_.load(std::memory_order_acquire); }
  std::uint64_t consumed() const { return consumed_.load(std::memory_order_acquire); }
  std::uint64_t pending() const { return size() - consumed(); }

  // Consumer side (one thread): a forward-only position into the log.
  class Cursor {
   public:
    std::uint64_t position() const { return position_; }

   private:
    friend class UpdateLog;
    const Chunk* chunk_ = nullptr;
    std::size_t offset_ = 0;
    std::uint64_t position_ = 0;
  };

  Cursor cursor_at_consumed() const;
  const UpdateLogEntry& entry_at(const Cursor& c) const;
  void advance(Cursor& c) const;
  // Publishes that everything below `position` has been shipped.
  void mark_consumed(std::uint64_t position);

  // Copies every appended entry; used by offline verification after workers
  // have quiesced.
  std::vector<UpdateLogEntry> snapshot_all() const;

 private:
  struct Chunk {
    std::array<UpdateLogEntry, kChunkCapacity> items;
    std::atomic<Chunk*> next{nullptr};
  };

  std::unique_ptr<Chunk> head_;
  Chunk* tail_ = nullptr;  // writer-only
  std::atomic<std::uint64_t> size_{0};
  std::atomic<std::uint64_t> consumed_{0};
};

}  // namespace islanddb
