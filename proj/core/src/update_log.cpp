#include "islanddb/update_log.hpp"

namespace islanddb {

UpdateLog::UpdateLog() : head_(std::make_unique<Chunk>()), tail_(head_.get()) {}

UpdateLog::~UpdateLog() {
  Chunk* c = head_->next.load(std::memory_order_acquire);
  while (c != nullptr) {
    Chunk* next = c->next.load(std::memory_order_acquire);
    delete c;
    c = next;
  }
}

void UpdateLog::append(const UpdateLogEntry& entry) {
  const std::uint64_t n = size_.load(std::memory_order_relaxed);
  const std::size_t offset = n % kChunkCapacity;
  if (n != 0 && offset == 0) {
    // Current tail is full; link a fresh chunk before publishing the entry.
    Chunk* next = new Chunk();
    tail_->next.store(next, std::memory_order_release);
    tail_ = next;
  }
  tail_->items[offset] = entry;
  size_.store(n + 1, std::memory_order_release);
}

UpdateLog::Cursor UpdateLog::cursor_at_consumed() const {
  Cursor c;
  c.chunk_ = head_.get();
  c.position_ = 0;
  c.offset_ = 0;
  const std::uint64_t target = consumed();
  while (c.position_ < target) advance(c);
  return c;
}

// A cursor whose offset_ equals kChunkCapacity is parked on a chunk boundary
// with the hop into the next chunk still pending. The hop cannot be taken
// eagerly in advance(): when the consumer has caught up with the writer at a
// boundary the next chunk is not linked yet, and caching that null would be
// dereferenced later. The writer links the chunk before publishing size_, so
// once the caller has observed size() > position (the precondition for
// reading) the link is guaranteed visible here.
const UpdateLogEntry& UpdateLog::entry_at(const Cursor& c) const {
  const Chunk* chunk = c.chunk_;
  std::size_t offset = c.offset_;
  if (offset == kChunkCapacity) {
    chunk = chunk->next.load(std::memory_order_acquire);
    offset = 0;
  }
  return chunk->items[offset];
}

void UpdateLog::advance(Cursor& c) const {
  if (c.offset_ == kChunkCapacity) {
    c.chunk_ = c.chunk_->next.load(std::memory_order_acquire);
    c.offset_ = 0;
  }
  ++c.position_;
  ++c.offset_;
}

void UpdateLog::mark_consumed(std::uint64_t position) {
  consumed_.store(position, std::memory_order_release);
}

std::vector<UpdateLogEntry> UpdateLog::snapshot_all() const {
  std::vector<UpdateLogEntry> out;
  const std::uint64_t n = size();
  out.reserve(n);
  Cursor c;
  c.chunk_ = head_.get();
  for (std::uint64_t i = 0; i < n; ++i) {
    out.push_back(entry_at(c));
    advance(c);
  }
  return out;
}

}  // namespace islanddb
