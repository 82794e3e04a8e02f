#include "islanddb/consistency.hpp"

#include <algorithm>

namespace islanddb {

void SnapshotManager::register_column(const ColumnKey& column,
                                      std::shared_ptr<const ColumnVersion> initial) {
  std::scoped_lock lock(mutex_);
  if (columns_.count(column)) throw ContractError("column registered twice");
  ColumnState st;
  st.main = std::move(initial);
  columns_.emplace(column, std::move(st));
}

bool SnapshotManager::has_column(const ColumnKey& column) const {
  std::scoped_lock lock(mutex_);
  return columns_.count(column) > 0;
}

SnapshotManager::ColumnState& SnapshotManager::state_of(const ColumnKey& column) {
  auto it = columns_.find(column);
  if (it == columns_.end()) throw NotFoundError("column is not registered");
  return it->second;
}

const SnapshotManager::ColumnState& SnapshotManager::state_of(const ColumnKey& column) const {
  auto it = columns_.find(column);
  if (it == columns_.end()) throw NotFoundError("column is not registered");
  return it->second;
}

std::shared_ptr<const ColumnVersion> SnapshotManager::main_version(const ColumnKey& column) const {
  std::scoped_lock lock(mutex_);
  return state_of(column).main;
}

bool SnapshotManager::dirty(const ColumnKey& column) const {
  std::scoped_lock lock(mutex_);
  return state_of(column).dirty;
}

CommitId SnapshotManager::frontier() const {
  std::scoped_lock lock(mutex_);
  return frontier_;
}

void SnapshotManager::publish(const ColumnKey& column,
                              std::shared_ptr<const ColumnVersion> version) {
  std::scoped_lock lock(mutex_);
  ColumnState& st = state_of(column);
  st.main = std::move(version);
  st.dirty = true;
}

void SnapshotManager::publish_round(
    const std::vector<std::pair<ColumnKey, std::shared_ptr<const ColumnVersion>>>& versions,
    CommitId new_frontier) {
  std::scoped_lock lock(mutex_);
  if (new_frontier < frontier_) throw ContractError("frontier must be monotone");
  for (const auto& [column, version] : versions) {
    ColumnState& st = state_of(column);
    st.main = version;
    st.dirty = true;
  }
  frontier_ = new_frontier;
}

QuerySnapshot SnapshotManager::acquire(const std::vector<ColumnKey>& columns) {
  // Sorted pin order keeps the walk deterministic; the single mutex already
  // makes the pin set atomic against publish_round.
  std::vector<ColumnKey> sorted(columns.begin(), columns.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::scoped_lock lock(mutex_);
  QuerySnapshot snap;
  snap.query_id = next_query_id_++;
  snap.cutoff = frontier_;
  for (const ColumnKey& key : sorted) {
    ColumnState& st = state_of(key);
    const bool head_current =
        !st.chain.empty() && st.chain.front().version->version_id == st.main->version_id;
    if (st.chain.empty() || (st.dirty && !head_current)) {
      st.chain.push_front({st.main, next_entry_id_++, 0});
      snapshots_created_++;
    } else {
      snapshots_shared_++;
    }
    st.dirty = false;
    ChainEntry& head = st.chain.front();
    head.refcount++;
    snap.pins.push_back({key, head.version, head.entry_id});
  }
  return snap;
}

void SnapshotManager::release(QuerySnapshot& snapshot) {
  if (snapshot.released) throw ContractError("snapshot released twice");
  snapshot.released = true;

  std::scoped_lock lock(mutex_);
  for (const QuerySnapshot::Pin& pin : snapshot.pins) {
    ColumnState& st = state_of(pin.column);
    auto it = std::find_if(st.chain.begin(), st.chain.end(),
                           [&](const ChainEntry& e) { return e.entry_id == pin.chain_entry_id; });
    if (it == st.chain.end()) throw ContractError("pinned chain entry vanished");
    if (it->refcount == 0) throw ContractError("refcount underflow");
    it->refcount--;
    // Eager reclamation: a non-head entry dies with its last reference. The
    // head stays so later clean queries can share it.
    if (it->refcount == 0 && it != st.chain.begin()) {
      st.chain.erase(it);
    }
  }
  snapshot.pins.clear();
}

Value SnapshotManager::read_snapshot(const QuerySnapshot& snapshot, const ColumnKey& column,
                                     std::uint64_t offset) const {
  const ColumnVersion& v = snapshot.version_of(column);
  if (offset >= v.column.size() || !v.column.validity.get(offset)) {
    throw NotFoundError("no live value at this offset");
  }
  return v.dictionary->value_at(v.column.codes.get(offset));
}

std::size_t SnapshotManager::chain_length(const ColumnKey& column) const {
  std::scoped_lock lock(mutex_);
  return state_of(column).chain.size();
}

std::uint32_t SnapshotManager::head_refcount(const ColumnKey& column) const {
  std::scoped_lock lock(mutex_);
  const ColumnState& st = state_of(column);
  if (st.chain.empty()) return 0;
  return st.chain.front().refcount;
}

std::uint64_t SnapshotManager::snapshots_created() const {
  std::scoped_lock lock(mutex_);
  return snapshots_created_;
}

std::uint64_t SnapshotManager::snapshots_shared() const {
  std::scoped_lock lock(mutex_);
  return snapshots_shared_;
}

}  // namespace islanddb
