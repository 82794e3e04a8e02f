#include "islanddb/mvcc.hpp"

namespace islanddb {

MvccStore::~MvccStore() {
  for (auto& table : tables_) {
    for (auto& [row, chains] : table->rows) {
      for (auto& cell : chains->cells) {
        VersionChainEntry* e = cell.load(std::memory_order_relaxed);
        while (e != nullptr) {
          VersionChainEntry* next = e->next;
          delete e;
          e = next;
        }
      }
    }
  }
}

void MvccStore::register_table(TableId table, std::uint32_t column_count) {
  if (table != tables_.size()) throw ContractError("tables must be registered in id order");
  auto t = std::make_unique<Table>();
  t->column_count = column_count;
  tables_.push_back(std::move(t));
}

void MvccStore::load_row(TableId table, RowId row, const std::vector<Value>& tuple) {
  on_insert(0, table, row, tuple);
}

void MvccStore::append(Table& t, RowId row, ColumnId column, VersionChainEntry* entry) {
  auto it = t.rows.find(row);
  if (it == t.rows.end()) throw CorruptionError("chain append to unknown row");
  std::atomic<VersionChainEntry*>& head = it->second->cells[column];
  entry->next = head.load(std::memory_order_relaxed);
  head.store(entry, std::memory_order_release);
}

void MvccStore::on_insert(CommitId id, TableId table, RowId row,
                          const std::vector<Value>& tuple) {
  Table& t = *tables_.at(table);
  std::unique_lock lock(t.mutex);  // map structure changes: exclude readers
  auto [it, inserted] = t.rows.try_emplace(row, nullptr);
  if (inserted) it->second = std::make_unique<RowChains>(t.column_count);
  for (ColumnId c = 0; c < t.column_count; ++c) {
    append(t, row, c, new VersionChainEntry{id, tuple[c], false, nullptr});
  }
}

void MvccStore::on_modify(CommitId id, TableId table, RowId row, ColumnId column, Value value) {
  Table& t = *tables_.at(table);
  std::shared_lock lock(t.mutex);  // per-table txn lock already serializes writers
  append(t, row, column, new VersionChainEntry{id, value, false, nullptr});
}

void MvccStore::on_delete(CommitId id, TableId table, RowId row,
                          const std::vector<Value>& last_tuple) {
  Table& t = *tables_.at(table);
  std::shared_lock lock(t.mutex);
  for (ColumnId c = 0; c < t.column_count; ++c) {
    append(t, row, c, new VersionChainEntry{id, last_tuple[c], true, nullptr});
  }
}

const VersionChainEntry* MvccStore::visible(const VersionChainEntry* head, CommitId cutoff) const {
  std::uint64_t steps = 0;
  const VersionChainEntry* e = head;
  while (e != nullptr) {
    ++steps;
    if (e->begin <= cutoff) break;
    e = e->next;
  }
  steps_.fetch_add(steps, std::memory_order_relaxed);
  reads_.fetch_add(1, std::memory_order_relaxed);
  if (e == nullptr || e->tombstone) return nullptr;
  return e;
}

std::optional<Value> MvccStore::read(TableId table, RowId row, ColumnId column,
                                     CommitId cutoff) const {
  const Table& t = *tables_.at(table);
  std::shared_lock lock(t.mutex);
  auto it = t.rows.find(row);
  if (it == t.rows.end()) return std::nullopt;
  const VersionChainEntry* e =
      visible(it->second->cells[column].load(std::memory_order_acquire), cutoff);
  if (e == nullptr) return std::nullopt;
  return e->value;
}

MvccStore::TableScan MvccStore::scan(TableId table, const std::vector<ColumnId>& columns,
                                     CommitId cutoff) const {
  const Table& t = *tables_.at(table);
  std::shared_lock lock(t.mutex);
  TableScan out;
  out.columns.resize(columns.size());
  for (const auto& [row, chains] : t.rows) {
    // Row-level visibility follows column 0: inserts and deletes write every
    // column of the row with one commit id.
    const VersionChainEntry* probe =
        visible(chains->cells[0].load(std::memory_order_acquire), cutoff);
    if (probe == nullptr) continue;
    out.rows.push_back(row);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const ColumnId c = columns[i];
      const VersionChainEntry* e =
          c == 0 ? probe : visible(chains->cells[c].load(std::memory_order_acquire), cutoff);
      if (e == nullptr) throw CorruptionError("row visible but column chain is not");
      out.columns[i].push_back(e->value);
    }
  }
  return out;
}

std::size_t MvccStore::chain_length(TableId table, RowId row, ColumnId column) const {
  const Table& t = *tables_.at(table);
  std::shared_lock lock(t.mutex);
  auto it = t.rows.find(row);
  if (it == t.rows.end()) return 0;
  std::size_t n = 0;
  for (const VersionChainEntry* e = it->second->cells[column].load(std::memory_order_acquire);
       e != nullptr; e = e->next) {
    ++n;
  }
  return n;
}

}  // namespace islanddb
