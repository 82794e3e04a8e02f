#include "islanddb/row_store.hpp"

#include <algorithm>

namespace islanddb {

RowId RowStore::insert(std::vector<Value> tuple) {
  if (tuple.size() != column_count()) {
    throw ContractError("tuple width does not match schema of table " + schema_.name);
  }
  const RowId id = next_row_id_++;
  rows_.emplace(id, std::move(tuple));
  return id;
}

void RowStore::modify(RowId row, ColumnId column, Value value) {
  auto it = rows_.find(row);
  if (it == rows_.end()) throw NotFoundError("row does not exist");
  if (column >= column_count()) throw NotFoundError("column does not exist");
  it->second[column] = value;
}

void RowStore::remove(RowId row) {
  if (rows_.erase(row) == 0) throw NotFoundError("row does not exist");
}

const std::vector<Value>& RowStore::tuple_or_throw(RowId row) const {
  auto it = rows_.find(row);
  if (it == rows_.end()) throw NotFoundError("row does not exist");
  return it->second;
}

Value RowStore::field(RowId row, ColumnId column) const {
  if (column >= column_count()) throw NotFoundError("column does not exist");
  return tuple_or_throw(row)[column];
}

const std::vector<Value>& RowStore::tuple(RowId row) const { return tuple_or_throw(row); }

std::vector<RowId> RowStore::sorted_row_ids() const {
  std::vector<RowId> ids;
  ids.reserve(rows_.size());
  for (const auto& [id, _] : rows_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace islanddb
