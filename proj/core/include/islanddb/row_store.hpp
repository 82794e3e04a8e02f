#pragma once

#include <unordered_map>
#include <vector>

#include "islanddb/schema.hpp"
#include "islanddb/types.hpp"

namespace islanddb {

// NSM row store backing the transactional side: one contiguous tuple per row,
// rows addressed by an id that is never reused. Callers provide their own
// synchronization (the transaction engine holds a per-table lock).
class RowStore {
 public:
  explicit RowStore(TableSchema schema) : schema_(std::move(schema)) {
    schema_.validate();
  }

  const TableSchema& schema() const { return schema_; }
  std::size_t column_count() const { return schema_.columns.size(); }
  std::uint64_t row_count() const { return rows_.size(); }
  RowId next_row_id() const { return next_row_id_; }

  bool contains(RowId row) const { return rows_.find(row) != rows_.end(); }

  RowId insert(std::vector<Value> tuple);
  void modify(RowId row, ColumnId column, Value value);
  void remove(RowId row);

  Value field(RowId row, ColumnId column) const;
  const std::vector<Value>& tuple(RowId row) const;

  // Stable iteration for checksums and replica rebuilds; ascending row id.
  std::vector<RowId> sorted_row_ids() const;

 private:
  const std::vector<Value>& tuple_or_throw(RowId row) const;

  TableSchema schema_;
  std::unordered_map<RowId, std::vector<Value>> rows_;
  RowId next_row_id_ = 0;
};

}  // namespace islanddb
