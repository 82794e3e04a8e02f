#pragma once

#include <string>
#include <vector>

#include "islanddb/types.hpp"

namespace islanddb {

struct ColumnDef {
  std::string name;
  LogicalType type = LogicalType::Int64;
};

// Column ids are positions in `columns`; a tuple is exactly one Value per
// column. Schemas are fixed at table creation.
struct TableSchema {
  std::string name;
  std::vector<ColumnDef> columns;

  ColumnId column_id(const std::string& column_name) const {
    for (ColumnId i = 0; i < columns.size(); ++i) {
      if (columns[i].name == column_name) return i;
    }
    throw NotFoundError("no column named " + column_name + " in table " + name);
  }

  void validate() const {
    if (name.empty()) throw ConfigError("table schema without a name");
    if (columns.empty()) throw ConfigError("table " + name + " has no columns");
  }
};

}  // namespace islanddb
