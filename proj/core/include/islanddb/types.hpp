#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace islanddb {

// All field values are 64-bit signed integers. Decimals are stored scaled
// (e.g. cents), dates as day numbers. This keeps tuples fixed-width and
// aggregate results exactly reproducible across runs.
using Value = std::int64_t;

using TableId = std::uint32_t;
using ColumnId = std::uint32_t;
using RowId = std::uint64_t;
using CommitId = std::uint64_t;

enum class LogicalType : std::uint8_t { Int64, Decimal, Date };

enum class EngineMode : std::uint8_t { Polynesia, SiSs, SiMvcc, MiNaive };

enum class Placement : std::uint8_t { Local, Remote, Hybrid };

// Kind of a propagated write. A row insert or delete fans out into one entry
// per column of the table; a modify touches exactly one column.
enum class UpdateKind : std::uint8_t { Insert, Delete, Modify };

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotFoundError : Error {
  using Error::Error;
};
struct CorruptionError : Error {
  using Error::Error;
};
struct ContractError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct PlanError : Error {
  using Error::Error;
};

struct ColumnKey {
  TableId table = 0;
  ColumnId column = 0;

  friend bool operator==(const ColumnKey&, const ColumnKey&) = default;
  friend auto operator<=>(const ColumnKey&, const ColumnKey&) = default;
};

// Identifies one field of one row; the unit the update-shipping index maps
// to a physical location on the analytical side.
struct RecordKey {
  TableId table = 0;
  RowId row = 0;
  ColumnId column = 0;

  friend bool operator==(const RecordKey&, const RecordKey&) = default;
  friend auto operator<=>(const RecordKey&, const RecordKey&) = default;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return splitmix64(seed ^ splitmix64(v));
}

}  // namespace islanddb

template <>
struct std::hash<islanddb::ColumnKey> {
  std::size_t operator()(const islanddb::ColumnKey& k) const noexcept {
    return islanddb::hash_combine(k.table, k.column);
  }
};

template <>
struct std::hash<islanddb::RecordKey> {
  std::size_t operator()(const islanddb::RecordKey& k) const noexcept {
    return islanddb::hash_combine(islanddb::hash_combine(k.table, k.row), k.column);
  }
};
