#include "islanddb/engine.hpp"

#include <cstdlib>

#include "engine_internal.hpp"
#include "islanddb/row_store.hpp"

namespace islanddb {

void EngineConfig::validate() const {
  topology.validate();
  if (txn_threads == 0) throw ConfigError("txn_threads must be positive");
  if (ship_threshold == 0) throw ConfigError("ship_threshold must be positive");
  if (dict_rebuild_factor < 1.0) throw ConfigError("dict_rebuild_factor must be >= 1");
  if (expected_rows_per_table == 0) throw ConfigError("expected_rows_per_table must be positive");
}

EngineMode parse_engine_mode(const std::string& name) {
  if (name == "polynesia") return EngineMode::Polynesia;
  if (name == "si-ss") return EngineMode::SiSs;
  if (name == "si-mvcc") return EngineMode::SiMvcc;
  if (name == "mi-naive") return EngineMode::MiNaive;
  throw ConfigError("unknown engine mode: " + name +
                    " (expected polynesia, si-ss, si-mvcc, or mi-naive)");
}

std::string to_string(EngineMode mode) {
  switch (mode) {
    case EngineMode::Polynesia:
      return "polynesia";
    case EngineMode::SiSs:
      return "si-ss";
    case EngineMode::SiMvcc:
      return "si-mvcc";
    case EngineMode::MiNaive:
      return "mi-naive";
  }
  throw ConfigError("unknown engine mode value");
}

std::uint64_t checksum_rows(const TxnEngine& txn, std::size_t table_count) {
  std::uint64_t digest = 0;
  for (std::size_t t = 0; t < table_count; ++t) {
    const RowStore& store = txn.table(static_cast<TableId>(t));
    for (const RowId row : store.sorted_row_ids()) {
      std::uint64_t h = splitmix64(static_cast<std::uint64_t>(t) + 0x9e3779b97f4a7c15ULL);
      h = hash_combine(h, static_cast<std::uint64_t>(row));
      for (const Value v : store.tuple(row)) {
        h = hash_combine(h, static_cast<std::uint64_t>(v));
      }
      digest ^= h;  // xor makes the digest independent of iteration order
    }
  }
  return digest;
}

std::uint32_t resolve_worker_cap(const EngineConfig& config) {
  if (config.worker_cap != 0) return config.worker_cap;
  if (const char* env = std::getenv("ISLANDDB_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed > 0) return static_cast<std::uint32_t>(parsed);
  }
  return 0;  // pool default: full topology complement
}

std::unique_ptr<Engine> build_engine(const EngineConfig& config) {
  config.validate();
  switch (config.mode) {
    case EngineMode::Polynesia:
    case EngineMode::MiNaive:
      return make_island_engine(config);
    case EngineMode::SiSs:
      return make_snapshot_copy_engine(config);
    case EngineMode::SiMvcc:
      return make_version_chain_engine(config);
  }
  throw ConfigError("unknown engine mode value");
}

}  // namespace islanddb
