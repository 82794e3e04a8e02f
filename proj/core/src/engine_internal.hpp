#pragma once

#include <memory>

#include "islanddb/engine.hpp"

namespace islanddb {

std::unique_ptr<Engine> make_island_engine(const EngineConfig& config);
std::unique_ptr<Engine> make_snapshot_copy_engine(const EngineConfig& config);
std::unique_ptr<Engine> make_version_chain_engine(const EngineConfig& config);

// worker_cap, or the ISLANDDB_THREADS environment variable, or 0 (pool default).
std::uint32_t resolve_worker_cap(const EngineConfig& config);

}  // namespace islanddb
