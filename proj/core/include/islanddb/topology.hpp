#pragma once

#include <cstdint>
#include <vector>

#include "islanddb/types.hpp"

namespace islanddb {

// Logical layout of the analytical island: `vaults` memory partitions grouped
// into vault groups of `vault_group_size`, each vault with a fixed number of
// workers. On one machine this is an accounting model: it decides where data
// and dictionary replicas conceptually live, which workers service which
// tasks, and whether an access counts as local or remote.
struct TopologyConfig {
  std::uint32_t vaults = 16;
  std::uint32_t vault_group_size = 4;
  std::uint32_t workers_per_vault = 4;
  std::uint32_t segment_size = 1000;
  Placement placement = Placement::Hybrid;
  std::uint64_t remote_access_delay_ns = 0;

  void validate() const {
    if (vaults == 0 || vault_group_size == 0 || workers_per_vault == 0) {
      throw ConfigError("vault counts must be positive");
    }
    if (vaults % vault_group_size != 0) {
      throw ConfigError("vault_group_size must divide vaults");
    }
    if (segment_size == 0) throw ConfigError("segment_size must be positive");
  }
};

class TopologyModel {
 public:
  explicit TopologyModel(TopologyConfig config) : config_(config) { config_.validate(); }

  const TopologyConfig& config() const { return config_; }
  std::uint32_t vaults() const { return config_.vaults; }
  std::uint32_t group_size() const { return config_.vault_group_size; }
  std::uint32_t groups() const { return config_.vaults / config_.vault_group_size; }
  std::uint32_t segment_size() const { return config_.segment_size; }
  Placement placement() const { return config_.placement; }

  std::uint32_t group_of_vault(std::uint32_t vault) const { return vault / group_size(); }

  // Tables (all their columns with them) are assigned round-robin so load
  // spreads across groups; the home vault rotates within the group so local
  // placement does not pile every table onto one vault.
  std::uint32_t home_group(TableId table) const { return table % groups(); }
  std::uint32_t home_vault(TableId table) const {
    return home_group(table) * group_size() + (table / groups()) % group_size();
  }

  // Columns are split at segment granularity (segment_size rows). A segment
  // lives wholly in one vault, so a task over it has a single home.
  std::uint32_t segment_vault(TableId table, std::uint64_t segment_index) const {
    switch (config_.placement) {
      case Placement::Local:
        return home_vault(table);
      case Placement::Remote:
        return static_cast<std::uint32_t>(segment_index % vaults());
      case Placement::Hybrid:
        return home_group(table) * group_size() +
               static_cast<std::uint32_t>(segment_index % group_size());
    }
    throw ConfigError("unknown placement");
  }

  std::uint32_t segment_group(TableId table, std::uint64_t segment_index) const {
    return group_of_vault(segment_vault(table, segment_index));
  }

  std::vector<std::uint32_t> dictionary_vaults(TableId table) const {
    switch (config_.placement) {
      case Placement::Local:
        return {home_vault(table)};
      case Placement::Remote:
        // One shared dictionary; by convention it lives in vault 0.
        return {0};
      case Placement::Hybrid: {
        // Full dictionary replica in every vault of the home group.
        std::vector<std::uint32_t> v;
        const std::uint32_t base = home_group(table) * group_size();
        for (std::uint32_t i = 0; i < group_size(); ++i) v.push_back(base + i);
        return v;
      }
    }
    throw ConfigError("unknown placement");
  }

  bool dictionary_local(TableId table, std::uint32_t worker_vault) const {
    switch (config_.placement) {
      case Placement::Local:
        return worker_vault == home_vault(table);
      case Placement::Remote:
        return worker_vault == 0;
      case Placement::Hybrid:
        return group_of_vault(worker_vault) == home_group(table);
    }
    return false;
  }

 private:
  TopologyConfig config_;
};

struct ColumnPartition {
  std::uint32_t vault = 0;
  std::uint64_t rows = 0;
};

struct ColumnPlacement {
  std::vector<ColumnPartition> partitions;        // nonempty partitions, first-touch order
  std::vector<std::uint32_t> dictionary_vaults;   // where full dictionary copies live
};

// Describes how one column of `row_count` rows is partitioned under the given
// strategy; placement is derived per segment, identically to task homing.
ColumnPlacement place_column(const TopologyModel& topo, TableId table, std::uint64_t row_count,
                             Placement strategy);

}  // namespace islanddb
