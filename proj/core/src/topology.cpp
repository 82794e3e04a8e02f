#include "islanddb/topology.hpp"

#include <algorithm>

namespace islanddb {

ColumnPlacement place_column(const TopologyModel& topo, TableId table, std::uint64_t row_count,
                             Placement strategy) {
  TopologyConfig cfg = topo.config();
  cfg.placement = strategy;
  const TopologyModel model(cfg);

  ColumnPlacement out;
  out.dictionary_vaults = model.dictionary_vaults(table);

  const std::uint64_t seg = model.segment_size();
  const std::uint64_t segments = (row_count + seg - 1) / seg;
  std::vector<std::int64_t> slot_of_vault(model.vaults(), -1);
  for (std::uint64_t s = 0; s < segments; ++s) {
    const std::uint32_t vault = model.segment_vault(table, s);
    const std::uint64_t rows = std::min(seg, row_count - s * seg);
    if (slot_of_vault[vault] < 0) {
      slot_of_vault[vault] = static_cast<std::int64_t>(out.partitions.size());
      out.partitions.push_back({vault, 0});
    }
    out.partitions[static_cast<std::size_t>(slot_of_vault[vault])].rows += rows;
  }
  return out;
}

}  // namespace islanddb
