// Command-line driver: runs one benchmark configuration against a chosen
// engine build and emits a CSV row, or cross-checks all engine builds for
// state equivalence on an identical serialized workload.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "islanddb/bench.hpp"

namespace {

struct CommonOpts {
  std::string engine = "polynesia";
  std::uint64_t seed = 1;
  std::uint32_t txn_threads = 4;
  std::uint32_t analytic_threads = 4;
  std::uint64_t txn_count = 40000;
  std::uint64_t query_count = 400;
  double write_ratio = 0.5;
  std::uint64_t rows = 10000;
  std::uint32_t tables = 4;
  std::uint32_t columns = 4;
  std::uint32_t warehouses = 1;
  std::uint32_t vaults = 16;
  std::uint32_t vault_group_size = 4;
  std::uint32_t workers_per_vault = 4;
  std::uint32_t segment_size = 1000;
  std::uint64_t ship_threshold = 1024;
  std::uint32_t staleness_ms = 10;
  std::string placement = "hybrid";
  bool no_cross_steal = false;
  bool serialized = false;
  std::string output;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--engine", o.engine,
                  "engine build: polynesia|si-ss|si-mvcc|mi-naive, or all for one row per build")
      ->check(CLI::IsMember({"polynesia", "si-ss", "si-mvcc", "mi-naive", "all"}));
  cmd->add_option("--seed", o.seed, "workload seed");
  cmd->add_option("--txn-threads", o.txn_threads, "transactional worker threads");
  cmd->add_option("--analytic-threads", o.analytic_threads, "concurrent query submitters");
  cmd->add_option("--txn-count", o.txn_count, "total transactions across all threads");
  cmd->add_option("--query-count", o.query_count, "total analytical queries");
  cmd->add_option("--vaults", o.vaults, "memory vaults in the analytical island");
  cmd->add_option("--vault-group-size", o.vault_group_size, "vaults per vault group");
  cmd->add_option("--workers-per-vault", o.workers_per_vault, "analytical workers per vault");
  cmd->add_option("--segment-size", o.segment_size, "rows per column segment");
  cmd->add_option("--ship-threshold", o.ship_threshold, "pending updates that trigger shipping");
  cmd->add_option("--staleness-ms", o.staleness_ms, "max time updates wait before shipping");
  cmd->add_option("--placement", o.placement, "dictionary/data placement: local|remote|hybrid")
      ->check(CLI::IsMember({"local", "remote", "hybrid"}));
  cmd->add_flag("--no-cross-steal", o.no_cross_steal, "disable cross-group work stealing");
  cmd->add_flag("--serialized", o.serialized, "run transactions, drain, then queries");
  cmd->add_option("--output", o.output, "append the CSV row to this file (default: stdout)");
}

islanddb::Placement parse_placement(const std::string& name) {
  if (name == "local") return islanddb::Placement::Local;
  if (name == "remote") return islanddb::Placement::Remote;
  return islanddb::Placement::Hybrid;
}

islanddb::BenchConfig make_config(const CommonOpts& o, islanddb::BenchConfig::Workload w) {
  islanddb::BenchConfig c;
  c.workload = w;
  c.engine.mode = islanddb::parse_engine_mode(o.engine);
  c.engine.txn_threads = o.txn_threads;
  c.engine.topology.vaults = o.vaults;
  c.engine.topology.vault_group_size = o.vault_group_size;
  c.engine.topology.workers_per_vault = o.workers_per_vault;
  c.engine.topology.segment_size = o.segment_size;
  c.engine.topology.placement = parse_placement(o.placement);
  c.engine.ship_threshold = o.ship_threshold;
  c.engine.staleness_timer_ms = o.staleness_ms;
  c.engine.cross_group_stealing = !o.no_cross_steal;
  c.engine.expected_rows_per_table = std::max<std::uint64_t>(4096, o.rows * 2);

  c.synthetic.tables = o.tables;
  c.synthetic.columns_per_table = o.columns;
  c.synthetic.rows_per_table = o.rows;
  c.synthetic.write_ratio = o.write_ratio;
  c.order_entry.warehouses = o.warehouses;
  c.line_item.rows = o.rows;

  c.txns_per_thread = o.txn_count / std::max<std::uint32_t>(1, o.txn_threads);
  c.query_count = o.query_count;
  c.analytic_threads = o.analytic_threads;
  c.seed = o.seed;
  c.serialized = o.serialized;
  return c;
}

void emit(const CommonOpts& o, const islanddb::BenchConfig& config,
          const islanddb::BenchResult& result, bool stdout_header) {
  const std::string row = islanddb::csv_row(config, result);
  if (o.output.empty()) {
    if (stdout_header) std::cout << islanddb::csv_header() << "\n";
    std::cout << row << "\n";
    return;
  }
  bool need_header = true;
  {
    std::ifstream probe(o.output);
    need_header = !probe.good() || probe.peek() == std::ifstream::traits_type::eof();
  }
  std::ofstream out(o.output, std::ios::app);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + o.output);
  }
  if (need_header) out << islanddb::csv_header() << "\n";
  out << row << "\n";
  std::cout << row << "\n";
}

int run_workload(const CommonOpts& o, islanddb::BenchConfig::Workload w) {
  if (o.engine == "all") {
    CommonOpts each = o;
    bool first = true;
    for (const char* mode : {"polynesia", "si-ss", "si-mvcc", "mi-naive"}) {
      each.engine = mode;
      const islanddb::BenchConfig config = make_config(each, w);
      const islanddb::BenchResult result = islanddb::run_bench(config);
      emit(each, config, result, first);
      first = false;
    }
    return 0;
  }
  const islanddb::BenchConfig config = make_config(o, w);
  const islanddb::BenchResult result = islanddb::run_bench(config);
  emit(o, config, result, true);
  return 0;
}

// Drives the identical serialized workload through every engine build and
// compares final-state checksums and all query results.
int run_verify(CommonOpts o) {
  o.serialized = true;
  o.txn_threads = 1;  // serialized equivalence is defined over one submission order
  const char* modes[] = {"polynesia", "si-ss", "si-mvcc", "mi-naive"};

  std::vector<std::uint64_t> checksums;
  std::vector<std::vector<std::vector<islanddb::Value>>> answers;
  for (const char* mode : modes) {
    o.engine = mode;
    const islanddb::BenchConfig config = make_config(o, islanddb::BenchConfig::Workload::Synthetic);
    const islanddb::BenchResult result = islanddb::run_bench(config);
    std::printf("engine=%-9s txns=%llu queries=%llu checksum=%016llx\n", mode,
                static_cast<unsigned long long>(result.txn_count),
                static_cast<unsigned long long>(result.query_count),
                static_cast<unsigned long long>(result.state_checksum));
    checksums.push_back(result.state_checksum);
    answers.push_back(result.query_results);
  }

  bool ok = true;
  for (std::size_t i = 1; i < checksums.size(); ++i) {
    if (checksums[i] != checksums[0]) {
      std::printf("MISMATCH: %s checksum differs from polynesia\n", modes[i]);
      ok = false;
    }
    if (answers[i] != answers[0]) {
      std::printf("MISMATCH: %s query results differ from polynesia\n", modes[i]);
      ok = false;
    }
  }
  std::printf("verify: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"in-memory HTAP engine benchmark driver"};
  app.require_subcommand(1);

  CommonOpts opts;

  CLI::App* synthetic =
      app.add_subcommand("bench-synthetic", "mixed random read/write + analytics workload");
  add_common(synthetic, opts);
  synthetic->add_option("--write-ratio", opts.write_ratio, "fraction of ops that write");
  synthetic->add_option("--rows", opts.rows, "rows per table");
  synthetic->add_option("--tables", opts.tables, "table count");
  synthetic->add_option("--columns", opts.columns, "columns per table");

  CLI::App* order = app.add_subcommand("bench-tpcc", "reduced order-entry workload");
  add_common(order, opts);
  order->add_option("--warehouses", opts.warehouses, "warehouse count (1-4 typical)");

  CLI::App* scan = app.add_subcommand("bench-tpch6", "line-item band-filter scan workload");
  add_common(scan, opts);
  scan->add_option("--rows", opts.rows, "line-item rows");

  CLI::App* verify =
      app.add_subcommand("verify", "cross-engine state equivalence on a serialized run");
  add_common(verify, opts);
  verify->add_option("--write-ratio", opts.write_ratio, "fraction of ops that write");
  verify->add_option("--rows", opts.rows, "rows per table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synthetic->parsed()) {
      return run_workload(opts, islanddb::BenchConfig::Workload::Synthetic);
    }
    if (order->parsed()) {
      return run_workload(opts, islanddb::BenchConfig::Workload::OrderEntry);
    }
    if (scan->parsed()) {
      return run_workload(opts, islanddb::BenchConfig::Workload::LineItemScan);
    }
    if (verify->parsed()) {
      return run_verify(opts);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
