#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "asmc/error.hpp"
#include "asmc/harness/criteria.hpp"
#include "asmc/harness/experiment.hpp"
#include "asmc/trace_io.hpp"

namespace {

using namespace asmc;

int fail(const std::string& out_dir, const Error& e) {
  const nlohmann::json record{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  std::cerr << record.dump() << '\n';
  if (!out_dir.empty()) {
    try {
      std::filesystem::create_directories(out_dir);
      write_json_file(out_dir + "/error.json", record);
    } catch (...) {
    }
  }
  const bool config_error = e.code() == ErrorCode::ParseError || e.code() == ErrorCode::InvalidArgument ||
                            e.code() == ErrorCode::IoError;
  return config_error ? 2 : 1;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive SMC with genealogy-based variance estimation"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a replicated experiment from a JSON config");
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::vector<std::string> overrides;
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  auto* out_opt = run->add_option("--out", out_dir, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Master seed");
  auto* threads_opt = run->add_option("--threads", threads, "Worker threads (default: all cores)");
  run->add_option("--override", overrides, "Config override key=value (dotted keys)");

  auto* plot = app.add_subcommand("plot-data", "Long-format plot table from aggregate.csv");
  std::string aggregate_path, plot_out;
  std::vector<std::string> series;
  plot->add_option("aggregate", aggregate_path, "aggregate.csv from a run")->required();
  plot->add_option("--out", plot_out, "Output CSV")->required();
  plot->add_option("--series", series, "Series to emit (adaptive, nonadaptive, reference)")->delimiter(',');

  auto* verify = app.add_subcommand("verify", "Run the oracle and identity acceptance checks");
  bool full = false;
  unsigned verify_threads = 0;
  verify->add_flag("--full", full, "Include the Monte Carlo criteria (minutes)");
  verify->add_option("--threads", verify_threads, "Worker threads (default: all cores)");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    // flags > file > defaults
    if (*seed_opt) overrides.push_back("seed=" + std::to_string(seed));
    if (*threads_opt) overrides.push_back("threads=" + std::to_string(threads));
    if (*out_opt) overrides.push_back("output_dir=" + nlohmann::json(out_dir).dump());
    std::string dir = out_dir;
    try {
      const auto config = harness::load_config(config_path, overrides);
      dir = config.output_dir;
      const auto result = harness::run_experiment(config);
      harness::write_outputs(result, dir);
      std::cout << "wrote " << dir << "/{replicates,aggregate}.{csv,json}\n";
      return 0;
    } catch (const Error& e) {
      return fail(dir, e);
    } catch (const std::exception& e) {
      return fail(dir, Error(ErrorCode::InvalidArgument, e.what()));
    }
  }

  if (*plot) {
    try {
      const std::string table = harness::plot_data(read_text(aggregate_path), series);
      std::ofstream out(plot_out, std::ios::binary);
      if (!out) throw Error(ErrorCode::IoError, "cannot write " + plot_out);
      out << table;
      return 0;
    } catch (const Error& e) {
      return fail("", e);
    }
  }

  harness::CheckOptions options{verify_threads};
  bool all = true;
  for (const auto& entry : harness::acceptance_criteria()) {
    if (entry.statistical && !full) {
      std::cout << "SKIP  " << (entry.id < 10 ? " " : "") << entry.id << "  " << entry.title
                << "  (use --full)\n";
      continue;
    }
    const auto r = harness::run_criterion(entry, options);
    all = all && r.passed;
    std::cout << harness::format_result(r) << std::endl;
  }
  return all ? 0 : 1;
}
