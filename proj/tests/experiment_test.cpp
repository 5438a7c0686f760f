#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "asmc/format.hpp"
#include "asmc/harness/experiment.hpp"
#include "asmc/harness/fixtures.hpp"
#include "asmc/trace_io.hpp"

using namespace asmc;
using namespace asmc::harness;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("asmc_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

json small_gaussian() {
  return json{{"model", {{"type", "gaussian-bench"}, {"dimension", 2}}},
              {"n", 3},
              {"N", {20, 40}},
              {"replicates", 4},
              {"lags", {1, 3}},
              {"term_by_term", true},
              {"seed", 77},
              {"reference", {{"replicates", 6}, {"N", 30}}},
              {"threads", 1}};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ASMC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const auto c = parse_config(json::object());
  EXPECT_EQ(c.model, ModelKind::GaussianBench);
  EXPECT_EQ(c.gaussian.dimension, 10);
  EXPECT_EQ(c.gaussian.max_level, 50);
  EXPECT_EQ(c.particle_counts, (std::vector<std::size_t>{100}));
  EXPECT_EQ(c.modes.size(), 2u);

  const auto doc = apply_overrides(small_gaussian(), {"seed=5", "model.sweeps=2", "output_dir=out dir", "N=[7]"});
  const auto o = parse_config(doc);
  EXPECT_EQ(o.seed, 5u);
  EXPECT_EQ(o.gaussian.metropolis_sweeps, 2);
  EXPECT_EQ(o.gaussian.dimension, 2);
  EXPECT_EQ(o.output_dir, "out dir");
  EXPECT_EQ(o.particle_counts, (std::vector<std::size_t>{7}));
  ASSERT_TRUE(o.reference.has_value());
  EXPECT_EQ(o.reference->n_particles, 30u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(apply_overrides(json::object(), {"novalue"}), Error);
  EXPECT_THROW(parse_config(json{{"model", {{"type", "nope"}}}}), Error);
  EXPECT_THROW(parse_config(json{{"modes", {"sometimes"}}}), Error);
  EXPECT_THROW(parse_config(json::array()), Error);
  EXPECT_THROW(load_config("/nonexistent/config.json"), Error);
}

#ifdef ASMC_CONFIG_DIR
TEST(Config, ShippedConfigsParse) {
  const fs::path dir = ASMC_CONFIG_DIR;
  const auto g = load_config((dir / "gaussian_desk.json").string());
  EXPECT_EQ(g.gaussian.max_level, 10);
  EXPECT_EQ(g.particle_counts, (std::vector<std::size_t>{100, 500, 2000}));
  const auto d = load_config((dir / "discrete_oracle.json").string());
  ASSERT_TRUE(d.discrete.has_value());
  EXPECT_EQ(d.discrete->n_levels(), 3);
  EXPECT_TRUE(d.oracle);
}
#endif

TEST(Experiment, ReplicatesMatchSingleRuns) {
  const auto config = parse_config(small_gaussian());
  const auto result = run_experiment(config);
  ASSERT_EQ(result.groups.size(), 4u);
  EXPECT_EQ(result.groups[0].n_particles, 20u);
  EXPECT_EQ(result.groups[0].mode, AdaptivityMode::Adaptive);
  EXPECT_EQ(result.groups[1].mode, AdaptivityMode::Nonadaptive);
  for (const auto& g : result.groups) {
    ASSERT_EQ(g.reports.size(), 4u);
    for (std::size_t r = 0; r < 4; ++r) {
      const auto single = run_replicate(config, g.n_particles, g.mode, r);
      EXPECT_EQ(report_csv_fields(single), report_csv_fields(g.reports[r]));
    }
    EXPECT_EQ(g.acceptance.size(), 3u);
  }
  ASSERT_TRUE(result.reference.has_value());
  EXPECT_EQ(result.reference->replicates, 6u);
  EXPECT_LT(result.reference->ci_lo, result.reference->sigma2);
  EXPECT_GT(result.reference->ci_hi, result.reference->sigma2);
}

TEST(Experiment, SingleReplicateAggregatePassesThrough) {
  auto doc = small_gaussian();
  doc["replicates"] = 1;
  doc.erase("reference");
  const auto result = run_experiment(parse_config(doc));
  const auto rows = aggregate(result);
  ASSERT_EQ(rows.size(), 4u);
  const auto names = aggregate_columns(result.config);
  const auto& report = result.groups[0].reports[0];
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == "sigma2_eta_scaled") {
      ASSERT_TRUE(rows[0].columns[k].has_value());
      EXPECT_EQ(rows[0].columns[k]->mean, report.sigma2_eta_scaled);
    }
  }
}

TEST(Experiment, OracleColumnsForDiscreteModels) {
  const auto dir = scratch("oracle");
  std::ofstream(dir / "model.json") << discrete_model_to_json(two_state_model(2)).dump();
  const json doc{{"model", {{"type", "discrete-file"}, {"path", "model.json"}}},
                 {"N", {8}},
                 {"modes", {"nonadaptive"}},
                 {"replicates", 3},
                 {"oracle", true},
                 {"test_function", {{"type", "values"}, {"values", {1.0, -1.0}}}}};
  std::ofstream(dir / "config.json") << doc.dump();
  const auto config = load_config((dir / "config.json").string());
  const auto result = run_experiment(config);
  ASSERT_TRUE(result.exact.has_value());
  const auto csv = aggregate_csv(result);
  const auto header = split_csv(lines(csv)[0]);
  EXPECT_NE(std::find(header.begin(), header.end(), "exact_sigma2_eta_centered"), header.end());
}

TEST(Outputs, PlotDataRowsAndRoundTrip) {
  const auto result = run_experiment(parse_config(small_gaussian()));
  const std::string agg = aggregate_csv(result);
  const auto table = lines(plot_data(agg, {"adaptive", "nonadaptive", "reference"}));
  EXPECT_EQ(table[0], "N,series,y,y_lo,y_hi");
  EXPECT_EQ(table.size(), 1u + 2u * 3u);
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto f = split_csv(table[i]);
    ASSERT_EQ(f.size(), 5u);
    EXPECT_LE(parse_double(f[3]), parse_double(f[2]));
    EXPECT_GE(parse_double(f[4]), parse_double(f[2]));
  }
  EXPECT_EQ(lines(plot_data(agg, {"adaptive"})).size(), 3u);
  try {
    plot_data(agg, {"missing"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingSeries);
  }
  const auto j = aggregate_json(result);
  EXPECT_EQ(j.at("rows").size(), lines(agg).size() - 1);
}

#ifdef ASMC_CLI_PATH
TEST(Cli, RunsAreByteIdentical) {
  const auto dir = scratch("cli");
  std::ofstream(dir / "config.json") << small_gaussian().dump();
  const std::string cfg = (dir / "config.json").string();
  ASSERT_EQ(run_cli("run " + cfg + " --out " + (dir / "a").string() + " --threads 1"), 0);
  ASSERT_EQ(run_cli("run " + cfg + " --out " + (dir / "b").string() + " --threads 3"), 0);
  for (const char* name : {"replicates.csv", "aggregate.csv", "replicates.json", "aggregate.json"}) {
    const auto a = slurp(dir / "a" / name);
    EXPECT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, slurp(dir / "b" / name)) << name;
  }
  ASSERT_EQ(run_cli("run " + cfg + " --out " + (dir / "c").string() + " --seed 78"), 0);
  EXPECT_NE(slurp(dir / "a" / "replicates.csv"), slurp(dir / "c" / "replicates.csv"));

  const auto csv = lines(slurp(dir / "a" / "replicates.csv"));
  EXPECT_EQ(csv.size(), 1u + 4u * 4u);

  ASSERT_EQ(run_cli("plot-data " + (dir / "a" / "aggregate.csv").string() + " --out " +
                    (dir / "plot.csv").string() + " --series adaptive,reference"),
            0);
  EXPECT_EQ(lines(slurp(dir / "plot.csv")).size(), 1u + 2u * 2u);
  EXPECT_NE(run_cli("plot-data " + (dir / "a" / "aggregate.csv").string() + " --out " +
                    (dir / "p2.csv").string() + " --series bogus"),
            0);
}

TEST(Cli, ErrorsWriteRecord) {
  const auto dir = scratch("cli_err");
  auto doc = small_gaussian();
  doc["model"]["dimension"] = 0;
  std::ofstream(dir / "config.json") << doc.dump();
  const int code = run_cli("run " + (dir / "config.json").string() + " --out " + (dir / "out").string());
  EXPECT_EQ(code, 2);
  const auto record = json::parse(slurp(dir / "out" / "error.json"));
  EXPECT_EQ(record.at("error").get<std::string>(), std::string(to_string(ErrorCode::InvalidArgument)));
  EXPECT_NE(run_cli("run /nonexistent/config.json"), 0);
  EXPECT_NE(run_cli("bogus-subcommand"), 0);
}
#endif
