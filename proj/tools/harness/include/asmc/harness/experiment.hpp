#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asmc/gaussian/bench.hpp"
#include "asmc/model.hpp"
#include "asmc/oracle/discrete_model.hpp"
#include "asmc/report.hpp"

namespace asmc::harness {

enum class ModelKind { GaussianBench, DiscreteFile };

struct ReferenceBlock {
  std::size_t replicates = 0;
  std::size_t n_particles = 0;
};

struct ExperimentConfig {
  ModelKind model = ModelKind::GaussianBench;
  gaussian::GaussianSequenceSpec gaussian;  // max_level is the terminal level n
  std::string discrete_path;
  std::optional<DiscreteModel> discrete;    // loaded from discrete_path

  std::vector<std::size_t> particle_counts{100};
  std::vector<AdaptivityMode> modes{AdaptivityMode::Adaptive, AdaptivityMode::Nonadaptive};
  std::size_t replicates = 1;
  std::vector<int> lags;
  bool term_by_term = false;
  std::uint64_t seed = 1;

  // Gaussian: a coordinate index. Discrete: values of f on E_n.
  int coordinate = 0;
  std::vector<double> function_values;

  std::optional<ReferenceBlock> reference;
  bool oracle = false;
  std::string output_dir = "asmc-out";
  unsigned threads = 0;  // 0 = all cores
};

/// Defaults, then the document, then `key=value` overrides (dotted keys;
/// values parsed as JSON when possible, as strings otherwise). Relative model
/// paths resolve against `base_dir`.
nlohmann::json apply_overrides(nlohmann::json document, const std::vector<std::string>& overrides);
ExperimentConfig parse_config(const nlohmann::json& document, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Reference streams are keyed off the replicate streams by this offset.
inline constexpr std::uint64_t kReferenceStreamOffset = std::uint64_t{1} << 32;

struct GroupResult {
  std::size_t n_particles = 0;
  AdaptivityMode mode = AdaptivityMode::Nonadaptive;
  std::vector<EstimatorReport> reports;  // by replicate index
  std::vector<double> acceptance;        // per level; Gaussian bench only
};

struct ReferenceResult {
  std::size_t n_particles = 0;
  std::size_t replicates = 0;
  double eta_mean = 0.0;
  double eta_sd = 0.0;
  double sigma2 = 0.0;  // N_ref * sample variance of eta^N(f)
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct ExactColumns {
  double eta = 0.0;
  double sigma2_eta_centered = 0.0;
  double sigma2_gamma = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<GroupResult> groups;  // N-major, then mode, in config order
  std::optional<ReferenceResult> reference;
  std::optional<ExactColumns> exact;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Single replicate, exactly as run_experiment computes it.
EstimatorReport run_replicate(const ExperimentConfig& config, std::size_t n_particles,
                              AdaptivityMode mode, std::uint64_t stream_id);

struct ColumnSummary {
  double mean = 0.0;
  double sd = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// One aggregate row per group plus a "reference" row.
struct AggregateRow {
  std::size_t n_particles = 0;
  std::string series;
  std::size_t replicates = 0;
  std::vector<std::optional<ColumnSummary>> columns;  // aligned with aggregate_columns()
  std::optional<double> crude_sigma2;                 // N * sample variance of eta
  double degenerate_fraction = 0.0;
};

std::vector<std::string> aggregate_columns(const ExperimentConfig& config);
std::vector<AggregateRow> aggregate(const ExperimentResult& result);

void write_outputs(const ExperimentResult& result, const std::string& directory);
std::string replicates_csv(const ExperimentResult& result);
std::string aggregate_csv(const ExperimentResult& result);
nlohmann::json replicates_json(const ExperimentResult& result);
nlohmann::json aggregate_json(const ExperimentResult& result);

/// Long-format plot table from an aggregate CSV: N, series, y, y_lo, y_hi,
/// one row per (N, series). Every N of the sweep carries the reference row.
/// Throws MissingSeries when a requested series is absent.
std::string plot_data(const std::string& aggregate_csv_text, const std::vector<std::string>& series);

}  // namespace asmc::harness
