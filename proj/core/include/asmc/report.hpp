#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asmc/coalescent.hpp"
#include "asmc/disjoint_lines.hpp"
#include "asmc/model.hpp"
#include "asmc/trace.hpp"

namespace asmc {

struct TruncatedEstimate {
  int lag = 0;
  double value = 0.0;  // N * (eta^N(g)^2 - bar-Gamma^{(none,H)}(g (x) g)), g = f - eta^N(f)
  bool degenerate = false;
};

struct TermByTermEstimate {
  double sigma2_gamma = 0.0;
  double sigma2_eta_centered = 0.0;
};

struct EstimatorReport {
  std::size_t n_particles = 0;
  int n_levels = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  AdaptivityMode mode = AdaptivityMode::Nonadaptive;

  double eta_estimate = 0.0;
  double gamma_estimate = 0.0;
  double v_n = 0.0;                  // V_n^N(f)
  double v_n_centered = 0.0;         // V_n^N(f - eta_n^N(f))
  double sigma2_eta_scaled = 0.0;    // N * v_n_centered
  double sigma2_gamma_scaled = 0.0;  // N * gamma_n^N(1)^2 * v_n
  bool degenerate = false;           // full genealogy collapsed to one ancestor
  std::vector<TruncatedEstimate> truncated;
  std::optional<TermByTermEstimate> term_by_term;
};

struct ReportOptions {
  std::vector<int> lags;
  bool term_by_term = false;
};

EstimatorReport variance_report_values(const Genealogy& genealogy,
                                       std::span<const double> values,
                                       const ReportOptions& options);

template <class State, class F>
EstimatorReport variance_report(const ParticleSystemTrace<State>& trace, F&& f,
                                const ReportOptions& options = {}) {
  const auto values = evaluate(trace.terminal(), std::forward<F>(f));
  return variance_report_values(trace.genealogy, values, options);
}

// Column order: N, n, seed, mode, eta, gamma, v_n, v_n_centered,
// sigma2_eta_scaled, sigma2_gamma_scaled, lag_<H>..., then
// sigma2_gamma_tbt, sigma2_eta_tbt when term-by-term values were requested.
std::vector<std::string> report_csv_header(const ReportOptions& options);
std::vector<std::string> report_csv_fields(const EstimatorReport& report);

nlohmann::json report_to_json(const EstimatorReport& report);

}  // namespace asmc
