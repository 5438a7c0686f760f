#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "asmc/model.hpp"
#include "asmc/rng.hpp"

namespace asmc::gaussian {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct GaussianSequenceSpec {
  int dimension = 10;
  int max_level = 50;
  int denominator = 99;
  int metropolis_sweeps = 4;
  double proposal_scale = 0.0;  // multiplies the proposal covariance; <= 0 means 2.38^2 / d

  double effective_proposal_scale() const noexcept {
    return proposal_scale > 0.0 ? proposal_scale : 2.38 * 2.38 / dimension;
  }
  void validate() const;
};

/// L_level = (10 (1 - t) + 0.1 t) Id + 0.5 t J with t = level / denominator and
/// J the strictly lower-triangular matrix of ones.
Matrix cholesky_factor(const GaussianSequenceSpec& spec, int level);

/// Sigma_level = L_level L_level^T.
Matrix build_covariance(const GaussianSequenceSpec& spec, int level);

/// |L^{-1} x|^2 = <x, (L L^T)^{-1} x> by one triangular solve.
double quadratic_form(const Matrix& lower, const Vector& x);

/// Proposal covariance ready for sampling. A covariance that is not positive
/// definite is replaced by its diagonal plus 1e-8 * trace / d.
struct ProposalFactor {
  Matrix lower;
  bool fallback = false;
};
ProposalFactor factor_proposal(const Matrix& covariance);

/// [x, upper triangle of x x^T] (row-major over i <= j).
std::size_t summary_dimension(int d) noexcept;
void adaptive_summary_statistic(const Vector& x, std::span<double> out);
std::vector<double> adaptive_summary_statistic(const Vector& x);

/// Sigma^N = second moment - mean mean^T from an averaged summary statistic.
Matrix assemble_covariance(std::span<const double> z, int d);

/// The parameter (0, upper(Sigma)) whose assembled covariance is Sigma.
Parameter covariance_parameter(const Matrix& covariance);

struct MetropolisStats {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
};

/// `sweeps` random walk Metropolis steps with increments proposal * xi,
/// targeting exp(-|target^{-1} x|^2 / 2) where target is lower-triangular.
Vector rwm_mutation(const Matrix& target_lower, const Vector& x, const Matrix& proposal_lower,
                    int sweeps, Rng& rng, MetropolisStats* stats = nullptr);

/// Per-level acceptance counters, shared by every run using the model.
class AcceptanceTelemetry {
 public:
  explicit AcceptanceTelemetry(int levels);
  void record(int level, const MetropolisStats& s) noexcept;
  void record_fallback(int level) noexcept;
  double acceptance_rate(int level) const noexcept;
  std::uint64_t fallbacks(int level) const noexcept;
  int levels() const noexcept { return static_cast<int>(proposed_.size()); }
  void reset() noexcept;

 private:
  std::vector<std::atomic<std::uint64_t>> proposed_;
  std::vector<std::atomic<std::uint64_t>> accepted_;
  std::vector<std::atomic<std::uint64_t>> fallbacks_;
};

/// The bridged Gaussian sequence as a model for the particle engine.
///
/// Level p selects with G_p(x) = exp(-<x, (Sigma_{p+1}^{-1} - Sigma_p^{-1}) x> / 2)
/// and mutates with RWM targeting Sigma_{p+1}. The proposal covariance is
/// scale * Sigma_p (reference parameter) or scale * Sigma_p^N (adaptive).
class GaussianBridgeModel {
 public:
  using State = Vector;

  explicit GaussianBridgeModel(GaussianSequenceSpec spec);

  const GaussianSequenceSpec& spec() const noexcept { return spec_; }
  int n_levels() const noexcept { return spec_.max_level; }
  std::size_t summary_dim() const noexcept { return summary_dimension(spec_.dimension); }

  State sample_initial(Rng& rng) const;
  void summary(int level, const State& x, std::span<double> out) const;
  const Parameter* reference_parameter(int level) const noexcept;

  double bridge_potential(int level, const State& x) const;
  const Matrix& lower(int level) const { return lower_.at(static_cast<std::size_t>(level)); }
  AcceptanceTelemetry& telemetry() const noexcept { return *telemetry_; }

  struct Bound {
    const GaussianBridgeModel* model;
    int level;
    Matrix proposal_lower;

    double potential(const State& x) const { return model->bridge_potential(level, x); }
    State mutate(const State& parent, Rng& rng) const;
  };

  Bound bind(int level, const Parameter& z) const;

 private:
  GaussianSequenceSpec spec_;
  std::vector<Matrix> lower_;
  std::vector<Parameter> reference_;
  std::shared_ptr<AcceptanceTelemetry> telemetry_;
};

/// f(x) = x^(1), the benchmark's test function.
inline double first_coordinate(const Vector& x) { return x(0); }

}  // namespace asmc::gaussian

namespace nlohmann {
template <>
struct adl_serializer<Eigen::VectorXd> {
  static void to_json(json& j, const Eigen::VectorXd& v) {
    j = std::vector<double>(v.data(), v.data() + v.size());
  }
  static void from_json(const json& j, Eigen::VectorXd& v) {
    const auto values = j.get<std::vector<double>>();
    v = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
};
}  // namespace nlohmann
