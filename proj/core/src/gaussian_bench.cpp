#include "asmc/gaussian/bench.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "asmc/error.hpp"

namespace asmc::gaussian {

void GaussianSequenceSpec::validate() const {
  if (dimension < 1) throw Error(ErrorCode::InvalidArgument, "gaussian: dimension must be >= 1");
  if (denominator < 1) throw Error(ErrorCode::InvalidArgument, "gaussian: denominator must be >= 1");
  if (max_level < 0 || max_level + 1 > denominator) {
    throw Error(ErrorCode::InvalidArgument,
                "gaussian: max_level must lie in [0, denominator - 1]");
  }
  if (metropolis_sweeps < 0) {
    throw Error(ErrorCode::InvalidArgument, "gaussian: metropolis_sweeps must be >= 0");
  }
  if (!std::isfinite(proposal_scale)) {
    throw Error(ErrorCode::InvalidArgument, "gaussian: proposal_scale must be finite");
  }
}

Matrix cholesky_factor(const GaussianSequenceSpec& spec, int level) {
  if (level < 0 || level > spec.denominator) {
    throw Error(ErrorCode::InvalidArgument, "gaussian: level outside [0, denominator]");
  }
  const int d = spec.dimension;
  const double t = static_cast<double>(level) / spec.denominator;
  const double diag = 10.0 * (1.0 - t) + 0.1 * t;
  Matrix L = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    L(i, i) = diag;
    for (int j = 0; j < i; ++j) L(i, j) = 0.5 * t;
  }
  if (!(diag > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "gaussian: L_" + std::to_string(level) + " has a non-positive diagonal");
  }
  return L;
}

Matrix build_covariance(const GaussianSequenceSpec& spec, int level) {
  const Matrix L = cholesky_factor(spec, level);
  return L * L.transpose();
}

double quadratic_form(const Matrix& lower, const Vector& x) {
  return lower.triangularView<Eigen::Lower>().solve(x).squaredNorm();
}

ProposalFactor factor_proposal(const Matrix& covariance) {
  Eigen::LLT<Matrix> llt(covariance);
  ProposalFactor out;
  if (llt.info() == Eigen::Success && covariance.allFinite()) {
    out.lower = llt.matrixL();
    if (out.lower.diagonal().minCoeff() > 0.0) return out;
  }
  const auto d = covariance.rows();
  const double jitter = 1e-8 * std::abs(covariance.trace()) / static_cast<double>(d);
  Vector diag = covariance.diagonal().cwiseMax(0.0).array() + jitter;
  if (!(diag.minCoeff() > 0.0) || !diag.allFinite()) diag.setConstant(1e-8);
  out.lower = diag.cwiseSqrt().asDiagonal();
  out.fallback = true;
  return out;
}

std::size_t summary_dimension(int d) noexcept {
  const auto n = static_cast<std::size_t>(d);
  return n + n * (n + 1) / 2;
}

void adaptive_summary_statistic(const Vector& x, std::span<double> out) {
  const auto d = static_cast<std::size_t>(x.size());
  if (out.size() != summary_dimension(static_cast<int>(d))) {
    throw Error(ErrorCode::InvalidArgument, "gaussian: summary buffer has wrong size");
  }
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i) out[k++] = x(static_cast<Eigen::Index>(i));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (Eigen::Index j = i; j < x.size(); ++j) out[k++] = x(i) * x(j);
  }
}

std::vector<double> adaptive_summary_statistic(const Vector& x) {
  std::vector<double> out(summary_dimension(static_cast<int>(x.size())));
  adaptive_summary_statistic(x, out);
  return out;
}

Matrix assemble_covariance(std::span<const double> z, int d) {
  if (z.size() != summary_dimension(d)) {
    throw Error(ErrorCode::InvalidArgument, "gaussian: parameter has wrong size");
  }
  Matrix S(d, d);
  std::size_t k = static_cast<std::size_t>(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const double c = z[k++] - z[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(j)];
      S(i, j) = c;
      S(j, i) = c;
    }
  }
  return S;
}

Parameter covariance_parameter(const Matrix& covariance) {
  const int d = static_cast<int>(covariance.rows());
  Parameter p;
  p.values.assign(summary_dimension(d), 0.0);
  p.shape = {p.values.size()};
  std::size_t k = static_cast<std::size_t>(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) p.values[k++] = covariance(i, j);
  }
  return p;
}

Vector rwm_mutation(const Matrix& target_lower, const Vector& x, const Matrix& proposal_lower,
                    int sweeps, Rng& rng, MetropolisStats* stats) {
  const Eigen::Index d = x.size();
  Vector current = x;
  double current_q = quadratic_form(target_lower, current);
  Vector xi(d);
  for (int s = 0; s < sweeps; ++s) {
    for (Eigen::Index k = 0; k < d; ++k) xi(k) = rng.normal();
    Vector proposal = current + proposal_lower.triangularView<Eigen::Lower>() * xi;
    const double proposal_q = quadratic_form(target_lower, proposal);
    const double log_u = std::log(rng.uniform_pos());
    if (stats) ++stats->proposed;
    if (log_u < -0.5 * (proposal_q - current_q)) {
      current = std::move(proposal);
      current_q = proposal_q;
      if (stats) ++stats->accepted;
    }
  }
  return current;
}

AcceptanceTelemetry::AcceptanceTelemetry(int levels)
    : proposed_(static_cast<std::size_t>(levels)),
      accepted_(static_cast<std::size_t>(levels)),
      fallbacks_(static_cast<std::size_t>(levels)) {}

void AcceptanceTelemetry::record(int level, const MetropolisStats& s) noexcept {
  const auto i = static_cast<std::size_t>(level);
  proposed_[i].fetch_add(s.proposed, std::memory_order_relaxed);
  accepted_[i].fetch_add(s.accepted, std::memory_order_relaxed);
}

void AcceptanceTelemetry::record_fallback(int level) noexcept {
  fallbacks_[static_cast<std::size_t>(level)].fetch_add(1, std::memory_order_relaxed);
}

double AcceptanceTelemetry::acceptance_rate(int level) const noexcept {
  const auto i = static_cast<std::size_t>(level);
  const auto p = proposed_[i].load(std::memory_order_relaxed);
  return p == 0 ? 0.0
                : static_cast<double>(accepted_[i].load(std::memory_order_relaxed)) /
                      static_cast<double>(p);
}

std::uint64_t AcceptanceTelemetry::fallbacks(int level) const noexcept {
  return fallbacks_[static_cast<std::size_t>(level)].load(std::memory_order_relaxed);
}

void AcceptanceTelemetry::reset() noexcept {
  for (std::size_t i = 0; i < proposed_.size(); ++i) {
    proposed_[i] = 0;
    accepted_[i] = 0;
    fallbacks_[i] = 0;
  }
}

GaussianBridgeModel::GaussianBridgeModel(GaussianSequenceSpec spec)
    : spec_(spec), telemetry_(std::make_shared<AcceptanceTelemetry>(spec.max_level + 1)) {
  spec_.validate();
  for (int p = 0; p <= spec_.max_level; ++p) {
    lower_.push_back(cholesky_factor(spec_, p));
    reference_.push_back(covariance_parameter(lower_.back() * lower_.back().transpose()));
  }
}

GaussianBridgeModel::State GaussianBridgeModel::sample_initial(Rng& rng) const {
  Vector xi(spec_.dimension);
  for (int k = 0; k < spec_.dimension; ++k) xi(k) = rng.normal();
  return lower_[0].triangularView<Eigen::Lower>() * xi;
}

void GaussianBridgeModel::summary(int, const State& x, std::span<double> out) const {
  adaptive_summary_statistic(x, out);
}

const Parameter* GaussianBridgeModel::reference_parameter(int level) const noexcept {
  if (level < 0 || level >= spec_.max_level) return nullptr;
  return &reference_[static_cast<std::size_t>(level)];
}

double GaussianBridgeModel::bridge_potential(int level, const State& x) const {
  const auto p = static_cast<std::size_t>(level);
  const double exponent =
      -0.5 * (quadratic_form(lower_.at(p + 1), x) - quadratic_form(lower_.at(p), x));
  return std::exp(exponent);
}

GaussianBridgeModel::Bound GaussianBridgeModel::bind(int level, const Parameter& z) const {
  Matrix cov = spec_.effective_proposal_scale() * assemble_covariance(z.values, spec_.dimension);
  ProposalFactor factor = factor_proposal(cov);
  if (factor.fallback) {
    telemetry_->record_fallback(level);
    std::clog << "warning: proposal covariance at level " << level
              << " is not positive definite; using its diagonal plus jitter\n";
  }
  return Bound{this, level, std::move(factor.lower)};
}

GaussianBridgeModel::State GaussianBridgeModel::Bound::mutate(const State& parent, Rng& rng) const {
  MetropolisStats stats;
  Vector out = rwm_mutation(model->lower_[static_cast<std::size_t>(level + 1)], parent,
                            proposal_lower, model->spec_.metropolis_sweeps, rng, &stats);
  model->telemetry_->record(level + 1, stats);
  return out;
}

}  // namespace asmc::gaussian
