#pragma once

#include <span>
#include <vector>

#include "asmc/coalescent.hpp"
#include "asmc/oracle/discrete_model.hpp"

namespace asmc {

struct ExactFlow {
  std::vector<std::vector<double>> gamma;  // gamma_p as a vector on E_p
  std::vector<std::vector<double>> eta;    // eta_p = gamma_p / gamma_p(1)
  std::vector<double> mass;                // gamma_p(1), summed directly
  std::vector<double> mass_product;        // prod_{q < p} eta_q(G_q)
};

/// gamma_p = eta_0 Q_1 ... Q_p by vector-matrix products.
ExactFlow exact_flow(const DiscreteModel& model);

/// Q_{p,n}(f) on E_p by backward products; Q_{n,n} is the identity.
std::vector<double> semigroup_apply(const DiscreteModel& model, int p,
                                    std::span<const double> f);

/// mu(f) = sum_x mu(x) f(x).
double integrate(std::span<const double> measure, std::span<const double> f);

struct ExactVariance {
  double sigma2_gamma = 0.0;         // asymptotic variance of gamma_n^N(f)
  double sigma2_eta = 0.0;           // sigma2_gamma / gamma_n(1)^2
  double sigma2_eta_centered = 0.0;  // same for f - eta_n(f)
};

/// sigma^2_gamma(f) = sum_p (gamma_p(1) gamma_p(Q_{p,n}(f)^2) - gamma_n(f)^2).
ExactVariance exact_asymptotic_variance(const DiscreteModel& model,
                                        std::span<const double> f);

/// Gamma_n^b(F) = eta_0^{(x)2} C_{b_0} Q_1^{(x)2} C_{b_1} ... Q_n^{(x)2} C_{b_n}(F),
/// propagated forward as a measure on pairs. F is |E_n| x |E_n| row-major.
double exact_coalescent_measure(const DiscreteModel& model, const CoalescenceIndicator& b,
                                std::span<const double> pair_function);

}  // namespace asmc
