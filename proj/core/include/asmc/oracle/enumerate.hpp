#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "asmc/coalescent.hpp"
#include "asmc/oracle/discrete_model.hpp"
#include "asmc/trace.hpp"

namespace asmc {

inline constexpr double kMaxEnumeratedOutcomes = 1e7;

/// |E_0|^N * prod_p (N^N |E_{p+1}|^N): the number of (states, ancestors)
/// configurations, attainable or not.
double enumeration_size(const DiscreteModel& model, std::size_t n_particles);

using OutcomeVisitor =
    std::function<void(const ParticleSystemTrace<DiscreteState>& trace, double probability)>;

/// Visits every configuration of positive probability under the nonadaptive
/// particle system law, with potentials, normalizers and Eve indices filled
/// in. Throws InstanceTooLarge above 10^7 configurations. Returns the total
/// probability visited.
double enumerate_ips(const DiscreteModel& model, std::size_t n_particles,
                     const OutcomeVisitor& visit);

struct UnbiasednessResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;           // |lhs - rhs|
  double relative_gap = 0.0;  // gap / max(|lhs|, |rhs|), 0 when both vanish
};

/// lhs = E[gamma_n^N(1)^2 V_n^N(f)], rhs = Var[gamma_n^N(f)], both exact.
UnbiasednessResult unbiasedness_check(const DiscreteModel& model, std::size_t n_particles,
                                      std::span<const double> f);

struct CoalescentUnbiasedness {
  CoalescenceIndicator b;
  UnbiasednessResult result;  // lhs = E[Gamma_{n,N}^b(f (x) g)], rhs = Gamma_n^b(f (x) g)
};

/// The same check for the coalescent estimators over all 2^{n+1} indicators,
/// sharing one enumeration pass.
std::vector<CoalescentUnbiasedness> coalescent_unbiasedness_check(
    const DiscreteModel& model, std::size_t n_particles, std::span<const double> f,
    std::span<const double> g);

}  // namespace asmc
