#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "asmc/error.hpp"
#include "asmc/trace.hpp"

namespace asmc {

/// Bits b_0..b_n; b_p = 1 marks a coalescence of the two ancestral lines at
/// level p.
struct CoalescenceIndicator {
  std::vector<std::uint8_t> bits;

  int n_levels() const noexcept { return static_cast<int>(bits.size()) - 1; }
  bool operator[](std::size_t p) const noexcept { return bits[p] != 0; }

  static CoalescenceIndicator none(int n);
  static CoalescenceIndicator single(int n, int level);
  // bit p of `mask` becomes b_p
  static CoalescenceIndicator from_mask(int n, std::uint64_t mask);
};

/// Lambda_level^{(i,j)}: the number of index-pair sequences l_{0:level}
/// compatible with the indicator and ending at (i, j). Row-major N x N with a
/// zero diagonal.
struct LambdaTable {
  int level = 0;
  std::size_t n_particles = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return values[i * n_particles + j];
  }
};

/// Largest count kept exactly; lambda_dp throws PrecisionLoss above it.
inline constexpr double kExactCountCeiling = 9007199254740992.0;  // 2^53

LambdaTable lambda_table_level0(std::size_t n_particles);

/// One step of the recursion, from Lambda_p to Lambda_{p+1}.
///   b_p = 0: L'(i,j) = [A_i != A_j] L(A_i, A_j)
///   b_p = 1: L'(i,j) = [A_i == A_j] sum_{k != A_i} L(A_i, k)
void lambda_step(const LambdaTable& current, std::span<const Index> parents,
                 bool coalesce, LambdaTable& next);

/// Lambda_n for the full genealogy, O((n+1) N^2).
LambdaTable lambda_dp(const Genealogy& genealogy, const CoalescenceIndicator& b);

/// N^{h-1} / (N-1)^{h+1}, assembled in log space.
double coalescent_prefactor(std::size_t n_particles, int h) noexcept;

/// sum_{i != j} Lambda(i,j) C_{b_n}(F)(X^i, X^j) with F given as an N x N
/// row-major matrix of F(X^i, X^j).
double lambda_contract(const LambdaTable& table, bool coalesce_last,
                       std::span<const double> pair_values);

/// Same contraction for F = u (x) v without materializing the pair matrix.
double lambda_contract_product(const LambdaTable& table, bool coalesce_last,
                               std::span<const double> u, std::span<const double> v);

template <class State, class F>
std::vector<double> pair_matrix(const std::vector<State>& cloud, F&& func) {
  const std::size_t n = cloud.size();
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = func(cloud[i], cloud[j]);
  }
  return out;
}

template <class State, class F>
std::vector<double> evaluate(const std::vector<State>& cloud, F&& f) {
  std::vector<double> out;
  out.reserve(cloud.size());
  for (const State& x : cloud) out.push_back(f(x));
  return out;
}

void check_indicator(const Genealogy& genealogy, const CoalescenceIndicator& b);

/// Coalescent tree-based estimate bar-Gamma_{n,N}^b(F) of the normalized
/// measure; F is a two-argument function of states.
template <class State, class F>
double gamma_bar_estimate(const ParticleSystemTrace<State>& trace,
                          const CoalescenceIndicator& b, F&& pair_function) {
  const Genealogy& g = trace.genealogy;
  check_indicator(g, b);
  const LambdaTable table = lambda_dp(g, b);
  const bool last = b[static_cast<std::size_t>(g.n_levels)];
  const auto& cloud = trace.terminal();
  const std::size_t n = cloud.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double count = table(i, j);
      if (count == 0.0) continue;
      sum += count * (last ? pair_function(cloud[i], cloud[i])
                           : pair_function(cloud[i], cloud[j]));
    }
  }
  return coalescent_prefactor(n, g.n_levels) * sum;
}

/// Gamma_{n,N}^b(F) = gamma_n^N(1)^2 * bar-Gamma_{n,N}^b(F).
template <class State, class F>
double gamma_estimate(const ParticleSystemTrace<State>& trace,
                      const CoalescenceIndicator& b, F&& pair_function) {
  const double mass = trace.genealogy.normalizers.back();
  return mass * mass * gamma_bar_estimate(trace, b, std::forward<F>(pair_function));
}

enum class Sigma2Target {
  Gamma,        // sigma^2_{gamma_{n,N}}(f)
  EtaCentered,  // sigma^2_{eta_{n,N}}(f - eta_n^N(f))
  Eta,          // sigma^2_{eta_{n,N}}(f), uncentered
};

/// Term-by-term variance estimate from terminal values f(X_n^i):
///   sum_p (Gamma^{(p)}(f (x) f) - Gamma^{(none)}(f (x) f)),
/// normalized or not according to `target`. n + 2 lambda passes.
double term_by_term_sigma2_values(const Genealogy& genealogy,
                                  std::span<const double> values, Sigma2Target target);

template <class State, class F>
double term_by_term_sigma2(const ParticleSystemTrace<State>& trace, F&& f,
                           Sigma2Target target) {
  const auto values = evaluate(trace.terminal(), std::forward<F>(f));
  return term_by_term_sigma2_values(trace.genealogy, values, target);
}

struct DecompositionResult {
  double lhs = 0.0;  // (eta_n^N)^{(x)2}(F)
  double rhs = 0.0;  // sum over all indicators of the weighted bar-Gamma terms
  double abs_gap = 0.0;
};

inline constexpr int kMaxDecompositionLevels = 20;

/// Checks the exact identity
///   (eta_n^N)^{(x)2}(F) = sum_b prod_p (N-1)^{1-b_p}/N * bar-Gamma_{n,N}^b(F)
/// on a realized trace. Shares Lambda prefixes across indicators, so the cost
/// is O(2^{n+2} N^2). Throws TooManyIndicators for n > 20.
DecompositionResult decomposition_check_pairs(const Genealogy& genealogy,
                                              std::span<const double> pair_values);

template <class State, class F>
DecompositionResult decomposition_check(const ParticleSystemTrace<State>& trace,
                                        F&& pair_function) {
  const auto pairs = pair_matrix(trace.terminal(), std::forward<F>(pair_function));
  return decomposition_check_pairs(trace.genealogy, pairs);
}

}  // namespace asmc
