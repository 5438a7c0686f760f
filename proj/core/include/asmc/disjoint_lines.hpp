#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "asmc/coalescent.hpp"
#include "asmc/trace.hpp"

namespace asmc {

/// indices[i] = index of the level-(n - lag) ancestor of X_n^i.
struct EveIndexArray {
  int level = 0;
  int lag = 0;
  std::vector<Index> indices;
};

/// Backward hops through the ancestor arrays, O(N * lag).
EveIndexArray eve_indices(const Genealogy& genealogy, int lag);

struct DisjointLinesResult {
  double value = 0.0;           // eta^2 - N^{H-1}/(N-1)^{H+1} * sum_{E_i != E_j} f_i f_j
  double disjoint_pairs = 0.0;  // ordered pairs with distinct ancestors
  std::size_t eve_groups = 0;
  bool degenerate = false;      // a single ancestor remains: no disjoint lines
};

/// The disjoint-ancestral-lines estimator for terminal values f(X_n^i) and a
/// grouping by ancestor at lag H. The pair sum is formed in O(N) as
/// (sum f)^2 - sum_e (sum_{E_i = e} f_i)^2.
DisjointLinesResult disjoint_lines_from_groups(std::span<const double> values,
                                               std::span<const Index> groups, int lag);

/// Full-genealogy V_n^N from the Eve indices the engine maintains online.
DisjointLinesResult disjoint_lines_untruncated(const Genealogy& genealogy,
                                               std::span<const double> values);

/// Lag-H estimator, 0 <= H <= n. H = n reproduces the untruncated value.
DisjointLinesResult disjoint_lines_values(const Genealogy& genealogy,
                                          std::span<const double> values, int lag);

template <class State, class F>
DisjointLinesResult disjoint_lines_estimator(const ParticleSystemTrace<State>& trace, F&& f,
                                             int lag) {
  const auto values = evaluate(trace.terminal(), std::forward<F>(f));
  return disjoint_lines_values(trace.genealogy, values, lag);
}

template <class State, class F>
DisjointLinesResult disjoint_lines_estimator(const ParticleSystemTrace<State>& trace, F&& f) {
  const auto values = evaluate(trace.terminal(), std::forward<F>(f));
  return disjoint_lines_untruncated(trace.genealogy, values);
}

}  // namespace asmc
