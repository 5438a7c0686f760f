#include "asmc/disjoint_lines.hpp"

#include <string>

#include "asmc/error.hpp"

namespace asmc {

EveIndexArray eve_indices(const Genealogy& genealogy, int lag) {
  if (lag < 0 || lag > genealogy.n_levels) {
    throw Error(ErrorCode::LagOutOfRange,
                "eve_indices: lag " + std::to_string(lag) + " outside [0, " +
                    std::to_string(genealogy.n_levels) + "]");
  }
  EveIndexArray out;
  out.level = genealogy.n_levels;
  out.lag = lag;
  out.indices.resize(genealogy.n_particles);
  for (std::size_t i = 0; i < genealogy.n_particles; ++i) {
    out.indices[i] = static_cast<Index>(i);
  }
  for (int hop = 0; hop < lag; ++hop) {
    const auto& parents =
        genealogy.ancestors[static_cast<std::size_t>(genealogy.n_levels - 1 - hop)];
    for (auto& e : out.indices) e = parents[e];
  }
  return out;
}

DisjointLinesResult disjoint_lines_from_groups(std::span<const double> values,
                                               std::span<const Index> groups, int lag) {
  const std::size_t n = values.size();
  if (groups.size() != n || n < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "disjoint_lines: need matching value/group arrays with N >= 2");
  }
  std::vector<double> group_sum(n, 0.0);
  std::vector<std::size_t> group_count(n, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    group_sum[groups[i]] += values[i];
    ++group_count[groups[i]];
    total += values[i];
  }
  double squares = 0.0;
  double same_group_pairs = 0.0;
  std::size_t distinct = 0;
  for (std::size_t e = 0; e < n; ++e) {
    if (group_count[e] == 0) continue;
    ++distinct;
    squares += group_sum[e] * group_sum[e];
    same_group_pairs += static_cast<double>(group_count[e]) * static_cast<double>(group_count[e]);
  }
  DisjointLinesResult r;
  r.eve_groups = distinct;
  r.degenerate = distinct == 1;
  r.disjoint_pairs = static_cast<double>(n) * static_cast<double>(n) - same_group_pairs;
  const double cross = r.degenerate ? 0.0 : total * total - squares;
  const double eta = total / static_cast<double>(n);
  r.value = eta * eta - coalescent_prefactor(n, lag) * cross;
  return r;
}

DisjointLinesResult disjoint_lines_untruncated(const Genealogy& genealogy,
                                               std::span<const double> values) {
  return disjoint_lines_from_groups(values, genealogy.eve, genealogy.n_levels);
}

DisjointLinesResult disjoint_lines_values(const Genealogy& genealogy,
                                          std::span<const double> values, int lag) {
  const EveIndexArray eve = eve_indices(genealogy, lag);
  return disjoint_lines_from_groups(values, eve.indices, lag);
}

}  // namespace asmc
