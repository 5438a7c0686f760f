#include "asmc/oracle/brute_force.hpp"

#include <cmath>

namespace asmc {

namespace {

// lambda_p^b(a, l) for a = (A_p^{l_{p+1}^1}, A_p^{l_{p+1}^2})
bool lambda_factor(bool coalesce, Index a1, Index a2, Index l1, Index l2) {
  if (l1 == l2) return false;
  if (!coalesce) return a1 == l1 && a2 == l2 && l1 != l2;
  return a1 == l1 && l1 == a2 && a2 != l2;
}

struct Walker {
  const Genealogy& g;
  const CoalescenceIndicator& b;

  // number of compatible l_{0:p} given l_p... built backwards from level p
  std::uint64_t count(int p, Index i, Index j) const {
    if (p == 0) return 1;
    const auto& row = g.ancestors[static_cast<std::size_t>(p - 1)];
    const bool coalesce = b[static_cast<std::size_t>(p - 1)];
    const auto N = static_cast<Index>(g.n_particles);
    std::uint64_t total = 0;
    for (Index l1 = 0; l1 < N; ++l1) {
      for (Index l2 = 0; l2 < N; ++l2) {
        if (!lambda_factor(coalesce, row[i], row[j], l1, l2)) continue;
        total += count(p - 1, l1, l2);
      }
    }
    return total;
  }
};

}  // namespace

std::vector<std::uint64_t> lambda_brute_force(const Genealogy& genealogy,
                                              const CoalescenceIndicator& b) {
  check_indicator(genealogy, b);
  const std::size_t N = genealogy.n_particles;
  Walker w{genealogy, b};
  std::vector<std::uint64_t> out(N * N, 0);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      out[i * N + j] = w.count(genealogy.n_levels, static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  return out;
}

double gamma_bar_brute_force(const Genealogy& genealogy, const CoalescenceIndicator& b,
                             std::span<const double> pair_values) {
  const auto counts = lambda_brute_force(genealogy, b);
  const std::size_t N = genealogy.n_particles;
  const int n = genealogy.n_levels;
  const bool last = b[static_cast<std::size_t>(n)];
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      const double F = last ? pair_values[i * N + i] : pair_values[i * N + j];
      sum += static_cast<double>(counts[i * N + j]) * F;
    }
  }
  const double Nd = static_cast<double>(N);
  return std::pow(Nd, n - 1) / std::pow(Nd - 1.0, n + 1) * sum;
}

}  // namespace asmc
