#include "asmc/trace.hpp"

#include <cmath>

namespace asmc {

double potential_mean(std::span<const double> potentials) noexcept {
  double sum = 0.0;
  for (double g : potentials) sum += g;
  return sum / static_cast<double>(potentials.size());
}

void Genealogy::validate() const {
  const auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::InvalidArgument, "genealogy: " + msg);
  };
  if (n_particles < 2) fail("need at least two particles");
  if (n_levels < 0) fail("negative level count");
  const auto n = static_cast<std::size_t>(n_levels);
  if (ancestors.size() != n) fail("ancestor levels != n");
  if (potentials.size() != n) fail("potential levels != n");
  if (normalizers.size() != n + 1) fail("normalizer levels != n + 1");
  if (eve.size() != n_particles) fail("eve array has wrong length");
  if (normalizers[0] != 1.0) fail("normalizers[0] != 1");
  for (std::size_t p = 0; p < n; ++p) {
    if (ancestors[p].size() != n_particles) fail("ancestor row has wrong length");
    if (potentials[p].size() != n_particles) fail("potential row has wrong length");
    for (Index a : ancestors[p]) {
      if (a >= n_particles) fail("ancestor index out of range");
    }
    for (double g : potentials[p]) {
      if (!std::isfinite(g) || g <= 0.0) fail("non-positive or non-finite potential");
    }
    if (normalizers[p + 1] != normalizers[p] * potential_mean(potentials[p])) {
      fail("normalizer recursion broken at level " + std::to_string(p + 1));
    }
  }
  for (Index e : eve) {
    if (e >= n_particles) fail("eve index out of range");
  }
}

std::vector<Index> compose_eve(const Genealogy& g) {
  std::vector<Index> eve(g.n_particles);
  for (std::size_t i = 0; i < g.n_particles; ++i) eve[i] = static_cast<Index>(i);
  for (int p = g.n_levels - 1; p >= 0; --p) {
    const auto& parents = g.ancestors[static_cast<std::size_t>(p)];
    for (auto& e : eve) e = parents[e];
  }
  return eve;
}

Genealogy make_genealogy(std::size_t n_particles,
                         std::vector<std::vector<Index>> ancestors) {
  Genealogy g;
  g.n_particles = n_particles;
  g.n_levels = static_cast<int>(ancestors.size());
  g.ancestors = std::move(ancestors);
  g.potentials.assign(g.ancestors.size(), std::vector<double>(n_particles, 1.0));
  g.normalizers.assign(g.ancestors.size() + 1, 1.0);
  g.adaptive_params.assign(g.ancestors.size() + 1, Parameter{});
  g.eve = compose_eve(g);
  g.validate();
  return g;
}

}  // namespace asmc
