#include "asmc/harness/fixtures.hpp"

#include "asmc/ips.hpp"

namespace asmc::harness {

Genealogy toy_genealogy() {
  // rows A_0..A_5, 1-based as drawn
  const std::vector<std::vector<Index>> one_based{
      {1, 1, 3, 5, 3}, {4, 4, 2, 4, 3}, {5, 2, 1, 5, 2},
      {1, 2, 4, 2, 2}, {2, 3, 5, 3, 3}, {2, 1, 2, 3, 5}};
  auto rows = one_based;
  for (auto& row : rows) {
    for (Index& a : row) --a;
  }
  return make_genealogy(5, std::move(rows));
}

ParticleSystemTrace<double> toy_trace() {
  ParticleSystemTrace<double> t;
  t.genealogy = toy_genealogy();
  t.slim = true;
  t.states = {{0.25, -1.5, 2.0, 0.75, 3.5}};
  return t;
}

DiscreteModel two_state_model(int n_levels) {
  DiscreteModel m;
  m.states_per_level.assign(static_cast<std::size_t>(n_levels) + 1, 2);
  m.eta0 = {0.6, 0.4};
  const std::vector<std::vector<double>> potentials{{1.0, 2.5}, {1.75, 0.5}, {0.8, 1.6}};
  const std::vector<std::vector<std::vector<double>>> kernels{
      {{0.7, 0.3}, {0.2, 0.8}}, {{0.45, 0.55}, {0.9, 0.1}}, {{0.35, 0.65}, {0.6, 0.4}}};
  for (int p = 0; p < n_levels; ++p) {
    const auto k = static_cast<std::size_t>(p) % potentials.size();
    m.levels.push_back({potentials[k], kernels[k]});
  }
  m.validate();
  return m;
}

DiscreteModel consistency_model() {
  DiscreteModel m;
  m.states_per_level = {3, 3, 3, 3};
  m.eta0 = {0.5, 0.3, 0.2};
  m.levels = {
      {{1.0, 2.0, 0.5}, {{0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}, {0.25, 0.25, 0.5}}},
      {{1.5, 0.75, 1.25}, {{0.5, 0.25, 0.25}, {0.1, 0.6, 0.3}, {0.3, 0.3, 0.4}}},
      {{0.8, 1.6, 1.2}, {{0.4, 0.4, 0.2}, {0.3, 0.2, 0.5}, {0.2, 0.3, 0.5}}},
  };
  m.validate();
  return m;
}

std::vector<double> consistency_function() { return {1.0, -0.5, 2.0}; }

DiscreteModel collapse_model(int n_levels) {
  constexpr std::size_t k = 10;
  DiscreteModel m;
  m.states_per_level.assign(static_cast<std::size_t>(n_levels) + 1, k);
  m.eta0.assign(k, 1.0 / k);
  DiscreteLevel lv;
  lv.potential.assign(k, 1e-3);
  lv.potential[0] = 1.0;
  lv.mutation.assign(k, std::vector<double>(k, 1.0 / k));
  m.levels.assign(static_cast<std::size_t>(n_levels), lv);
  m.validate();
  return m;
}

ParticleSystemTrace<DiscreteState> random_discrete_trace(Rng& rng, std::size_t n_particles,
                                                         int n_levels, std::size_t states) {
  const DiscreteModel model =
      random_discrete_model(rng, n_levels, states, 2.0 * rng.uniform(), rng.uniform());
  const auto fk = to_feynman_kac(model);
  const RngStreamSpec stream{rng(), rng()};
  return run_ips(fk, n_particles, AdaptivityMode::Nonadaptive, stream);
}

}  // namespace asmc::harness
