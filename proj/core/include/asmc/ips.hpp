#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "asmc/error.hpp"
#include "asmc/model.hpp"
#include "asmc/multinomial.hpp"
#include "asmc/rng.hpp"
#include "asmc/trace.hpp"

namespace asmc {

struct RunOptions {
  // keep ancestors, potentials, normalizers and the terminal cloud only
  bool slim = false;
};

/// Simulates the interacting particle system: X_0 ~ eta_0^{(x)N}, then for
/// each level p a multinomial selection from G_{p,z} followed by mutation
/// through M_{p+1,z}, where z is the realized Z_p^N (Adaptive) or the
/// reference z_p* (Nonadaptive).
///
/// The trace is a deterministic function of (model, N, mode, stream).
template <FeynmanKacModelType Model>
ParticleSystemTrace<typename Model::State> run_ips(const Model& model,
                                                    std::size_t n_particles,
                                                    AdaptivityMode mode,
                                                    RngStreamSpec stream,
                                                    RunOptions options = {}) {
  using State = typename Model::State;
  if (n_particles < 2) {
    throw Error(ErrorCode::InvalidArgument, "run_ips: need N >= 2 particles");
  }
  const int n = model.n_levels();
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "run_ips: negative level count");
  if (mode == AdaptivityMode::Nonadaptive) {
    for (int p = 0; p < n; ++p) {
      if (model.reference_parameter(p) == nullptr) {
        throw Error(ErrorCode::InvalidArgument,
                    "run_ips: nonadaptive mode needs reference parameter z_" +
                        std::to_string(p) + "*");
      }
    }
  }

  ParticleSystemTrace<State> trace;
  trace.slim = options.slim;
  Genealogy& g = trace.genealogy;
  g.n_particles = n_particles;
  g.n_levels = n;
  g.seed = stream;
  g.mode = mode;
  const auto levels = static_cast<std::size_t>(n);
  g.ancestors.reserve(levels);
  g.potentials.reserve(levels);
  g.normalizers.reserve(levels + 1);
  g.adaptive_params.reserve(levels + 1);
  g.normalizers.push_back(1.0);
  if (!options.slim) trace.states.reserve(levels + 1);

  Rng rng(stream);
  std::vector<State> current;
  current.reserve(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i) current.push_back(model.sample_initial(rng));

  g.eve.resize(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i) g.eve[i] = static_cast<Index>(i);
  std::vector<Index> next_eve(n_particles);

  const std::size_t dim = model.summary_dim();
  std::vector<double> stat(dim);
  MultinomialSampler sampler;

  for (int p = 0;; ++p) {
    // Z_p^N by a running mean: exact when the statistic is constant
    Parameter realized;
    realized.values.assign(dim, 0.0);
    realized.shape = {dim};
    if (dim > 0) {
      for (std::size_t i = 0; i < n_particles; ++i) {
        model.summary(p, current[i], stat);
        const double k = static_cast<double>(i + 1);
        for (std::size_t c = 0; c < dim; ++c) {
          realized.values[c] += (stat[c] - realized.values[c]) / k;
        }
      }
    }
    g.adaptive_params.push_back(std::move(realized));
    if (p == n) break;

    const Parameter& z = mode == AdaptivityMode::Adaptive ? g.adaptive_params.back()
                                                          : *model.reference_parameter(p);
    const auto kernel = model.bind(p, z);

    std::vector<double> weights(n_particles);
    for (std::size_t i = 0; i < n_particles; ++i) {
      const double w = kernel.potential(current[i]);
      if (!std::isfinite(w) || w <= 0.0) {
        std::ostringstream msg;
        msg << "potential G_" << p << " evaluated to " << w << " at particle " << i
            << " (positivity/boundedness assumption violated)";
        throw Error(ErrorCode::PotentialViolation, msg.str());
      }
      weights[i] = w;
    }
    g.normalizers.push_back(g.normalizers.back() * potential_mean(weights));

    std::vector<Index> parents(n_particles);
    sampler.draw(weights, parents, rng);

    std::vector<State> next;
    next.reserve(n_particles);
    for (std::size_t i = 0; i < n_particles; ++i) {
      next.push_back(kernel.mutate(current[parents[i]], rng));
      next_eve[i] = g.eve[parents[i]];
    }
    g.eve.swap(next_eve);

    g.potentials.push_back(std::move(weights));
    g.ancestors.push_back(std::move(parents));
    if (!options.slim) trace.states.push_back(std::move(current));
    current = std::move(next);
  }
  trace.states.push_back(std::move(current));
  return trace;
}

/// eta_level^N(f) = (1/N) sum_i f(X_level^i).
template <class State, class F>
double empirical_measure(const ParticleSystemTrace<State>& trace, int level, F&& f) {
  const auto& cloud = trace.level_states(level);
  double sum = 0.0;
  for (const State& x : cloud) sum += f(x);
  return sum / static_cast<double>(cloud.size());
}

/// gamma_level^N(f) = eta_level^N(f) * prod_{q < level} eta_q^N(G_{q,N}).
template <class State, class F>
double unnormalized_estimate(const ParticleSystemTrace<State>& trace, int level, F&& f) {
  const double eta = empirical_measure(trace, level, std::forward<F>(f));
  return trace.genealogy.normalizers[static_cast<std::size_t>(level)] * eta;
}

}  // namespace asmc
