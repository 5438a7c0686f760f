#pragma once

#include <cstddef>
#include <vector>

#include "asmc/oracle/discrete_model.hpp"
#include "asmc/rng.hpp"
#include "asmc/trace.hpp"

namespace asmc::harness {

/// The five-particle, six-step toy genealogy (0-based in memory). Its Eve
/// indices are (3, 5, 3, 5, 3) in 1-based terms.
Genealogy toy_genealogy();

/// Toy genealogy with scalar terminal states X_6^1..X_6^5.
ParticleSystemTrace<double> toy_trace();

/// Two-state model with mild potentials, for exhaustive enumeration.
DiscreteModel two_state_model(int n_levels);

/// Three states, three steps, moderate selection and mixing. The function
/// values f on E_n come with it.
DiscreteModel consistency_model();
std::vector<double> consistency_function();

/// Strong selection with fresh uniform mutations: the genealogy collapses
/// within a few dozen levels at N = 200.
DiscreteModel collapse_model(int n_levels);

/// A trace of a random discrete model with `states` points per level.
ParticleSystemTrace<DiscreteState> random_discrete_trace(Rng& rng, std::size_t n_particles,
                                                         int n_levels, std::size_t states = 3);

}  // namespace asmc::harness
