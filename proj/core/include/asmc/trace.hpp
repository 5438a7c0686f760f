#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "asmc/error.hpp"
#include "asmc/model.hpp"
#include "asmc/multinomial.hpp"
#include "asmc/rng.hpp"

namespace asmc {

/// The state-independent part of a realized particle system: genealogy,
/// evaluated potentials and normalizing constants.
///
/// Indices are 0-based in memory; the parent of X_{p+1}^i is
/// X_p^{ancestors[p][i]}. Serialization writes them 1-based.
struct Genealogy {
  std::size_t n_particles = 0;
  int n_levels = 0;
  std::vector<std::vector<Index>> ancestors;    // p in [0, n)
  std::vector<std::vector<double>> potentials;  // G_{p,N}(X_p^i), p in [0, n)
  std::vector<double> normalizers;              // gamma_p^N(1), p in [0, n]
  std::vector<Parameter> adaptive_params;       // realized Z_p^N, p in [0, n]
  std::vector<Index> eve;                       // level-0 ancestor of X_n^i
  RngStreamSpec seed;
  AdaptivityMode mode = AdaptivityMode::Nonadaptive;

  /// Throws InvalidArgument if any stored invariant is broken.
  void validate() const;
};

/// Mean used for the normalizer recursion; shared so that the stored
/// relation normalizers[p+1] = normalizers[p] * mean(potentials[p]) is exact.
double potential_mean(std::span<const double> potentials) noexcept;

/// Genealogy from hard-coded ancestor arrays, with unit potentials and
/// normalizers. Used for fixtures and enumeration.
Genealogy make_genealogy(std::size_t n_particles,
                         std::vector<std::vector<Index>> ancestors);

/// Level-0 ancestor of each particle at the last level, by composing maps.
std::vector<Index> compose_eve(const Genealogy& g);

template <class State>
struct ParticleSystemTrace {
  Genealogy genealogy;
  // states[p] for p in [0, n]; a slim trace keeps only the terminal level.
  std::vector<std::vector<State>> states;
  bool slim = false;

  std::size_t n_particles() const noexcept { return genealogy.n_particles; }
  int n_levels() const noexcept { return genealogy.n_levels; }

  const std::vector<State>& terminal() const { return states.back(); }

  const std::vector<State>& level_states(int level) const {
    if (level < 0 || level > n_levels()) {
      throw Error(ErrorCode::InvalidArgument,
                  "trace: level " + std::to_string(level) + " out of range");
    }
    if (slim) {
      if (level != n_levels()) {
        throw Error(ErrorCode::InvalidArgument,
                    "trace: slim trace only retains the terminal level");
      }
      return states.back();
    }
    return states[static_cast<std::size_t>(level)];
  }
};

}  // namespace asmc
