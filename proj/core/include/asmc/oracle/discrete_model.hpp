#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asmc/model.hpp"
#include "asmc/rng.hpp"

namespace asmc {

/// States of a discrete model are the integers 0..|E_p|-1.
using DiscreteState = int;

/// Level p of a finite Feynman-Kac model: G_p on E_p and the mutation
/// M_{p+1} from E_p to E_{p+1} (row-major |E_p| x |E_{p+1}|).
struct DiscreteLevel {
  std::vector<double> potential;
  std::vector<std::vector<double>> mutation;
};

/// A finite nonadaptive model. The reference parameters are empty, so the
/// adaptive and nonadaptive engines coincide on it.
struct DiscreteModel {
  std::vector<std::size_t> states_per_level;  // |E_0| .. |E_n|
  std::vector<double> eta0;
  std::vector<DiscreteLevel> levels;  // p in [0, n)

  int n_levels() const noexcept { return static_cast<int>(levels.size()); }
  std::size_t states(int level) const { return states_per_level.at(static_cast<std::size_t>(level)); }

  /// Checks shapes, G > 0, and unit mass of eta0 and of every M row (1e-14).
  void validate() const;
};

/// {"states_per_level": k or [k_0..k_n], "eta0": [...],
///  "levels": [{"G": [...], "M": [[...], ...]}, ...]}
DiscreteModel discrete_model_from_json(const nlohmann::json& j);
nlohmann::json discrete_model_to_json(const DiscreteModel& model);
DiscreteModel load_discrete_model(const std::string& path);

/// Random model with `states` points per level. Potentials are drawn in
/// [1, 1 + potential_spread]; `mixing` in [0, 1] moves M from a random
/// near-identity kernel (0) to fully random rows (1).
DiscreteModel random_discrete_model(Rng& rng, int n_levels, std::size_t states,
                                    double potential_spread = 1.0, double mixing = 1.0);

/// Engine view of the model with a finite-support descriptor attached.
/// Sampling uses one uniform per draw through the cumulative masses.
FeynmanKacModel<DiscreteState> to_feynman_kac(const DiscreteModel& model);

/// Index drawn from `cumulative` (non-decreasing, last entry the total mass).
DiscreteState sample_categorical(std::span<const double> cumulative, Rng& rng);

}  // namespace asmc
