#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asmc/error.hpp"
#include "asmc/rng.hpp"

namespace asmc {

/// A flat real parameter z with a declared shape. Matrix-valued adaptive
/// quantities are stored flattened; `shape` is informational.
struct Parameter {
  std::vector<double> values;
  std::vector<std::size_t> shape;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const Parameter&, const Parameter&) = default;
};

enum class AdaptivityMode { Adaptive, Nonadaptive };

std::string_view to_string(AdaptivityMode mode) noexcept;
AdaptivityMode parse_mode(std::string_view text);

/// The contract the particle engine runs against.
///
/// `bind(level, z)` returns the level kernel pair (G_{level,z}, M_{level+1,z});
/// models with expensive per-parameter setup (a Cholesky factor, say) do it
/// once there instead of once per particle.
template <class M>
concept FeynmanKacModelType =
    requires(const M& m, int level, const Parameter& z, Rng& rng,
             const typename M::State& x, std::span<double> out) {
      typename M::State;
      { m.n_levels() } -> std::convertible_to<int>;
      { m.summary_dim() } -> std::convertible_to<std::size_t>;
      { m.sample_initial(rng) } -> std::same_as<typename M::State>;
      m.summary(level, x, out);
      { m.reference_parameter(level) } -> std::convertible_to<const Parameter*>;
      { m.bind(level, z).potential(x) } -> std::convertible_to<double>;
      { m.bind(level, z).mutate(x, rng) } -> std::same_as<typename M::State>;
    };

/// Finite support for exact kernel application: the states of every level and
/// the transition mass M_{level,z}(x, y).
template <class State>
struct DiscreteSupport {
  std::vector<std::vector<State>> states;  // states[p] enumerates E_p
  std::function<double(int level, const State& x, const Parameter& z,
                       const State& y)>
      transition_mass;
};

/// Feynman-Kac model described by callable components. All callables must be
/// safe to invoke concurrently; randomness only flows through the Rng passed in.
template <class State_>
struct FeynmanKacModel {
  using State = State_;

  int levels = 0;
  std::size_t dim = 0;  // dimension of the summary statistic
  std::function<State(Rng&)> initial_sampler;
  std::function<double(int level, const State& x, const Parameter& z)> potential;
  std::function<State(int level, const State& parent, const Parameter& z, Rng&)>
      mutation;  // level is the destination level p+1
  std::function<void(int level, const State& x, std::span<double> out)>
      summary_statistic;
  std::optional<std::vector<Parameter>> reference_parameters;  // z_0* .. z_{n-1}*
  std::optional<DiscreteSupport<State>> support;

  int n_levels() const noexcept { return levels; }
  std::size_t summary_dim() const noexcept { return dim; }

  State sample_initial(Rng& rng) const { return initial_sampler(rng); }

  void summary(int level, const State& x, std::span<double> out) const {
    if (summary_statistic) summary_statistic(level, x, out);
  }

  const Parameter* reference_parameter(int level) const noexcept {
    if (!reference_parameters ||
        level >= static_cast<int>(reference_parameters->size()) || level < 0) {
      return nullptr;
    }
    return &(*reference_parameters)[static_cast<std::size_t>(level)];
  }

  struct Bound {
    const FeynmanKacModel* model;
    int level;
    const Parameter* z;

    double potential(const State& x) const { return model->potential(level, x, *z); }
    State mutate(const State& parent, Rng& rng) const {
      return model->mutation(level + 1, parent, *z, rng);
    }
  };

  Bound bind(int level, const Parameter& z) const { return Bound{this, level, &z}; }
};

/// Q_{level,z}(f)(x) = G_{level-1,z}(x) * sum_y M_{level,z}(x, y) f(y), exact on
/// a finite support. Throws ExactKernelUnavailable when the model has none.
template <class State, class F>
double fk_kernel_apply(const FeynmanKacModel<State>& model, int level,
                       const Parameter& z, F&& f, const State& x) {
  if (level < 1 || level > model.n_levels()) {
    throw Error(ErrorCode::InvalidArgument,
                "fk_kernel_apply: level " + std::to_string(level) +
                    " outside [1, " + std::to_string(model.n_levels()) + "]");
  }
  if (!model.support) {
    throw Error(ErrorCode::ExactKernelUnavailable,
                "fk_kernel_apply: model has no finite support descriptor");
  }
  const auto& dest = model.support->states.at(static_cast<std::size_t>(level));
  double acc = 0.0;
  for (const State& y : dest) {
    acc += model.support->transition_mass(level, x, z, y) * f(y);
  }
  return model.potential(level - 1, x, z) * acc;
}

}  // namespace asmc
