#include "asmc/oracle/discrete_model.hpp"

#include <cmath>
#include <memory>

#include "asmc/multinomial.hpp"
#include "asmc/trace_io.hpp"

namespace asmc {

namespace {

constexpr double kMassTolerance = 1e-14;

void check_unit_mass(const std::vector<double>& row, const std::string& what) {
  double total = 0.0;
  for (double v : row) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::InvalidArgument, what + " has a negative or non-finite entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorCode::InvalidArgument, what + " does not sum to 1");
  }
}

std::vector<double> cumulative(const std::vector<double>& masses) {
  std::vector<double> out(masses.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) out[i] = acc += masses[i];
  return out;
}

std::vector<double> random_simplex(Rng& rng, std::size_t k) {
  std::vector<double> v(k);
  double total = 0.0;
  for (double& x : v) total += x = -std::log(rng.uniform_pos());
  for (double& x : v) x /= total;
  return v;
}

void renormalize(std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  for (double& x : v) x /= total;
}

}  // namespace

void DiscreteModel::validate() const {
  const auto n = static_cast<std::size_t>(n_levels());
  if (states_per_level.size() != n + 1) {
    throw Error(ErrorCode::InvalidArgument, "discrete model: need |E_p| for every level 0..n");
  }
  for (std::size_t k : states_per_level) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "discrete model: empty state space");
  }
  if (eta0.size() != states_per_level[0]) {
    throw Error(ErrorCode::InvalidArgument, "discrete model: eta0 has wrong length");
  }
  check_unit_mass(eta0, "discrete model: eta0");
  for (std::size_t p = 0; p < n; ++p) {
    const auto& lv = levels[p];
    const std::string tag = "discrete model: level " + std::to_string(p);
    if (lv.potential.size() != states_per_level[p] || lv.mutation.size() != states_per_level[p]) {
      throw Error(ErrorCode::InvalidArgument, tag + " has wrong G or M shape");
    }
    for (double g : lv.potential) {
      if (!std::isfinite(g) || g <= 0.0) {
        throw Error(ErrorCode::PotentialViolation, tag + " potential must be finite and > 0");
      }
    }
    for (const auto& row : lv.mutation) {
      if (row.size() != states_per_level[p + 1]) {
        throw Error(ErrorCode::InvalidArgument, tag + " M row has wrong length");
      }
      check_unit_mass(row, tag + " M row");
    }
  }
}

DiscreteModel discrete_model_from_json(const nlohmann::json& j) {
  DiscreteModel m;
  try {
    for (const auto& lv : j.at("levels")) {
      DiscreteLevel level;
      level.potential = lv.at("G").get<std::vector<double>>();
      level.mutation = lv.at("M").get<std::vector<std::vector<double>>>();
      m.levels.push_back(std::move(level));
    }
    const auto& spl = j.at("states_per_level");
    if (spl.is_number_integer()) {
      m.states_per_level.assign(m.levels.size() + 1, spl.get<std::size_t>());
    } else {
      m.states_per_level = spl.get<std::vector<std::size_t>>();
    }
    m.eta0 = j.at("eta0").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("discrete model: ") + e.what());
  }
  m.validate();
  return m;
}

nlohmann::json discrete_model_to_json(const DiscreteModel& model) {
  nlohmann::json j;
  j["states_per_level"] = model.states_per_level;
  j["eta0"] = model.eta0;
  auto levels = nlohmann::json::array();
  for (const auto& lv : model.levels) levels.push_back({{"G", lv.potential}, {"M", lv.mutation}});
  j["levels"] = std::move(levels);
  return j;
}

DiscreteModel load_discrete_model(const std::string& path) {
  return discrete_model_from_json(read_json_file(path));
}

DiscreteModel random_discrete_model(Rng& rng, int n_levels, std::size_t states,
                                    double potential_spread, double mixing) {
  DiscreteModel m;
  m.states_per_level.assign(static_cast<std::size_t>(n_levels) + 1, states);
  m.eta0 = random_simplex(rng, states);
  for (int p = 0; p < n_levels; ++p) {
    DiscreteLevel lv;
    for (std::size_t x = 0; x < states; ++x) {
      lv.potential.push_back(1.0 + potential_spread * rng.uniform());
      auto row = random_simplex(rng, states);
      for (std::size_t y = 0; y < states; ++y) {
        row[y] = mixing * row[y] + (1.0 - mixing) * (x == y ? 1.0 : 0.0);
      }
      renormalize(row);
      lv.mutation.push_back(std::move(row));
    }
    m.levels.push_back(std::move(lv));
  }
  m.validate();
  return m;
}

DiscreteState sample_categorical(std::span<const double> cumulative, Rng& rng) {
  return static_cast<DiscreteState>(inverse_cdf(cumulative, rng.uniform() * cumulative.back()));
}

FeynmanKacModel<DiscreteState> to_feynman_kac(const DiscreteModel& model) {
  model.validate();
  struct Tables {
    DiscreteModel model;
    std::vector<double> eta0_cdf;
    std::vector<std::vector<std::vector<double>>> mutation_cdf;  // [p][x]
  };
  auto t = std::make_shared<Tables>();
  t->model = model;
  t->eta0_cdf = cumulative(model.eta0);
  for (const auto& lv : model.levels) {
    std::vector<std::vector<double>> rows;
    for (const auto& row : lv.mutation) rows.push_back(cumulative(row));
    t->mutation_cdf.push_back(std::move(rows));
  }

  FeynmanKacModel<DiscreteState> fk;
  fk.levels = model.n_levels();
  fk.dim = 0;
  fk.initial_sampler = [t](Rng& rng) { return sample_categorical(t->eta0_cdf, rng); };
  fk.potential = [t](int level, const DiscreteState& x, const Parameter&) {
    return t->model.levels[static_cast<std::size_t>(level)].potential[static_cast<std::size_t>(x)];
  };
  fk.mutation = [t](int level, const DiscreteState& x, const Parameter&, Rng& rng) {
    const auto& cdf = t->mutation_cdf[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(x)];
    return sample_categorical(cdf, rng);
  };
  fk.reference_parameters = std::vector<Parameter>(static_cast<std::size_t>(fk.levels));

  DiscreteSupport<DiscreteState> support;
  for (std::size_t k : model.states_per_level) {
    std::vector<DiscreteState> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = static_cast<DiscreteState>(i);
    support.states.push_back(std::move(s));
  }
  support.transition_mass = [t](int level, const DiscreteState& x, const Parameter&,
                                const DiscreteState& y) {
    return t->model.levels[static_cast<std::size_t>(level - 1)]
        .mutation[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
  };
  fk.support = std::move(support);
  return fk;
}

}  // namespace asmc
