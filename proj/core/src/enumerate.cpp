#include "asmc/oracle/enumerate.hpp"

#include <algorithm>
#include <cmath>

#include "asmc/disjoint_lines.hpp"
#include "asmc/oracle/exact.hpp"

namespace asmc {

namespace {

// Advances a base-`radix` odometer; false after the last digit string.
bool next_digits(std::vector<int>& digits, int radix) {
  for (int& d : digits) {
    if (++d < radix) return true;
    d = 0;
  }
  return false;
}

UnbiasednessResult compare(double lhs, double rhs) {
  UnbiasednessResult r{lhs, rhs, std::abs(lhs - rhs), 0.0};
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  r.relative_gap = scale > 0.0 ? r.gap / scale : 0.0;
  return r;
}

struct Enumerator {
  const DiscreteModel& model;
  std::size_t N;
  const OutcomeVisitor& visit;
  ParticleSystemTrace<DiscreteState> trace;
  double visited = 0.0;

  // trace.states[0..p] are set; choose ancestors and states of level p+1
  void level(int p, double prob) {
    Genealogy& g = trace.genealogy;
    if (p == model.n_levels()) {
      g.eve = compose_eve(g);
      visit(trace, prob);
      visited += prob;
      return;
    }
    const auto& lv = model.levels[static_cast<std::size_t>(p)];
    const auto& cloud = trace.states[static_cast<std::size_t>(p)];
    std::vector<double> weights(N);
    double wsum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      wsum += weights[i] = lv.potential[static_cast<std::size_t>(cloud[i])];
    }
    g.potentials[static_cast<std::size_t>(p)] = weights;
    g.normalizers[static_cast<std::size_t>(p + 1)] =
        g.normalizers[static_cast<std::size_t>(p)] * potential_mean(weights);

    const int next_states = static_cast<int>(model.states(p + 1));
    std::vector<int> parents(N, 0);
    do {
      double sel = prob;
      auto& row = g.ancestors[static_cast<std::size_t>(p)];
      for (std::size_t i = 0; i < N; ++i) {
        row[i] = static_cast<Index>(parents[i]);
        sel *= weights[static_cast<std::size_t>(parents[i])] / wsum;
      }
      std::vector<int> ys(N, 0);
      do {
        double q = sel;
        auto& next = trace.states[static_cast<std::size_t>(p + 1)];
        for (std::size_t i = 0; i < N && q > 0.0; ++i) {
          next[i] = ys[i];
          q *= lv.mutation[static_cast<std::size_t>(cloud[static_cast<std::size_t>(parents[i])])]
                          [static_cast<std::size_t>(ys[i])];
        }
        if (q > 0.0) level(p + 1, q);
      } while (next_digits(ys, next_states));
    } while (next_digits(parents, static_cast<int>(N)));
  }
};

}  // namespace

double enumeration_size(const DiscreteModel& model, std::size_t n_particles) {
  const double N = static_cast<double>(n_particles);
  double count = std::pow(static_cast<double>(model.states(0)), N);
  for (int p = 0; p < model.n_levels(); ++p) {
    count *= std::pow(N, N) * std::pow(static_cast<double>(model.states(p + 1)), N);
  }
  return count;
}

double enumerate_ips(const DiscreteModel& model, std::size_t n_particles,
                     const OutcomeVisitor& visit) {
  model.validate();
  if (n_particles < 2) throw Error(ErrorCode::InvalidArgument, "enumerate_ips: need N >= 2");
  const double size = enumeration_size(model, n_particles);
  if (!(size <= kMaxEnumeratedOutcomes)) {
    throw Error(ErrorCode::InstanceTooLarge,
                "enumerate_ips: " + std::to_string(size) + " configurations exceed 1e7");
  }
  const int n = model.n_levels();
  const auto levels = static_cast<std::size_t>(n);
  Enumerator e{model, n_particles, visit, {}, 0.0};
  Genealogy& g = e.trace.genealogy;
  g.n_particles = n_particles;
  g.n_levels = n;
  g.mode = AdaptivityMode::Nonadaptive;
  g.ancestors.assign(levels, std::vector<Index>(n_particles));
  g.potentials.assign(levels, std::vector<double>(n_particles));
  g.normalizers.assign(levels + 1, 1.0);
  g.adaptive_params.assign(levels + 1, Parameter{{}, {0}});
  e.trace.states.assign(levels + 1, std::vector<DiscreteState>(n_particles));

  const int k0 = static_cast<int>(model.states(0));
  std::vector<int> xs(n_particles, 0);
  do {
    double prob = 1.0;
    for (std::size_t i = 0; i < n_particles; ++i) {
      e.trace.states[0][i] = xs[i];
      prob *= model.eta0[static_cast<std::size_t>(xs[i])];
    }
    if (prob > 0.0) e.level(0, prob);
  } while (next_digits(xs, k0));
  return e.visited;
}

UnbiasednessResult unbiasedness_check(const DiscreteModel& model, std::size_t n_particles,
                                      std::span<const double> f) {
  if (f.size() != model.states(model.n_levels())) {
    throw Error(ErrorCode::InvalidArgument, "unbiasedness_check: f must live on E_n");
  }
  double lhs = 0.0, first = 0.0, second = 0.0;
  std::vector<double> values(n_particles);
  enumerate_ips(model, n_particles, [&](const ParticleSystemTrace<DiscreteState>& t, double prob) {
    const auto& cloud = t.terminal();
    for (std::size_t i = 0; i < n_particles; ++i) values[i] = f[static_cast<std::size_t>(cloud[i])];
    const double mass = t.genealogy.normalizers.back();
    const double v = disjoint_lines_untruncated(t.genealogy, values).value;
    double eta = 0.0;
    for (double x : values) eta += x;
    const double gam = mass * eta / static_cast<double>(n_particles);
    lhs += prob * mass * mass * v;
    first += prob * gam;
    second += prob * gam * gam;
  });
  return compare(lhs, second - first * first);
}

std::vector<CoalescentUnbiasedness> coalescent_unbiasedness_check(
    const DiscreteModel& model, std::size_t n_particles, std::span<const double> f,
    std::span<const double> g) {
  const int n = model.n_levels();
  const std::size_t k = model.states(n);
  if (f.size() != k || g.size() != k) {
    throw Error(ErrorCode::InvalidArgument, "coalescent_unbiasedness_check: f, g must live on E_n");
  }
  if (n > kMaxDecompositionLevels) {
    throw Error(ErrorCode::TooManyIndicators, "coalescent_unbiasedness_check: n too large");
  }
  const std::uint64_t count = std::uint64_t{1} << (n + 1);
  std::vector<CoalescenceIndicator> indicators;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    indicators.push_back(CoalescenceIndicator::from_mask(n, mask));
  }
  std::vector<double> expected(count, 0.0);
  std::vector<double> u(n_particles), v(n_particles);
  enumerate_ips(model, n_particles, [&](const ParticleSystemTrace<DiscreteState>& t, double prob) {
    const auto& cloud = t.terminal();
    for (std::size_t i = 0; i < n_particles; ++i) {
      u[i] = f[static_cast<std::size_t>(cloud[i])];
      v[i] = g[static_cast<std::size_t>(cloud[i])];
    }
    const double mass = t.genealogy.normalizers.back();
    const double scale = prob * mass * mass * coalescent_prefactor(n_particles, n);
    for (std::uint64_t m = 0; m < count; ++m) {
      const LambdaTable table = lambda_dp(t.genealogy, indicators[m]);
      expected[m] += scale * lambda_contract_product(table, indicators[m][static_cast<std::size_t>(n)], u, v);
    }
  });
  std::vector<double> pairs(k * k);
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < k; ++y) pairs[x * k + y] = f[x] * g[y];
  }
  std::vector<CoalescentUnbiasedness> out;
  for (std::uint64_t m = 0; m < count; ++m) {
    out.push_back({indicators[m], compare(expected[m],
                                          exact_coalescent_measure(model, indicators[m], pairs))});
  }
  return out;
}

}  // namespace asmc
