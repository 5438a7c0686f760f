#include "asmc/oracle/exact.hpp"

namespace asmc {

namespace {

// mu Q_{p+1}: (mu Q)(y) = sum_x mu(x) G_p(x) M_{p+1}(x, y)
std::vector<double> push_forward(const DiscreteLevel& lv, std::size_t dest_states,
                                 std::span<const double> mu) {
  std::vector<double> out(dest_states, 0.0);
  for (std::size_t x = 0; x < mu.size(); ++x) {
    const double w = mu[x] * lv.potential[x];
    for (std::size_t y = 0; y < dest_states; ++y) out[y] += w * lv.mutation[x][y];
  }
  return out;
}

double total(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

double integrate(std::span<const double> measure, std::span<const double> f) {
  if (measure.size() != f.size()) {
    throw Error(ErrorCode::InvalidArgument, "integrate: measure and function sizes differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += measure[i] * f[i];
  return s;
}

ExactFlow exact_flow(const DiscreteModel& model) {
  model.validate();
  const int n = model.n_levels();
  ExactFlow flow;
  flow.gamma.push_back(model.eta0);
  flow.mass.push_back(total(model.eta0));
  flow.mass_product.push_back(1.0);
  for (int p = 0; p < n; ++p) {
    const auto& lv = model.levels[static_cast<std::size_t>(p)];
    const auto& g = flow.gamma.back();
    std::vector<double> eta(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) eta[x] = g[x] / flow.mass.back();
    flow.mass_product.push_back(flow.mass_product.back() * integrate(eta, lv.potential));
    flow.eta.push_back(std::move(eta));
    auto next = push_forward(lv, model.states(p + 1), g);
    flow.mass.push_back(total(next));
    flow.gamma.push_back(std::move(next));
  }
  std::vector<double> eta_n(flow.gamma.back().size());
  for (std::size_t x = 0; x < eta_n.size(); ++x) eta_n[x] = flow.gamma.back()[x] / flow.mass.back();
  flow.eta.push_back(std::move(eta_n));
  return flow;
}

std::vector<double> semigroup_apply(const DiscreteModel& model, int p,
                                    std::span<const double> f) {
  const int n = model.n_levels();
  if (p < 0 || p > n) throw Error(ErrorCode::InvalidArgument, "semigroup_apply: level out of range");
  if (f.size() != model.states(n)) {
    throw Error(ErrorCode::InvalidArgument, "semigroup_apply: f must live on E_n");
  }
  std::vector<double> h(f.begin(), f.end());
  for (int q = n; q > p; --q) {
    const auto& lv = model.levels[static_cast<std::size_t>(q - 1)];
    std::vector<double> prev(model.states(q - 1));
    for (std::size_t x = 0; x < prev.size(); ++x) {
      double s = 0.0;
      for (std::size_t y = 0; y < h.size(); ++y) s += lv.mutation[x][y] * h[y];
      prev[x] = lv.potential[x] * s;
    }
    h = std::move(prev);
  }
  return h;
}

ExactVariance exact_asymptotic_variance(const DiscreteModel& model,
                                        std::span<const double> f) {
  const ExactFlow flow = exact_flow(model);
  const int n = model.n_levels();
  const auto sigma2 = [&](std::span<const double> h) {
    const double gn = integrate(flow.gamma.back(), h);
    double s = 0.0;
    for (int p = 0; p <= n; ++p) {
      auto q = semigroup_apply(model, p, h);
      for (double& v : q) v *= v;
      s += flow.mass[static_cast<std::size_t>(p)] *
               integrate(flow.gamma[static_cast<std::size_t>(p)], q) -
           gn * gn;
    }
    return s;
  };
  ExactVariance out;
  const double m2 = flow.mass.back() * flow.mass.back();
  out.sigma2_gamma = sigma2(f);
  out.sigma2_eta = out.sigma2_gamma / m2;
  const double mean = integrate(flow.eta.back(), f);
  std::vector<double> centered(f.begin(), f.end());
  for (double& v : centered) v -= mean;
  out.sigma2_eta_centered = sigma2(centered) / m2;
  return out;
}

double exact_coalescent_measure(const DiscreteModel& model, const CoalescenceIndicator& b,
                                std::span<const double> pair_function) {
  model.validate();
  const int n = model.n_levels();
  if (b.n_levels() != n) {
    throw Error(ErrorCode::InvalidArgument, "exact_coalescent_measure: indicator length != n + 1");
  }
  const std::size_t kn = model.states(n);
  if (pair_function.size() != kn * kn) {
    throw Error(ErrorCode::InvalidArgument, "exact_coalescent_measure: F must be |E_n| x |E_n|");
  }
  // C_1 on a pair measure moves the mass of row x onto the diagonal point (x, x)
  const auto collapse = [](std::vector<double>& mu, std::size_t k) {
    for (std::size_t x = 0; x < k; ++x) {
      double row = 0.0;
      for (std::size_t y = 0; y < k; ++y) {
        row += mu[x * k + y];
        mu[x * k + y] = 0.0;
      }
      mu[x * k + x] = row;
    }
  };

  std::size_t k = model.states(0);
  std::vector<double> mu(k * k);
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < k; ++y) mu[x * k + y] = model.eta0[x] * model.eta0[y];
  }
  if (b[0]) collapse(mu, k);
  for (int p = 0; p < n; ++p) {
    const auto& lv = model.levels[static_cast<std::size_t>(p)];
    const std::size_t k2 = model.states(p + 1);
    // (mu Q^{(x)2})(x', y') = sum_{x,y} mu(x,y) Q(x,x') Q(y,y'), done in two passes
    std::vector<double> half(k * k2, 0.0);
    for (std::size_t x = 0; x < k; ++x) {
      for (std::size_t y = 0; y < k; ++y) {
        const double w = mu[x * k + y] * lv.potential[y];
        if (w == 0.0) continue;
        for (std::size_t yp = 0; yp < k2; ++yp) half[x * k2 + yp] += w * lv.mutation[y][yp];
      }
    }
    std::vector<double> next(k2 * k2, 0.0);
    for (std::size_t x = 0; x < k; ++x) {
      const double gx = lv.potential[x];
      for (std::size_t xp = 0; xp < k2; ++xp) {
        const double q = gx * lv.mutation[x][xp];
        if (q == 0.0) continue;
        for (std::size_t yp = 0; yp < k2; ++yp) next[xp * k2 + yp] += q * half[x * k2 + yp];
      }
    }
    mu = std::move(next);
    k = k2;
    if (b[static_cast<std::size_t>(p + 1)]) collapse(mu, k);
  }
  return integrate(mu, pair_function);
}

}  // namespace asmc
