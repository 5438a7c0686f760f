#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "asmc/error.hpp"
#include "asmc/multinomial.hpp"
#include "asmc/rng.hpp"

using namespace asmc;

namespace {

std::vector<double> frequencies(const std::vector<double>& weights, std::size_t count,
                                RngStreamSpec spec) {
  Rng rng(spec);
  const auto idx = multinomial_draw(weights, count, rng);
  std::vector<double> f(weights.size(), 0.0);
  for (Index i : idx) f[i] += 1.0;
  return f;
}

void expect_within_4_se(const std::vector<double>& counts, const std::vector<double>& p,
                        double total) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double se = std::sqrt(total * p[k] * (1 - p[k]));
    EXPECT_NEAR(counts[k], total * p[k], 4.0 * se) << "index " << k;
  }
}

}  // namespace

TEST(Multinomial, EqualWeightsUniform) {
  const std::vector<double> w(10, 3.0);
  const auto f = frequencies(w, 1000000, {11, 0});
  expect_within_4_se(f, std::vector<double>(10, 0.1), 1e6);
}

TEST(Multinomial, OneTwoThree) {
  const auto f = frequencies({1, 2, 3}, 1000000, {12, 0});
  expect_within_4_se(f, {1.0 / 6, 2.0 / 6, 3.0 / 6}, 1e6);
}

TEST(Multinomial, DegenerateMass) {
  const double eps = std::numeric_limits<double>::denorm_min();
  const auto f = frequencies({1.0, eps, eps, eps}, 100000, {13, 0});
  EXPECT_EQ(f[0], 100000.0);
}

TEST(Multinomial, MatchesUpperBoundInverseCdf) {
  Rng weights_rng({14, 0});
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + weights_rng.below(300);
    std::vector<double> w(n);
    for (double& x : w) x = weights_rng.uniform_pos() * (weights_rng.uniform() < 0.1 ? 1e-6 : 1.0);
    std::vector<double> cdf(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) cdf[i] = acc += w[i];

    const RngStreamSpec spec{15, static_cast<std::uint64_t>(trial)};
    Rng a(spec);
    const auto fast = multinomial_draw(w, n, a);
    Rng b(spec);
    for (std::size_t i = 0; i < n; ++i) {
      const double target = b.uniform() * cdf.back();
      const auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), target) - cdf.begin());
      ASSERT_EQ(fast[i], static_cast<Index>(std::min(k, n - 1))) << "trial " << trial << " slot " << i;
    }
  }
}

TEST(Multinomial, SlotsAreIndependent) {
  // the joint law of two slots factorizes
  const std::vector<double> w{1, 3};
  constexpr int reps = 200000;
  int both = 0;
  for (int r = 0; r < reps; ++r) {
    Rng rng({16, static_cast<std::uint64_t>(r)});
    const auto idx = multinomial_draw(w, 2, rng);
    both += idx[0] == 1 && idx[1] == 1;
  }
  const double p = 0.75 * 0.75;
  EXPECT_NEAR(both, reps * p, 4.0 * std::sqrt(reps * p * (1 - p)));
}

TEST(Multinomial, RejectsBadWeights) {
  Rng rng({17, 0});
  EXPECT_THROW(multinomial_draw(std::vector<double>{1.0, -1.0}, 3, rng), Error);
  EXPECT_THROW(multinomial_draw(std::vector<double>{1.0, std::nan("")}, 3, rng), Error);
  try {
    multinomial_draw(std::vector<double>{1.0, std::numeric_limits<double>::infinity()}, 3, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateWeights);
  }
  try {
    multinomial_draw(std::vector<double>{0.0, 0.0}, 3, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateWeights);
  }
}
