#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "asmc/coalescent.hpp"
#include "asmc/error.hpp"
#include "asmc/harness/fixtures.hpp"
#include "asmc/oracle/brute_force.hpp"

using namespace asmc;
using asmc::harness::random_discrete_trace;
using asmc::harness::toy_trace;

namespace {

const CoalescenceIndicator kToyIndicator = CoalescenceIndicator::from_mask(6, 1U << 3);

}  // namespace

TEST(LambdaDp, LevelZeroIsAllOnes) {
  const Genealogy g = make_genealogy(4, {});
  for (bool last : {false, true}) {
    CoalescenceIndicator b{{static_cast<std::uint8_t>(last)}};
    const auto t = lambda_dp(g, b);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(t(i, j), i == j ? 0.0 : 1.0);
    }
  }
}

TEST(LambdaDp, ToyGenealogyHasTwoEntries) {
  const auto t = lambda_dp(toy_trace().genealogy, kToyIndicator);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const bool hit = (i == 1 && j == 3) || (i == 3 && j == 1);
      EXPECT_EQ(t(i, j), hit ? 2.0 : 0.0) << i << "," << j;
    }
  }
}

TEST(GammaBar, ToyGenealogyClosedForm) {
  const auto trace = toy_trace();
  const auto& x = trace.terminal();
  const double pre = std::pow(5.0, 5) / std::pow(4.0, 7);
  const auto F = [](double u, double v) { return u * u * v + 1.0; };
  const double expected = 2.0 * pre * (F(x[1], x[3]) + F(x[3], x[1]));
  EXPECT_NEAR(gamma_bar_estimate(trace, kToyIndicator, F), expected, 1e-12 * std::abs(expected));
  // unit normalizers: the unnormalized estimate agrees
  EXPECT_EQ(gamma_estimate(trace, kToyIndicator, F), gamma_bar_estimate(trace, kToyIndicator, F));
}

TEST(GammaBar, LevelZeroUnitFunction) {
  for (std::size_t N : {2, 3, 10}) {
    ParticleSystemTrace<double> t;
    t.genealogy = make_genealogy(N, {});
    t.states = {std::vector<double>(N, 0.0)};
    for (std::uint8_t bit : {0, 1}) {
      EXPECT_EQ(gamma_bar_estimate(t, CoalescenceIndicator{{bit}}, [](double, double) { return 1.0; }),
                1.0);
    }
  }
}

TEST(LambdaDp, MatchesBruteForce) {
  Rng rng({51, 0});
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t N = 2 + rng.below(4);
    const int n = static_cast<int>(rng.below(5));
    const auto t = random_discrete_trace(rng, N, n);
    for (std::uint64_t mask = 0; mask < (1U << (n + 1)); ++mask) {
      const auto b = CoalescenceIndicator::from_mask(n, mask);
      const auto dp = lambda_dp(t.genealogy, b);
      const auto brute = lambda_brute_force(t.genealogy, b);
      for (std::size_t k = 0; k < brute.size(); ++k) {
        ASSERT_EQ(dp.values[k], static_cast<double>(brute[k])) << "trial " << trial << " mask " << mask;
      }
    }
  }
}

TEST(GammaBar, MatchesBruteForceSum) {
  Rng rng({52, 0});
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t N = 2 + rng.below(4);
    const int n = static_cast<int>(rng.below(5));
    const auto t = random_discrete_trace(rng, N, n);
    double table[3][3];
    for (auto& row : table) {
      for (double& v : row) v = rng.normal();
    }
    const auto F = [&](int a, int c) { return table[a][c]; };
    const auto pairs = pair_matrix(t.terminal(), F);
    for (std::uint64_t mask = 0; mask < (1U << (n + 1)); ++mask) {
      const auto b = CoalescenceIndicator::from_mask(n, mask);
      const double brute = gamma_bar_brute_force(t.genealogy, b, pairs);
      EXPECT_NEAR(gamma_bar_estimate(t, b, F), brute, 1e-12 * (1.0 + std::abs(brute)));
    }
  }
}

TEST(GammaBar, LinearInF) {
  Rng rng({53, 0});
  const auto t = random_discrete_trace(rng, 7, 4);
  const auto F = [](int a, int c) { return 1.0 + a - 2.0 * c; };
  const auto G = [](int a, int c) { return a * c + 0.5; };
  for (std::uint64_t mask = 0; mask < 32; ++mask) {
    const auto b = CoalescenceIndicator::from_mask(4, mask);
    const double combo = gamma_bar_estimate(t, b, [&](int a, int c) { return 3.0 * F(a, c) - G(a, c); });
    const double split = 3.0 * gamma_bar_estimate(t, b, F) - gamma_bar_estimate(t, b, G);
    EXPECT_NEAR(combo, split, 1e-12 * (1.0 + std::abs(split)));
  }
}

TEST(LambdaDp, ChecksIndicatorLength) {
  const Genealogy g = toy_trace().genealogy;
  EXPECT_THROW(lambda_dp(g, CoalescenceIndicator::none(5)), Error);
}

TEST(LambdaDp, PrecisionCeiling) {
  // every particle shares one parent: each coalescing step multiplies counts by N - 1
  constexpr std::size_t N = 40;
  std::vector<std::vector<Index>> rows(12, std::vector<Index>(N, 0));
  const Genealogy g = make_genealogy(N, rows);
  EXPECT_NO_THROW(lambda_dp(g, CoalescenceIndicator::from_mask(12, 0x3)));
  try {
    lambda_dp(g, CoalescenceIndicator::from_mask(12, 0xfff));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PrecisionLoss);
  }
}

TEST(Prefactor, LogSpaceAgreesAndAvoidsOverflow) {
  EXPECT_NEAR(coalescent_prefactor(5, 6), std::pow(5.0, 5) / std::pow(4.0, 7), 1e-14);
  const double big = coalescent_prefactor(100000, 400);
  EXPECT_TRUE(std::isfinite(big));
  EXPECT_GT(big, 0.0);
}

TEST(TermByTerm, ZeroFunction) {
  Rng rng({54, 0});
  const auto t = random_discrete_trace(rng, 5, 3);
  for (auto target : {Sigma2Target::Gamma, Sigma2Target::EtaCentered, Sigma2Target::Eta}) {
    EXPECT_EQ(term_by_term_sigma2(t, [](int) { return 0.0; }, target), 0.0);
  }
}

TEST(TermByTerm, MatchesBruteForceSum) {
  Rng rng({55, 0});
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t N = 2 + rng.below(4);
    const int n = static_cast<int>(rng.below(5));
    const auto t = random_discrete_trace(rng, N, n);
    const std::vector<double> fv{0.5, -1.25, 2.0};
    const auto f = [&](int x) { return fv[static_cast<std::size_t>(x)]; };
    const auto values = evaluate(t.terminal(), f);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(N);

    const auto sum_for = [&](double shift) {
      std::vector<double> pairs(N * N);
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) pairs[i * N + j] = (values[i] - shift) * (values[j] - shift);
      }
      const double base = gamma_bar_brute_force(t.genealogy, CoalescenceIndicator::none(n), pairs);
      double s = 0.0;
      for (int p = 0; p <= n; ++p) {
        s += gamma_bar_brute_force(t.genealogy, CoalescenceIndicator::single(n, p), pairs) - base;
      }
      return s;
    };
    const double mass = t.genealogy.normalizers.back();
    const double gamma = mass * mass * sum_for(0.0);
    const double centered = sum_for(mean);
    EXPECT_NEAR(term_by_term_sigma2(t, f, Sigma2Target::Gamma), gamma, 1e-11 * (1.0 + std::abs(gamma)));
    EXPECT_NEAR(term_by_term_sigma2(t, f, Sigma2Target::EtaCentered), centered,
                1e-11 * (1.0 + std::abs(centered)));
  }
}

TEST(Decomposition, UnitFunction) {
  Rng rng({56, 0});
  const auto t = random_discrete_trace(rng, 6, 5);
  const auto r = decomposition_check(t, [](int, int) { return 1.0; });
  EXPECT_EQ(r.lhs, 1.0);
  EXPECT_NEAR(r.rhs, 1.0, 1e-10);
}

TEST(Decomposition, RandomTraces) {
  Rng rng({57, 0});
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t N = 2 + rng.below(7);
    const int n = static_cast<int>(rng.below(7));
    const auto t = random_discrete_trace(rng, N, n);
    const std::vector<double> fv{rng.normal(), rng.normal(), rng.normal()};
    const auto r = decomposition_check(t, [&](int a, int c) {
      return fv[static_cast<std::size_t>(a)] * fv[static_cast<std::size_t>(c)];
    });
    EXPECT_LE(r.abs_gap, 1e-10 * (1.0 + std::abs(r.lhs)));
  }
}

TEST(Decomposition, ToyGenealogy) {
  const auto t = toy_trace();
  const auto r = decomposition_check(t, [](double u, double v) { return std::cos(u) + u * v; });
  EXPECT_LE(r.abs_gap, 1e-10);
}

TEST(Decomposition, MatchesIndependentEnumeration) {
  // sum over indicators of brute-force bar-Gamma with the weights written out
  Rng rng({58, 0});
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t N = 2 + rng.below(3);
    const int n = static_cast<int>(rng.below(3));
    const auto t = random_discrete_trace(rng, N, n);
    const auto pairs = pair_matrix(t.terminal(), [](int a, int c) { return 1.0 + a + 3.0 * c; });
    const double Nd = static_cast<double>(N);
    double rhs = 0.0;
    for (std::uint64_t mask = 0; mask < (1U << (n + 1)); ++mask) {
      const auto b = CoalescenceIndicator::from_mask(n, mask);
      double w = 1.0;
      for (int p = 0; p <= n; ++p) w *= (b[static_cast<std::size_t>(p)] ? 1.0 : Nd - 1.0) / Nd;
      rhs += w * gamma_bar_brute_force(t.genealogy, b, pairs);
    }
    const auto r = decomposition_check_pairs(t.genealogy, pairs);
    EXPECT_NEAR(r.rhs, rhs, 1e-12 * (1.0 + std::abs(rhs)));
    EXPECT_NEAR(r.lhs, rhs, 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST(Decomposition, RefusesLongGenealogies) {
  std::vector<std::vector<Index>> rows(21, std::vector<Index>{0, 1});
  const Genealogy g = make_genealogy(2, rows);
  try {
    decomposition_check_pairs(g, std::vector<double>(4, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyIndicators);
  }
}
