#include "asmc/harness/criteria.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <sstream>

#include "asmc/coalescent.hpp"
#include "asmc/disjoint_lines.hpp"
#include "asmc/format.hpp"
#include "asmc/harness/experiment.hpp"
#include "asmc/harness/fixtures.hpp"
#include "asmc/harness/parallel.hpp"
#include "asmc/ips.hpp"
#include "asmc/oracle/brute_force.hpp"
#include "asmc/oracle/enumerate.hpp"
#include "asmc/oracle/exact.hpp"
#include "asmc/stats.hpp"

namespace asmc::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double relative(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

CriterionResult make(int id, bool passed, std::string detail) {
  CriterionResult r;
  r.id = id;
  r.passed = passed;
  r.detail = std::move(detail);
  return r;
}

CriterionResult toy_fixture(const CheckOptions&) {
  const auto trace = toy_trace();
  const auto& x = trace.terminal();
  const auto b = CoalescenceIndicator::from_mask(6, 1U << 3);
  const std::vector<double (*)(double, double)> functions{
      [](double u, double v) { return u * v; },
      [](double u, double v) { return u + 2.0 * v * v; },
      [](double u, double v) { return std::exp(0.5 * u - v); }};

  const auto start = Clock::now();
  const LambdaTable table = lambda_dp(trace.genealogy, b);
  std::vector<double> estimates;
  for (auto F : functions) estimates.push_back(gamma_bar_estimate(trace, b, F));
  const double elapsed = seconds_since(start);

  bool table_ok = true;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const bool nonzero = (i == 1 && j == 3) || (i == 3 && j == 1);
      table_ok = table_ok && table(i, j) == (nonzero ? 2.0 : 0.0);
    }
  }
  const double prefactor = std::pow(5.0, 5) / std::pow(4.0, 7);
  double worst = 0.0;
  for (std::size_t k = 0; k < functions.size(); ++k) {
    const double expected = 2.0 * prefactor * (functions[k](x[1], x[3]) + functions[k](x[3], x[1]));
    worst = std::max(worst, relative(estimates[k], expected));
  }
  const bool passed =
      table_ok && worst <= tolerance::kToyRelative && elapsed < tolerance::kToyMaxSeconds;
  return make(1, passed,
              "Lambda_6 support {(2,4),(4,2)} = 2: " + std::string(table_ok ? "yes" : "no") +
                  ", max rel err " + fmt(worst) + ", " + fmt(elapsed * 1e3) + " ms");
}

CriterionResult decomposition(const CheckOptions&) {
  Rng rng({20250201, 2});
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t N = 2 + rng.below(7);
    const int n = static_cast<int>(rng.below(7));
    const auto trace = random_discrete_trace(rng, N, n);
    double table[3][3];
    for (auto& row : table) {
      for (double& v : row) v = rng.normal();
    }
    const auto r = decomposition_check(trace, [&](int a, int c) { return table[a][c]; });
    worst = std::max(worst, r.abs_gap / (1.0 + std::abs(r.lhs)));
  }
  return make(2, worst <= tolerance::kDecompositionGap,
              "200 traces, max |lhs-rhs|/(1+|lhs|) = " + fmt(worst));
}

CriterionResult dp_vs_enumeration(const CheckOptions&) {
  Rng rng({20250201, 3});
  std::size_t mismatches = 0, tables = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t N = 2 + rng.below(4);
    const int n = static_cast<int>(rng.below(5));
    const auto trace = random_discrete_trace(rng, N, n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n + 1)); ++mask) {
      const auto b = CoalescenceIndicator::from_mask(n, mask);
      const auto dp = lambda_dp(trace.genealogy, b);
      const auto brute = lambda_brute_force(trace.genealogy, b);
      ++tables;
      for (std::size_t k = 0; k < brute.size(); ++k) {
        if (dp.values[k] != static_cast<double>(brute[k])) {
          ++mismatches;
          break;
        }
      }
    }
  }
  return make(3, mismatches == 0,
              std::to_string(tables) + " tables, " + std::to_string(mismatches) + " mismatches");
}

CriterionResult unbiasedness(const CheckOptions&) {
  const std::vector<double> f{0.3, 1.2}, g{1.5, 0.4};
  double worst_v = 0.0, worst_b = 0.0;
  std::size_t indicators = 0;
  for (int n : {1, 2}) {
    const DiscreteModel model = two_state_model(n);
    worst_v = std::max(worst_v, unbiasedness_check(model, 3, f).relative_gap);
    for (const auto& c : coalescent_unbiasedness_check(model, 3, f, g)) {
      worst_b = std::max(worst_b, c.result.relative_gap);
      ++indicators;
    }
  }
  return make(4, worst_v <= tolerance::kUnbiasedRelative && worst_b <= tolerance::kUnbiasedRelative,
              "E[gamma^2 V] vs Var gamma: " + fmt(worst_v) + "; " + std::to_string(indicators) +
                  " indicators, max rel gap " + fmt(worst_b));
}

CriterionResult sample_variance(const CheckOptions&) {
  Rng rng({20250201, 5});
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t N = 2 + rng.below(99);
    const Genealogy g = make_genealogy(N, {});
    const double offset = 10.0 * rng.normal(), scale = 0.1 + 5.0 * rng.uniform();
    std::vector<double> f(N);
    for (double& v : f) v = offset + scale * rng.normal();
    const double mean = summarize(f).mean();
    std::vector<double> centered = f;
    for (double& v : centered) v -= mean;
    const double nv = static_cast<double>(N) * disjoint_lines_untruncated(g, centered).value;
    double ss = 0.0;
    for (double v : f) ss += (v - mean) * (v - mean);
    worst = std::max(worst, relative(nv, ss / static_cast<double>(N - 1)));
  }
  return make(5, worst <= tolerance::kSampleVarianceRelative, "50 clouds, max rel err " + fmt(worst));
}

std::vector<DisjointLinesResult> discrete_replicates(const FeynmanKacModel<DiscreteState>& fk,
                                                     const std::vector<double>& f, std::size_t N,
                                                     std::size_t replicates, std::uint64_t seed,
                                                     unsigned threads, bool centered,
                                                     std::vector<double>* eta = nullptr) {
  struct Out {
    DisjointLinesResult v;
    double eta;
  };
  const auto out = parallel_map<Out>(replicates, threads, [&](std::size_t r) {
    const auto trace = run_ips(fk, N, AdaptivityMode::Nonadaptive, {seed, r}, {true});
    auto values = evaluate(trace.terminal(), [&](DiscreteState x) { return f[static_cast<std::size_t>(x)]; });
    const double m = summarize(values).mean();
    if (centered) {
      for (double& v : values) v -= m;
    }
    return Out{disjoint_lines_untruncated(trace.genealogy, values), m};
  });
  std::vector<DisjointLinesResult> v;
  for (const auto& o : out) {
    v.push_back(o.v);
    if (eta) eta->push_back(o.eta);
  }
  return v;
}

CriterionResult consistency(const CheckOptions& options) {
  const DiscreteModel model = consistency_model();
  const auto f = consistency_function();
  const double exact = exact_asymptotic_variance(model, f).sigma2_eta_centered;
  const auto fk = to_feynman_kac(model);
  bool passed = true;
  std::ostringstream detail;
  detail << "exact " << fmt(exact);
  std::vector<double> rms;
  for (std::size_t N : {100, 400, 1600}) {
    const auto reps = discrete_replicates(fk, f, N, 400, 6000 + N, options.threads, true);
    RunningStats s;
    double sq = 0.0;
    for (const auto& r : reps) {
      const double x = static_cast<double>(N) * r.value;
      s.push(x);
      sq += (x - exact) * (x - exact);
    }
    rms.push_back(std::sqrt(sq / static_cast<double>(reps.size())));
    const double z = std::abs(s.mean() - exact) / s.standard_error();
    passed = passed && z <= tolerance::kStandardErrors;
    detail << "; N=" << N << " mean " << fmt(s.mean()) << " (" << fmt(z) << " SE)";
  }
  for (std::size_t k = 0; k + 1 < rms.size(); ++k) {
    const double ratio = rms[k] / rms[k + 1];
    passed = passed && ratio >= tolerance::kRmsRatioLo && ratio <= tolerance::kRmsRatioHi;
    detail << "; RMS ratio " << fmt(ratio);
  }
  return make(6, passed, detail.str());
}

CriterionResult gap_property(const CheckOptions& options) {
  const DiscreteModel model = consistency_model();
  const auto f = consistency_function();
  const auto fk = to_feynman_kac(model);
  std::vector<double> medians;
  for (std::size_t N : {32, 64, 128, 256}) {
    const auto gaps = parallel_map<double>(200, options.threads, [&](std::size_t r) {
      const auto trace = run_ips(fk, N, AdaptivityMode::Nonadaptive, {7000 + N, r}, {true});
      const auto values =
          evaluate(trace.terminal(), [&](DiscreteState x) { return f[static_cast<std::size_t>(x)]; });
      const double nv = static_cast<double>(N) * disjoint_lines_untruncated(trace.genealogy, values).value;
      return std::abs(nv - term_by_term_sigma2_values(trace.genealogy, values, Sigma2Target::Eta));
    });
    medians.push_back(median(gaps));
  }
  int inversions = 0;
  std::ostringstream detail;
  detail << "medians";
  for (std::size_t k = 0; k < medians.size(); ++k) {
    detail << ' ' << fmt(medians[k]);
    if (k > 0 && medians[k] >= medians[k - 1]) ++inversions;
  }
  detail << "; inversions " << inversions;
  return make(7, inversions <= tolerance::kGapMaxInversions, detail.str());
}

CriterionResult gaussian_reproduction(const CheckOptions& options) {
  ExperimentConfig c;
  c.model = ModelKind::GaussianBench;
  c.gaussian.max_level = 10;
  c.particle_counts = {100, 500, 2000};
  c.replicates = 100;
  c.reference = ReferenceBlock{200, 2000};
  c.seed = 8;
  c.threads = options.threads;
  const auto result = run_experiment(c);
  const auto rows = aggregate(result);

  const ReferenceResult& ref = *result.reference;
  const double ref_se = ref.sigma2 * std::sqrt(2.0 / static_cast<double>(ref.replicates - 1));
  std::vector<Interval> cis;
  bool within = true;
  std::ostringstream detail;
  detail << "reference " << fmt(ref.sigma2);
  for (const auto& g : result.groups) {
    if (g.n_particles != 2000) continue;
    std::vector<double> v;
    for (const auto& r : g.reports) v.push_back(r.sigma2_eta_scaled);
    const RunningStats s = summarize(v);
    cis.push_back(normal_ci95(s));
    const double z = std::abs(s.mean() - ref.sigma2) / std::hypot(s.standard_error(), ref_se);
    within = within && z <= tolerance::kStandardErrors;
    detail << "; " << to_string(g.mode) << " " << fmt(s.mean()) << " +/- " << fmt(s.standard_error())
           << " (" << fmt(z) << " SE)";
  }
  const bool overlap = cis.size() == 2 && cis[0].overlaps(cis[1]);
  detail << "; CIs overlap: " << (overlap ? "yes" : "no");
  return make(8, overlap && within, detail.str());
}

CriterionResult coverage(const CheckOptions& options) {
  const DiscreteModel model = consistency_model();
  const auto f = consistency_function();
  const double eta = integrate(exact_flow(model).eta.back(), f);
  const auto fk = to_feynman_kac(model);
  std::vector<double> etas;
  const auto reps = discrete_replicates(fk, f, 1000, 1000, 9000, options.threads, true, &etas);
  std::size_t covered = 0;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const double half = kNormalQuantile975 * std::sqrt(reps[r].value);
    if (std::abs(etas[r] - eta) <= half) ++covered;
  }
  const double rate = static_cast<double>(covered) / static_cast<double>(reps.size());
  return make(9, rate >= tolerance::kCoverageLo && rate <= tolerance::kCoverageHi,
              "coverage " + fmt(rate) + " over 1000 replicates");
}

bool same_bits(const DisjointLinesResult& a, const DisjointLinesResult& b) {
  return std::memcmp(&a.value, &b.value, sizeof(double)) == 0 && a.degenerate == b.degenerate &&
         a.disjoint_pairs == b.disjoint_pairs && a.eve_groups == b.eve_groups;
}

CriterionResult truncation(const CheckOptions& options) {
  constexpr int n = 40, lag = 5;
  constexpr std::size_t N = 200, R = 100;
  const auto fk = to_feynman_kac(collapse_model(n));
  struct Out {
    bool identical, collapsed, clean;
  };
  const auto out = parallel_map<Out>(R, options.threads, [&](std::size_t r) {
    const auto trace = run_ips(fk, N, AdaptivityMode::Nonadaptive, {10, r}, {true});
    auto values = evaluate(trace.terminal(), [](DiscreteState x) { return x == 0 ? 1.0 : 0.0; });
    const double m = summarize(values).mean();
    for (double& v : values) v -= m;
    const auto full = disjoint_lines_untruncated(trace.genealogy, values);
    const auto at_n = disjoint_lines_values(trace.genealogy, values, n);
    const auto short_lag = disjoint_lines_values(trace.genealogy, values, lag);
    return Out{same_bits(full, at_n), full.disjoint_pairs == 0.0,
               std::isfinite(short_lag.value) && !short_lag.degenerate};
  });
  std::size_t identical = 0, collapsed = 0, clean = 0;
  for (const auto& o : out) {
    identical += o.identical;
    collapsed += o.collapsed;
    clean += o.clean;
  }
  // bit identity on small random traces as well
  Rng rng({20250201, 10});
  for (int t = 0; t < 50; ++t) {
    const int levels = 1 + static_cast<int>(rng.below(8));
    const auto trace = random_discrete_trace(rng, 2 + rng.below(30), levels);
    const auto values = evaluate(trace.terminal(), [](DiscreteState x) { return 0.5 + x; });
    identical += same_bits(disjoint_lines_untruncated(trace.genealogy, values),
                           disjoint_lines_values(trace.genealogy, values, levels));
  }
  const double collapse_rate = static_cast<double>(collapsed) / R;
  const bool passed = identical == R + 50 && collapse_rate >= tolerance::kCollapseFraction && clean == R;
  return make(10, passed,
              "H=n identical " + std::to_string(identical) + "/" + std::to_string(R + 50) +
                  ", full collapse " + fmt(collapse_rate) + ", H=5 clean " + std::to_string(clean) +
                  "/" + std::to_string(R));
}

}  // namespace

const std::vector<CriterionEntry>& acceptance_criteria() {
  static const std::vector<CriterionEntry> entries{
      {1, "toy genealogy fixture", false, toy_fixture},
      {2, "decomposition identity", false, decomposition},
      {3, "lambda recursion vs enumeration", false, dp_vs_enumeration},
      {4, "unbiasedness by exhaustive enumeration", false, unbiasedness},
      {5, "n = 0 sample variance identity", false, sample_variance},
      {6, "consistency of N V_n^N", true, consistency},
      {7, "gap between V_n^N and term-by-term", true, gap_property},
      {8, "Gaussian bridge, desk scale", true, gaussian_reproduction},
      {9, "CLT interval coverage", true, coverage},
      {10, "fixed-lag truncation", false, truncation},
  };
  return entries;
}

CriterionResult run_criterion(const CriterionEntry& entry, const CheckOptions& options) {
  const auto start = Clock::now();
  CriterionResult r;
  try {
    r = entry.run(options);
  } catch (const std::exception& e) {
    r = make(entry.id, false, std::string("error: ") + e.what());
  }
  r.title = entry.title;
  r.seconds = seconds_since(start);
  return r;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "PASS" : "FAIL") << "  " << (r.id < 10 ? " " : "") << r.id << "  " << r.title
    << "  (" << fmt(r.seconds) << " s)  " << r.detail;
  return s.str();
}

}  // namespace asmc::harness
