#include <gtest/gtest.h>

#include <cmath>

#include "asmc/format.hpp"
#include "asmc/harness/fixtures.hpp"
#include "asmc/report.hpp"

using namespace asmc;
using asmc::harness::random_discrete_trace;

namespace {

const auto kF = [](int x) { return 1.5 * x - 0.75; };

}  // namespace

TEST(VarianceReport, FieldsRecomputeFromEstimators) {
  Rng rng({71, 0});
  const auto t = random_discrete_trace(rng, 12, 4);
  const ReportOptions options{{0, 2, 4}, true};
  const auto r = variance_report(t, kF, options);

  const auto values = evaluate(t.terminal(), kF);
  double eta = 0.0;
  for (double v : values) eta += v;
  eta /= 12.0;
  auto centered = values;
  for (double& v : centered) v -= eta;
  const double mass = t.genealogy.normalizers.back();

  EXPECT_EQ(r.n_particles, 12u);
  EXPECT_EQ(r.n_levels, 4);
  EXPECT_DOUBLE_EQ(r.eta_estimate, eta);
  EXPECT_DOUBLE_EQ(r.gamma_estimate, mass * eta);
  EXPECT_DOUBLE_EQ(r.v_n, disjoint_lines_untruncated(t.genealogy, values).value);
  EXPECT_DOUBLE_EQ(r.sigma2_eta_scaled, 12.0 * disjoint_lines_untruncated(t.genealogy, centered).value);
  EXPECT_DOUBLE_EQ(r.sigma2_gamma_scaled, 12.0 * mass * mass * r.v_n);
  ASSERT_EQ(r.truncated.size(), 3u);
  for (const auto& tr : r.truncated) {
    EXPECT_DOUBLE_EQ(tr.value, 12.0 * disjoint_lines_values(t.genealogy, centered, tr.lag).value);
  }
  EXPECT_EQ(r.truncated.back().value, r.sigma2_eta_scaled);
  ASSERT_TRUE(r.term_by_term.has_value());
  EXPECT_DOUBLE_EQ(r.term_by_term->sigma2_gamma, term_by_term_sigma2(t, kF, Sigma2Target::Gamma));
  EXPECT_DOUBLE_EQ(r.term_by_term->sigma2_eta_centered,
                   term_by_term_sigma2(t, kF, Sigma2Target::EtaCentered));
}

TEST(VarianceReport, ZeroFunction) {
  Rng rng({72, 0});
  const auto t = random_discrete_trace(rng, 6, 3);
  const auto r = variance_report(t, [](int) { return 0.0; }, ReportOptions{{1}, true});
  EXPECT_EQ(r.eta_estimate, 0.0);
  EXPECT_EQ(r.v_n, 0.0);
  EXPECT_EQ(r.sigma2_eta_scaled, 0.0);
  EXPECT_EQ(r.sigma2_gamma_scaled, 0.0);
  EXPECT_EQ(r.truncated[0].value, 0.0);
  EXPECT_EQ(r.term_by_term->sigma2_gamma, 0.0);
}

TEST(VarianceReport, CsvColumnsLineUp) {
  Rng rng({73, 0});
  const auto t = random_discrete_trace(rng, 5, 2);
  const ReportOptions options{{1, 2}, true};
  const auto header = report_csv_header(options);
  const auto fields = report_csv_fields(variance_report(t, kF, options));
  ASSERT_EQ(header.size(), fields.size());
  const std::vector<std::string> expected{"N",   "n",  "seed", "mode", "eta", "gamma", "v_n", "v_n_centered",
                                          "sigma2_eta_scaled", "sigma2_gamma_scaled", "lag_1", "lag_2",
                                          "sigma2_gamma_tbt", "sigma2_eta_tbt"};
  EXPECT_EQ(header, expected);
  EXPECT_EQ(fields[0], "5");
  EXPECT_EQ(fields[1], "2");
  EXPECT_EQ(fields[3], "nonadaptive");
  const auto split = split_csv(join_csv(fields));
  EXPECT_EQ(split, fields);
  EXPECT_EQ(report_csv_header({}).size(), 10u);
}

TEST(VarianceReport, JsonCarriesEveryField) {
  Rng rng({74, 0});
  const auto t = random_discrete_trace(rng, 5, 2);
  const auto r = variance_report(t, kF, ReportOptions{{1}, false});
  const auto j = report_to_json(r);
  EXPECT_EQ(j.at("N").get<std::size_t>(), 5u);
  EXPECT_EQ(j.at("mode").get<std::string>(), "nonadaptive");
  EXPECT_EQ(j.at("sigma2_eta_scaled").get<double>(), r.sigma2_eta_scaled);
  EXPECT_EQ(j.at("lag_1").get<double>(), r.truncated[0].value);
  EXPECT_FALSE(j.contains("sigma2_gamma_tbt"));
  EXPECT_EQ(j.at("degenerate").get<bool>(), r.degenerate);
}
