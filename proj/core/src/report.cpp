#include "asmc/report.hpp"

#include "asmc/format.hpp"

namespace asmc {

EstimatorReport variance_report_values(const Genealogy& genealogy,
                                       std::span<const double> values,
                                       const ReportOptions& options) {
  const std::size_t n_particles = genealogy.n_particles;
  if (values.size() != n_particles) {
    throw Error(ErrorCode::InvalidArgument, "variance_report: value count != N");
  }
  const double n = static_cast<double>(n_particles);
  EstimatorReport r;
  r.n_particles = n_particles;
  r.n_levels = genealogy.n_levels;
  r.seed = genealogy.seed.master_seed;
  r.stream = genealogy.seed.stream_id;
  r.mode = genealogy.mode;

  double total = 0.0;
  for (double v : values) total += v;
  r.eta_estimate = total / n;
  const double mass = genealogy.normalizers.back();
  r.gamma_estimate = mass * r.eta_estimate;

  std::vector<double> centered(values.begin(), values.end());
  for (double& v : centered) v -= r.eta_estimate;

  const DisjointLinesResult raw = disjoint_lines_untruncated(genealogy, values);
  const DisjointLinesResult cen = disjoint_lines_untruncated(genealogy, centered);
  r.v_n = raw.value;
  r.v_n_centered = cen.value;
  r.degenerate = raw.degenerate;
  r.sigma2_eta_scaled = n * r.v_n_centered;
  r.sigma2_gamma_scaled = n * mass * mass * r.v_n;

  for (int lag : options.lags) {
    const DisjointLinesResult t = disjoint_lines_values(genealogy, centered, lag);
    r.truncated.push_back({lag, n * t.value, t.degenerate});
  }
  if (options.term_by_term) {
    r.term_by_term = TermByTermEstimate{
        term_by_term_sigma2_values(genealogy, values, Sigma2Target::Gamma),
        term_by_term_sigma2_values(genealogy, values, Sigma2Target::EtaCentered)};
  }
  return r;
}

std::vector<std::string> report_csv_header(const ReportOptions& options) {
  std::vector<std::string> h{"N",     "n",     "seed", "mode",         "eta",
                             "gamma", "v_n",   "v_n_centered", "sigma2_eta_scaled",
                             "sigma2_gamma_scaled"};
  for (int lag : options.lags) h.push_back("lag_" + std::to_string(lag));
  if (options.term_by_term) {
    h.emplace_back("sigma2_gamma_tbt");
    h.emplace_back("sigma2_eta_tbt");
  }
  return h;
}

std::vector<std::string> report_csv_fields(const EstimatorReport& r) {
  std::vector<std::string> f{std::to_string(r.n_particles),
                             std::to_string(r.n_levels),
                             std::to_string(r.seed),
                             std::string(to_string(r.mode)),
                             format_double(r.eta_estimate),
                             format_double(r.gamma_estimate),
                             format_double(r.v_n),
                             format_double(r.v_n_centered),
                             format_double(r.sigma2_eta_scaled),
                             format_double(r.sigma2_gamma_scaled)};
  for (const auto& t : r.truncated) f.push_back(format_double(t.value));
  if (r.term_by_term) {
    f.push_back(format_double(r.term_by_term->sigma2_gamma));
    f.push_back(format_double(r.term_by_term->sigma2_eta_centered));
  }
  return f;
}

nlohmann::json report_to_json(const EstimatorReport& r) {
  nlohmann::json j;
  j["N"] = r.n_particles;
  j["n"] = r.n_levels;
  j["seed"] = r.seed;
  j["stream"] = r.stream;
  j["mode"] = std::string(to_string(r.mode));
  j["eta"] = r.eta_estimate;
  j["gamma"] = r.gamma_estimate;
  j["v_n"] = r.v_n;
  j["v_n_centered"] = r.v_n_centered;
  j["sigma2_eta_scaled"] = r.sigma2_eta_scaled;
  j["sigma2_gamma_scaled"] = r.sigma2_gamma_scaled;
  j["degenerate"] = r.degenerate;
  for (const auto& t : r.truncated) {
    j["lag_" + std::to_string(t.lag)] = t.value;
    j["lag_" + std::to_string(t.lag) + "_degenerate"] = t.degenerate;
  }
  if (r.term_by_term) {
    j["sigma2_gamma_tbt"] = r.term_by_term->sigma2_gamma;
    j["sigma2_eta_tbt"] = r.term_by_term->sigma2_eta_centered;
  }
  return j;
}

}  // namespace asmc
