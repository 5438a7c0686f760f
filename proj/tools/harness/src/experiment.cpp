#include "asmc/harness/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <variant>

#include "asmc/format.hpp"
#include "asmc/harness/parallel.hpp"
#include "asmc/ips.hpp"
#include "asmc/oracle/exact.hpp"
#include "asmc/stats.hpp"
#include "asmc/trace_io.hpp"

namespace asmc::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::InvalidArgument, "config: " + message);
}

json default_document() {
  return json{{"model", {{"type", "gaussian-bench"}}},
              {"N", {100}},
              {"modes", {"adaptive", "nonadaptive"}},
              {"replicates", 1},
              {"lags", json::array()},
              {"term_by_term", false},
              {"seed", 1},
              {"reference", nullptr},
              {"oracle", false},
              {"output_dir", "asmc-out"},
              {"threads", 0}};
}

void merge(json& target, const json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it->is_object() && target.contains(it.key()) && target[it.key()].is_object()) {
      merge(target[it.key()], *it);
    } else {
      target[it.key()] = *it;
    }
  }
}

// The model, shared by every replicate of a group.
class Runner {
 public:
  explicit Runner(const ExperimentConfig& config) : config_(config) {
    if (config.model == ModelKind::GaussianBench) {
      gaussian_ = std::make_unique<gaussian::GaussianBridgeModel>(config.gaussian);
    } else {
      discrete_ = to_feynman_kac(*config.discrete);
    }
  }

  EstimatorReport report(std::size_t n_particles, AdaptivityMode mode, std::uint64_t stream) const {
    const RngStreamSpec spec{config_.seed, stream};
    const RunOptions slim{true};
    ReportOptions options{config_.lags, config_.term_by_term};
    if (gaussian_) {
      const auto trace = run_ips(*gaussian_, n_particles, mode, spec, slim);
      const int c = config_.coordinate;
      return variance_report(trace, [c](const gaussian::Vector& x) { return x(c); }, options);
    }
    const auto trace = run_ips(discrete_, n_particles, mode, spec, slim);
    const auto& f = config_.function_values;
    return variance_report(trace, [&f](DiscreteState x) { return f[static_cast<std::size_t>(x)]; },
                           options);
  }

  std::vector<double> acceptance() const {
    std::vector<double> out;
    if (!gaussian_) return out;
    for (int p = 1; p <= gaussian_->n_levels(); ++p) {
      out.push_back(gaussian_->telemetry().acceptance_rate(p));
    }
    return out;
  }

 private:
  const ExperimentConfig& config_;
  std::unique_ptr<gaussian::GaussianBridgeModel> gaussian_;
  FeynmanKacModel<DiscreteState> discrete_;
};

int terminal_level(const ExperimentConfig& c) {
  return c.model == ModelKind::GaussianBench ? c.gaussian.max_level : c.discrete->n_levels();
}

std::string field(double v) { return std::isnan(v) ? std::string() : format_double(v); }

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

std::vector<double> column_values(const GroupResult& g, std::size_t column,
                                  const ExperimentConfig& c) {
  std::vector<double> out;
  const std::size_t lags = c.lags.size();
  for (const auto& r : g.reports) {
    double v = 0.0;
    if (column == 0) v = r.eta_estimate;
    else if (column == 1) v = r.gamma_estimate;
    else if (column == 2) v = r.sigma2_eta_scaled;
    else if (column == 3) v = r.sigma2_gamma_scaled;
    else if (column < 4 + lags) v = r.truncated[column - 4].value;
    else if (column == 4 + lags) v = r.term_by_term->sigma2_gamma;
    else v = r.term_by_term->sigma2_eta_centered;
    out.push_back(v);
  }
  return out;
}

ColumnSummary summary_of(std::span<const double> values) {
  const RunningStats s = summarize(values);
  const Interval ci = normal_ci95(s);
  return {s.mean(), s.stddev(), ci.lo, ci.hi};
}

std::vector<std::string> aggregate_header(const ExperimentResult& result) {
  std::vector<std::string> h{"N", "series", "replicates"};
  for (const auto& c : aggregate_columns(result.config)) {
    for (const char* s : {"_mean", "_sd", "_ci_lo", "_ci_hi"}) h.push_back(c + s);
  }
  h.emplace_back("crude_sigma2_eta");
  h.emplace_back("degenerate_fraction");
  if (result.exact) {
    h.emplace_back("exact_eta");
    h.emplace_back("exact_sigma2_eta_centered");
    h.emplace_back("exact_sigma2_gamma");
  }
  return h;
}

std::vector<std::string> aggregate_fields(const ExperimentResult& result, const AggregateRow& row) {
  std::vector<std::string> f{std::to_string(row.n_particles), row.series,
                             std::to_string(row.replicates)};
  for (const auto& c : row.columns) {
    if (c) {
      for (double v : {c->mean, c->sd, c->ci_lo, c->ci_hi}) f.push_back(field(v));
    } else {
      f.insert(f.end(), 4, std::string());
    }
  }
  f.push_back(row.crude_sigma2 ? field(*row.crude_sigma2) : std::string());
  f.push_back(field(row.degenerate_fraction));
  if (result.exact) {
    f.push_back(field(result.exact->eta));
    f.push_back(field(result.exact->sigma2_eta_centered));
    f.push_back(field(result.exact->sigma2_gamma));
  }
  return f;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

}  // namespace

json apply_overrides(json document, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::ParseError, "override '" + o + "' is not key=value");
    }
    std::string pointer = "/" + o.substr(0, eq);
    for (char& ch : pointer) {
      if (ch == '.') ch = '/';
    }
    const std::string text = o.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    try {
      document[json::json_pointer(pointer)] = value;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, "override '" + o + "': " + e.what());
    }
  }
  return document;
}

ExperimentConfig parse_config(const json& document, const std::string& base_dir) {
  json doc = default_document();
  if (!document.is_object()) throw Error(ErrorCode::ParseError, "config: top level must be an object");
  merge(doc, document);

  ExperimentConfig c;
  try {
    const json& model = doc.at("model");
    const std::string type = model.at("type").get<std::string>();
    if (type == "gaussian-bench") {
      c.model = ModelKind::GaussianBench;
      c.gaussian.dimension = model.value("dimension", c.gaussian.dimension);
      c.gaussian.denominator = model.value("denominator", c.gaussian.denominator);
      c.gaussian.metropolis_sweeps = model.value("sweeps", c.gaussian.metropolis_sweeps);
      c.gaussian.proposal_scale = model.value("proposal_scale", c.gaussian.proposal_scale);
      c.gaussian.max_level = doc.value("n", c.gaussian.max_level);
      c.gaussian.validate();
    } else if (type == "discrete-file") {
      c.model = ModelKind::DiscreteFile;
      fs::path path = model.at("path").get<std::string>();
      if (path.is_relative()) path = fs::path(base_dir) / path;
      c.discrete_path = path.string();
      c.discrete = load_discrete_model(c.discrete_path);
      if (doc.contains("n") && doc.at("n").get<int>() != c.discrete->n_levels()) {
        invalid("n differs from the level count of " + c.discrete_path);
      }
    } else {
      invalid("unknown model type '" + type + "'");
    }

    c.particle_counts = doc.at("N").get<std::vector<std::size_t>>();
    c.modes.clear();
    for (const auto& m : doc.at("modes")) c.modes.push_back(parse_mode(m.get<std::string>()));
    c.replicates = doc.at("replicates").get<std::size_t>();
    c.lags = doc.at("lags").get<std::vector<int>>();
    c.term_by_term = doc.at("term_by_term").get<bool>();
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.oracle = doc.at("oracle").get<bool>();
    c.output_dir = doc.at("output_dir").get<std::string>();
    c.threads = doc.at("threads").get<unsigned>();

    if (doc.contains("test_function")) {
      const json& tf = doc.at("test_function");
      const std::string kind = tf.at("type").get<std::string>();
      if (kind == "coordinate") {
        c.coordinate = tf.at("index").get<int>();
      } else if (kind == "values") {
        c.function_values = tf.at("values").get<std::vector<double>>();
      } else {
        invalid("unknown test_function type '" + kind + "'");
      }
    }
    if (!doc.at("reference").is_null()) {
      const json& ref = doc.at("reference");
      c.reference = ReferenceBlock{ref.at("replicates").get<std::size_t>(),
                                   ref.at("N").get<std::size_t>()};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }

  if (c.particle_counts.empty()) invalid("N list is empty");
  for (std::size_t n : c.particle_counts) {
    if (n < 2) invalid("every N must be >= 2");
  }
  if (c.modes.empty()) invalid("modes list is empty");
  if (c.replicates < 1) invalid("replicates must be >= 1");
  const int n = terminal_level(c);
  for (int lag : c.lags) {
    if (lag < 0 || lag > n) invalid("lag " + std::to_string(lag) + " outside [0, n]");
  }
  if (c.model == ModelKind::GaussianBench) {
    if (c.coordinate < 0 || c.coordinate >= c.gaussian.dimension) invalid("coordinate index out of range");
    if (c.oracle) invalid("the oracle block needs a discrete model");
  } else {
    const std::size_t k = c.discrete->states(n);
    if (c.function_values.empty()) {
      for (std::size_t x = 0; x < k; ++x) c.function_values.push_back(static_cast<double>(x));
    }
    if (c.function_values.size() != k) invalid("test function needs one value per terminal state");
  }
  if (c.reference && (c.reference->replicates < 2 || c.reference->n_particles < 2)) {
    invalid("reference block needs replicates >= 2 and N >= 2");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  const json doc = apply_overrides(read_json_file(path), overrides);
  return parse_config(doc, fs::path(path).parent_path().string());
}

EstimatorReport run_replicate(const ExperimentConfig& config, std::size_t n_particles,
                              AdaptivityMode mode, std::uint64_t stream_id) {
  return Runner(config).report(n_particles, mode, stream_id);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  result.config = config;
  for (std::size_t n_particles : config.particle_counts) {
    for (AdaptivityMode mode : config.modes) {
      Runner runner(result.config);
      GroupResult g;
      g.n_particles = n_particles;
      g.mode = mode;
      g.reports = parallel_map<EstimatorReport>(config.replicates, config.threads, [&](std::size_t r) {
        return runner.report(n_particles, mode, r);
      });
      g.acceptance = runner.acceptance();
      result.groups.push_back(std::move(g));
    }
  }
  if (config.reference) {
    Runner runner(result.config);
    const auto& ref = *config.reference;
    const auto reports = parallel_map<EstimatorReport>(ref.replicates, config.threads, [&](std::size_t r) {
      return runner.report(ref.n_particles, AdaptivityMode::Nonadaptive, kReferenceStreamOffset + r);
    });
    RunningStats eta;
    for (const auto& r : reports) eta.push(r.eta_estimate);
    ReferenceResult rr;
    rr.n_particles = ref.n_particles;
    rr.replicates = ref.replicates;
    rr.eta_mean = eta.mean();
    rr.eta_sd = eta.stddev();
    rr.sigma2 = static_cast<double>(ref.n_particles) * eta.variance();
    const double half = kNormalQuantile975 * std::sqrt(2.0 / static_cast<double>(ref.replicates - 1));
    rr.ci_lo = rr.sigma2 * (1.0 - half);
    rr.ci_hi = rr.sigma2 * (1.0 + half);
    result.reference = rr;
  }
  if (config.oracle) {
    const auto flow = exact_flow(*config.discrete);
    const auto var = exact_asymptotic_variance(*config.discrete, config.function_values);
    result.exact = ExactColumns{integrate(flow.eta.back(), config.function_values),
                                var.sigma2_eta_centered, var.sigma2_gamma};
  }
  return result;
}

std::vector<std::string> aggregate_columns(const ExperimentConfig& config) {
  std::vector<std::string> c{"eta", "gamma", "sigma2_eta_scaled", "sigma2_gamma_scaled"};
  for (int lag : config.lags) c.push_back("lag_" + std::to_string(lag));
  if (config.term_by_term) {
    c.emplace_back("sigma2_gamma_tbt");
    c.emplace_back("sigma2_eta_tbt");
  }
  return c;
}

std::vector<AggregateRow> aggregate(const ExperimentResult& result) {
  const auto& config = result.config;
  const std::size_t columns = aggregate_columns(config).size();
  std::vector<AggregateRow> rows;
  for (const auto& g : result.groups) {
    AggregateRow row;
    row.n_particles = g.n_particles;
    row.series = std::string(to_string(g.mode));
    row.replicates = g.reports.size();
    for (std::size_t c = 0; c < columns; ++c) row.columns.push_back(summary_of(column_values(g, c, config)));
    if (g.reports.size() > 1) {
      row.crude_sigma2 = static_cast<double>(g.n_particles) * summarize(column_values(g, 0, config)).variance();
    }
    std::size_t degenerate = 0;
    for (const auto& r : g.reports) degenerate += r.degenerate ? 1 : 0;
    row.degenerate_fraction = static_cast<double>(degenerate) / static_cast<double>(g.reports.size());
    rows.push_back(std::move(row));
  }
  if (result.reference) {
    const auto& ref = *result.reference;
    AggregateRow row;
    row.n_particles = ref.n_particles;
    row.series = "reference";
    row.replicates = ref.replicates;
    row.columns.assign(columns, std::nullopt);
    const double se = ref.eta_sd / std::sqrt(static_cast<double>(ref.replicates));
    row.columns[0] = ColumnSummary{ref.eta_mean, ref.eta_sd, ref.eta_mean - kNormalQuantile975 * se,
                                   ref.eta_mean + kNormalQuantile975 * se};
    row.columns[2] = ColumnSummary{ref.sigma2, std::nan(""), ref.ci_lo, ref.ci_hi};
    row.crude_sigma2 = ref.sigma2;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string replicates_csv(const ExperimentResult& result) {
  std::ostringstream out;
  std::vector<std::string> header{"replicate"};
  for (auto& h : report_csv_header({result.config.lags, result.config.term_by_term})) header.push_back(h);
  out << join_csv(header) << '\n';
  for (const auto& g : result.groups) {
    for (std::size_t r = 0; r < g.reports.size(); ++r) {
      std::vector<std::string> row{std::to_string(r)};
      for (auto& f : report_csv_fields(g.reports[r])) row.push_back(std::move(f));
      out << join_csv(row) << '\n';
    }
  }
  return out.str();
}

std::string aggregate_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << join_csv(aggregate_header(result)) << '\n';
  for (const auto& row : aggregate(result)) out << join_csv(aggregate_fields(result, row)) << '\n';
  return out.str();
}

json replicates_json(const ExperimentResult& result) {
  json rows = json::array();
  for (const auto& g : result.groups) {
    for (std::size_t r = 0; r < g.reports.size(); ++r) {
      json j = report_to_json(g.reports[r]);
      j["replicate"] = r;
      rows.push_back(std::move(j));
    }
  }
  return rows;
}

json aggregate_json(const ExperimentResult& result) {
  const auto header = aggregate_header(result);
  json rows = json::array();
  for (const auto& row : aggregate(result)) {
    const auto fields = aggregate_fields(result, row);
    json j;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == "series") {
        j[header[i]] = fields[i];
      } else if (fields[i].empty()) {
        j[header[i]] = nullptr;
      } else if (header[i] == "N" || header[i] == "replicates") {
        j[header[i]] = std::stoull(fields[i]);
      } else {
        j[header[i]] = number_or_null(parse_double(fields[i]));
      }
    }
    rows.push_back(std::move(j));
  }
  json out{{"rows", std::move(rows)}};
  json acceptance = json::object();
  for (const auto& g : result.groups) {
    if (g.acceptance.empty()) continue;
    acceptance[std::to_string(g.n_particles) + "/" + std::string(to_string(g.mode))] = g.acceptance;
  }
  if (!acceptance.empty()) out["acceptance_rate"] = std::move(acceptance);
  return out;
}

void write_outputs(const ExperimentResult& result, const std::string& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + directory + ": " + ec.message());
  const fs::path dir(directory);
  write_text(dir / "replicates.csv", replicates_csv(result));
  write_text(dir / "aggregate.csv", aggregate_csv(result));
  write_text(dir / "replicates.json", replicates_json(result).dump(1) + "\n");
  write_text(dir / "aggregate.json", aggregate_json(result).dump(1) + "\n");
}

std::string plot_data(const std::string& text, const std::vector<std::string>& requested) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "plot-data: empty aggregate file");
  const auto header = split_csv(line);
  const auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw Error(ErrorCode::ParseError, "plot-data: aggregate has no column '" + name + "'");
  };
  const std::size_t cN = column("N"), cs = column("series"), cy = column("sigma2_eta_scaled_mean"),
                    clo = column("sigma2_eta_scaled_ci_lo"), chi = column("sigma2_eta_scaled_ci_hi");

  struct Point { std::string y, lo, hi; };
  std::vector<std::string> sweep;  // N values in order of first appearance
  std::map<std::pair<std::string, std::string>, Point> points;
  std::optional<Point> reference;
  std::vector<std::string> present;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) throw Error(ErrorCode::ParseError, "plot-data: ragged row");
    const Point p{f[cy], f[clo], f[chi]};
    if (std::find(present.begin(), present.end(), f[cs]) == present.end()) present.push_back(f[cs]);
    if (f[cs] == "reference") {
      reference = p;
      continue;
    }
    if (std::find(sweep.begin(), sweep.end(), f[cN]) == sweep.end()) sweep.push_back(f[cN]);
    points[{f[cN], f[cs]}] = p;
  }
  std::vector<std::string> series = requested;
  if (series.empty()) {
    for (const char* s : {"adaptive", "nonadaptive", "reference"}) {
      if (std::find(present.begin(), present.end(), s) != present.end()) series.emplace_back(s);
    }
  }
  for (const auto& s : series) {
    if (std::find(present.begin(), present.end(), s) == present.end()) {
      throw Error(ErrorCode::MissingSeries, "plot-data: series '" + s + "' was not run");
    }
  }
  std::ostringstream out;
  out << "N,series,y,y_lo,y_hi\n";
  for (const auto& n : sweep) {
    for (const auto& s : series) {
      const Point* p = nullptr;
      if (s == "reference") {
        p = &*reference;
      } else {
        const auto it = points.find({n, s});
        if (it == points.end()) throw Error(ErrorCode::MissingSeries, "plot-data: no " + s + " row at N = " + n);
        p = &it->second;
      }
      out << join_csv({n, s, p->y, p->lo, p->hi}) << '\n';
    }
  }
  return out.str();
}

}  // namespace asmc::harness
