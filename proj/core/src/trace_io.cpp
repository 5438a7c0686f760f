#include "asmc/trace_io.hpp"

#include <fstream>

namespace asmc {

nlohmann::json genealogy_to_json(const Genealogy& g) {
  nlohmann::json j;
  j["format"] = kTraceFormat;
  j["version"] = kTraceVersion;
  j["N"] = g.n_particles;
  j["n"] = g.n_levels;
  j["seed"] = {{"master", g.seed.master_seed}, {"stream", g.seed.stream_id}};
  j["mode"] = std::string(to_string(g.mode));
  auto ancestors = nlohmann::json::array();
  for (const auto& row : g.ancestors) {
    auto r = nlohmann::json::array();
    for (Index a : row) r.push_back(static_cast<std::uint64_t>(a) + 1);
    ancestors.push_back(std::move(r));
  }
  j["ancestors"] = std::move(ancestors);
  auto eve = nlohmann::json::array();
  for (Index e : g.eve) eve.push_back(static_cast<std::uint64_t>(e) + 1);
  j["eve"] = std::move(eve);
  j["normalizers"] = g.normalizers;
  j["potentials"] = g.potentials;
  auto params = nlohmann::json::array();
  for (const auto& z : g.adaptive_params) params.push_back(z.values);
  j["adaptive_params"] = std::move(params);
  return j;
}

Genealogy genealogy_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kTraceFormat ||
        j.at("version").get<int>() != kTraceVersion) {
      throw Error(ErrorCode::ParseError, "trace: unsupported format or version");
    }
    Genealogy g;
    g.n_particles = j.at("N").get<std::size_t>();
    g.n_levels = j.at("n").get<int>();
    g.seed.master_seed = j.at("seed").at("master").get<std::uint64_t>();
    g.seed.stream_id = j.at("seed").at("stream").get<std::uint64_t>();
    g.mode = parse_mode(j.at("mode").get<std::string>());
    const auto to_index = [&](std::uint64_t one_based) {
      if (one_based < 1 || one_based > g.n_particles) {
        throw Error(ErrorCode::ParseError, "trace: ancestor index outside [1, N]");
      }
      return static_cast<Index>(one_based - 1);
    };
    for (const auto& row : j.at("ancestors")) {
      std::vector<Index> r;
      for (const auto& a : row) r.push_back(to_index(a.get<std::uint64_t>()));
      g.ancestors.push_back(std::move(r));
    }
    for (const auto& e : j.at("eve")) g.eve.push_back(to_index(e.get<std::uint64_t>()));
    g.normalizers = j.at("normalizers").get<std::vector<double>>();
    g.potentials = j.at("potentials").get<std::vector<std::vector<double>>>();
    for (const auto& z : j.at("adaptive_params")) {
      Parameter p;
      p.values = z.get<std::vector<double>>();
      p.shape = {p.values.size()};
      g.adaptive_params.push_back(std::move(p));
    }
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("trace: ") + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << j.dump(1) << '\n';
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

}  // namespace asmc
