#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "asmc/trace.hpp"

namespace asmc {

// Trace container, format "asmc-trace" version 1:
//   N, n, seed {master, stream}, mode,
//   ancestors    n x N integer matrix, 1-based, row p = parents of level p+1
//   eve          N integers, 1-based level-0 ancestors of the terminal level
//   normalizers  n + 1 reals gamma_p^N(1)
//   potentials   n x N reals
//   adaptive_params  n + 1 real vectors Z_p^N
//   states       optional; all levels, or only the terminal one when "slim"
inline constexpr const char* kTraceFormat = "asmc-trace";
inline constexpr int kTraceVersion = 1;

nlohmann::json genealogy_to_json(const Genealogy& genealogy);
Genealogy genealogy_from_json(const nlohmann::json& j);

template <class State>
nlohmann::json trace_to_json(const ParticleSystemTrace<State>& trace,
                             bool include_states = true) {
  nlohmann::json j = genealogy_to_json(trace.genealogy);
  if (include_states) {
    j["slim"] = trace.slim;
    j["states"] = trace.states;
  }
  return j;
}

template <class State>
ParticleSystemTrace<State> trace_from_json(const nlohmann::json& j) {
  ParticleSystemTrace<State> trace;
  trace.genealogy = genealogy_from_json(j);
  if (!j.contains("states")) {
    throw Error(ErrorCode::ParseError, "trace: no states stored in container");
  }
  trace.slim = j.at("slim").get<bool>();
  trace.states = j.at("states").get<std::vector<std::vector<State>>>();
  const std::size_t expected =
      trace.slim ? 1 : static_cast<std::size_t>(trace.genealogy.n_levels + 1);
  if (trace.states.size() != expected) {
    throw Error(ErrorCode::ParseError, "trace: wrong number of state levels");
  }
  for (const auto& level : trace.states) {
    if (level.size() != trace.genealogy.n_particles) {
      throw Error(ErrorCode::ParseError, "trace: state level has wrong length");
    }
  }
  return trace;
}

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace asmc
