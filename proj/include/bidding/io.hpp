#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bidding/certify.hpp"
#include "bidding/engine.hpp"
#include "bidding/graph.hpp"
#include "bidding/solver.hpp"
#include "bidding/trace.hpp"

namespace bidding {

using json = nlohmann::json;

// Graph document:
//   {"vertices":[{"id":0,"weight":1.0,"parity":2},...], "edges":[[0,1],...]}
// ids dense 0..n-1; "parity" optional per vertex.

inline RawGraph raw_graph_from_json(const json& j) {
  RawGraph raw;
  if (!j.contains("vertices") || !j.contains("edges"))
    throw Error(Errc::BadInput, "graph json needs 'vertices' and 'edges'");
  for (const auto& jv : j.at("vertices")) {
    Vertex v;
    v.id = jv.at("id").get<int>();
    v.weight = jv.at("weight").get<double>();
    if (jv.contains("parity")) v.parity = jv.at("parity").get<int>();
    raw.vertices.push_back(v);
  }
  for (const auto& je : j.at("edges")) {
    if (!je.is_array() || je.size() != 2) throw Error(Errc::BadInput, "edge must be a pair");
    raw.edges.emplace_back(je.at(0).get<int>(), je.at(1).get<int>());
  }
  return raw;
}

inline GameGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadInput, "cannot open graph file: " + path);
  json j;
  in >> j;
  return validate_graph(raw_graph_from_json(j));
}

inline json graph_to_json(const GameGraph& g) {
  json verts = json::array();
  for (const auto& v : g.vertices()) {
    json jv = {{"id", v.id}, {"weight", v.weight}};
    if (v.parity) jv["parity"] = *v.parity;
    verts.push_back(jv);
  }
  json edges = json::array();
  for (VertexId u = 0; u < g.size(); ++u)
    for (VertexId w : g.successors(u)) edges.push_back(json::array({u, w}));
  return {{"vertices", verts}, {"edges", edges}};
}

inline json solution_to_json(const StochasticSolution& s) {
  json j;
  j["p"] = s.p;
  j["value"] = s.value;
  j["pot"] = s.pot;
  j["strength"] = s.strength;
  j["sigma_max"] = s.sigma_max;
  j["sigma_min"] = s.sigma_min;
  j["s_max"] = s.s_max;
  if (s.s_min_pos) j["s_min_pos"] = *s.s_min_pos;
  return j;
}

inline const char* player_name(Player p) { return p == Player::Max ? "max" : "min"; }

inline json step_to_json(const StepRecord& r) {
  return {{"vertex", r.vertex},
          {"bid_max", r.bid_max},
          {"bid_min", r.bid_min},
          {"winner", player_name(r.winner)},
          {"move_to", r.move_to},
          {"budget_max", r.budgets_after.max_budget},
          {"budget_min", r.budgets_after.min_budget}};
}

// Trace dumps are JSON-lines with exactly one StepRecord per line. What
// replay needs beyond the steps (mechanism, initial budgets, cadence, seed)
// lives in a sidecar metadata document, written next to the dump as
// <path>.meta.json.

inline std::string trace_steps_to_jsonl(const PlayTrace& t) {
  std::ostringstream out;
  for (const auto& s : t.steps) out << step_to_json(s).dump() << "\n";
  return out.str();
}

inline json trace_meta_to_json(const PlayTrace& t) {
  return {{"mechanism", t.mechanism.name()},
          {"budget_max", t.initial_budgets.max_budget},
          {"budget_min", t.initial_budgets.min_budget},
          {"start", t.start_vertex},
          {"cadence", t.cadence == NormalizationCadence::MinToOne ? "min=1" : "none"},
          {"seed", t.seed},
          {"trial", t.trial}};
}

inline BiddingMechanism parse_mechanism(const std::string& spec);

inline PlayTrace trace_from_jsonl(std::istream& steps, const json& meta) {
  PlayTrace t;
  t.mechanism = parse_mechanism(meta.at("mechanism").get<std::string>());
  t.initial_budgets = {meta.at("budget_max").get<double>(), meta.at("budget_min").get<double>()};
  t.start_vertex = meta.at("start").get<int>();
  t.cadence = meta.at("cadence").get<std::string>() == "min=1" ? NormalizationCadence::MinToOne
                                                               : NormalizationCadence::None;
  t.seed = meta.at("seed").get<uint64_t>();
  t.trial = meta.at("trial").get<uint64_t>();
  std::string line;
  while (std::getline(steps, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    StepRecord r;
    r.vertex = j.at("vertex").get<int>();
    r.bid_max = j.at("bid_max").get<double>();
    r.bid_min = j.at("bid_min").get<double>();
    r.winner = j.at("winner").get<std::string>() == "max" ? Player::Max : Player::Min;
    r.move_to = j.at("move_to").get<int>();
    r.budgets_after = {j.at("budget_max").get<double>(), j.at("budget_min").get<double>()};
    t.steps.push_back(r);
  }
  return t;
}

inline void write_trace_files(const PlayTrace& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::BadInput, "cannot write trace file: " + path);
  out << trace_steps_to_jsonl(t);
  std::ofstream meta(path + ".meta.json");
  if (!meta) throw Error(Errc::BadInput, "cannot write trace metadata: " + path + ".meta.json");
  meta << trace_meta_to_json(t).dump(2) << "\n";
}

inline PlayTrace load_trace_files(const std::string& path) {
  std::ifstream meta_in(path + ".meta.json");
  if (!meta_in) throw Error(Errc::BadInput, "cannot open trace metadata: " + path + ".meta.json");
  json meta;
  meta_in >> meta;
  std::ifstream steps(path);
  if (!steps) throw Error(Errc::BadInput, "cannot open trace file: " + path);
  return trace_from_jsonl(steps, meta);
}

inline json stats_to_json(const PayoffStats& s) {
  json per = json::array();
  for (const auto& r : s.per_trial)
    per.push_back({{"horizon_average", r.horizon_average},
                   {"tail_min_average", r.tail_min_average},
                   {"max_win_steps", r.max_win_steps}});
  return {{"trials", s.trials},
          {"horizon", s.horizon},
          {"per_trial", per},
          {"mean_horizon", s.mean_horizon},
          {"min_horizon", s.min_horizon},
          {"max_horizon", s.max_horizon},
          {"mean_tail_min", s.mean_tail_min},
          {"min_tail_min", s.min_tail_min},
          {"max_tail_min", s.max_tail_min}};
}

inline json report_to_json(const CheckReport& r) {
  json j = {{"check", r.name},
            {"passed", r.passed},
            {"steps", r.steps},
            {"worst_margin", r.worst_margin},
            {"worst_step", r.worst_step},
            {"max_wins_off_vplus", r.max_wins_off_vplus}};
  if (r.first_violation) j["first_violation"] = *r.first_violation;
  if (r.worst_literal_margin) j["worst_literal_margin"] = *r.worst_literal_margin;
  return j;
}

/// Mechanism specs: fp-richman | fp-poorman | ap-richman | ap-poorman |
/// taxman:tau=X | asymmetric:W=X.
inline BiddingMechanism parse_mechanism(const std::string& spec) {
  auto starts = [&spec](const char* s) { return spec.rfind(s, 0) == 0; };
  if (spec == "fp-richman") return BiddingMechanism::fp_richman();
  if (spec == "fp-poorman") return BiddingMechanism::fp_poorman();
  if (spec == "ap-richman") return BiddingMechanism::ap_richman();
  if (spec == "ap-poorman") return BiddingMechanism::ap_poorman();
  if (starts("taxman")) {
    auto pos = spec.find("tau=");
    if (pos == std::string::npos) throw Error(Errc::BadInput, "taxman needs tau=, got " + spec);
    return BiddingMechanism::taxman(std::stod(spec.substr(pos + 4)));
  }
  if (starts("asymmetric")) {
    auto pos = spec.find("W=");
    if (pos == std::string::npos) throw Error(Errc::BadInput, "asymmetric needs W=, got " + spec);
    return BiddingMechanism::asymmetric(std::stod(spec.substr(pos + 2)));
  }
  throw Error(Errc::BadInput, "unknown mechanism: " + spec);
}

}  // namespace bidding
