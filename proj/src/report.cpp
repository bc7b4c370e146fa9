#include "popscale/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "popscale/errors.hpp"

namespace popscale {

using nlohmann::json;

json to_json(const Bracket& b) {
  return {{"lo", b.lo}, {"hi", b.hi}, {"certified", b.certified}};
}

json to_json(const SpectralReport& r) {
  json j;
  j["convergent"] = r.convergent;
  j["rho_Q"] = r.rho_q.mid();
  j["rho_Q_bracket"] = to_json(r.rho_q);
  if (std::isfinite(r.rho_n))
    j["rho_N"] = r.rho_n;
  else
    j["rho_N"] = "infinite";
  if (r.convergent) {
    j["rho_N_bracket"] = {{"lo", 1.0 / (1.0 - r.rho_q.lo)},
                          {"hi", 1.0 / (1.0 - r.rho_q.hi)},
                          {"certified", r.rho_q.certified}};
    j["m"] = r.m;
    j["norm_inf"] = r.norm_inf;
    j["norm_a"] = r.norm_a;
  }
  return j;
}

json to_json(const ScalabilityValue& v, int mu) {
  json j;
  switch (v.tag) {
    case ScalTag::value: j["value"] = v.value; break;
    case ScalTag::infinite: j["value"] = "infinite"; break;
    case ScalTag::undefined: j["value"] = "undefined"; break;
  }
  j["classification"] = to_string(v.classify(mu));
  return j;
}

json to_json(const ScalabilityReport& r) {
  return {{"mu", r.mu},
          {"rho_scalability", to_json(r.rho, r.mu)},
          {"inf_scalability", to_json(r.inf, r.mu)},
          {"a_scalability", to_json(r.a, r.mu)},
          {"a_hat_scalability", to_json(r.a_hat, r.mu)},
          {"benchmark", to_json(r.bench)},
          {"population", to_json(r.pop)}};
}

json to_json(const BridgeAnalysis& b, const Instance& inst) {
  json points = json::object();
  const auto& nonopt = inst.non_optimal();
  for (std::size_t i = 0; i < nonopt.size(); ++i) {
    json list = json::array();
    for (int y : b.bridge_points[i]) list.push_back(inst.label(y));
    points[inst.label(nonopt[i])] = list;
  }
  return {{"landscape", b.bridgeable ? "bridgeable" : "non_bridgeable"},
          {"x_rho", inst.label(b.x_rho)},
          {"bridge_points", points}};
}

json to_json(const RoadCheck& rc) {
  return {{"k", rc.k},
          {"lhs_min", rc.lhs_min},
          {"rhs", rc.rhs},
          {"satisfied", rc.satisfied},
          {"feasible", rc.feasible}};
}

namespace {
json checks_to_json(const std::vector<RoadCheck>& checks) {
  json arr = json::array();
  for (const auto& rc : checks) arr.push_back(to_json(rc));
  return arr;
}
}  // namespace

json to_json(const RoadConditionResult& r) {
  return {{"feasible", r.feasible},
          {"satisfied_at", r.satisfied_at},
          {"checks", checks_to_json(r.checks)}};
}

json to_json(const BlockRoadConditionResult& r) {
  return {{"feasible", r.feasible},
          {"satisfied_at", r.satisfied_at},
          {"checks", checks_to_json(r.checks)}};
}

json to_json(const BridgeNecessityResult& r, const Instance& inst) {
  return {{"verdict", r.no_superlinear_possible ? "no-superlinear-possible" : "inconclusive"},
          {"x_rho", inst.label(r.x_rho)},
          {"through_bridge", r.through_bridge},
          {"total_exit", r.total_exit},
          {"through_bridge_total", r.through_bridge_total}};
}

json to_json(const SufficiencyConditions& c, const Instance& inst) {
  return {{"x_rho", inst.label(c.x_rho)},
          {"x_rho_on_second_level", c.x_rho_on_second_level},
          {"lower_states_all_bridgeable", c.lower_states_all_bridgeable},
          {"opt_mass_factor_ok", c.opt_mass_factor_ok},
          {"bridge_mass_factor_ok", c.bridge_mass_factor_ok},
          {"worst_opt_ratio", c.worst_opt_ratio},
          {"bridge_ratio", c.bridge_ratio}};
}

json to_json(const SimEstimate& e) {
  json j;
  j["runs"] = e.runs;
  j["censored"] = e.censored;
  j["usable"] = e.usable;
  if (e.usable) {
    j["mean_hitting"] = e.mean_hitting;
    if (std::isfinite(e.std_error))
      j["std_error"] = e.std_error;
    else
      j["std_error"] = "undefined";
  }
  j["survival"] = e.survival;
  j["empirical_rate"] = e.empirical_rate;
  return j;
}

void write_text_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::endl;
    return;
  }
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << text << "\n";
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace popscale
