#include "popscale/instance_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "popscale/errors.hpp"

namespace popscale {

namespace {

using nlohmann::json;

json require(const json& j, const char* key, const char* where) {
  if (!j.contains(key))
    throw ParseError(std::string("missing field '") + key + "' in " + where);
  return j.at(key);
}

std::vector<double> to_doubles(const json& j, const char* where) {
  if (!j.is_array()) throw ParseError(std::string(where) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(std::string(where) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

LoadedProblem from_tabular(const json& t) {
  auto states_json = require(t, "states", "tabular");
  std::vector<std::string> labels;
  for (const auto& s : states_json) {
    if (!s.is_string()) throw ParseError("tabular states must be strings");
    labels.push_back(s.get<std::string>());
  }
  std::vector<double> fitness = to_doubles(require(t, "fitness", "tabular"), "tabular fitness");
  std::vector<std::int64_t> mult;
  if (t.contains("multiplicity")) {
    for (const auto& v : t.at("multiplicity")) {
      if (!v.is_number_integer()) throw ParseError("multiplicity must hold integers");
      mult.push_back(v.get<std::int64_t>());
    }
  }
  auto rows_json = require(t, "mutation", "tabular");
  if (!rows_json.is_array()) throw ParseError("tabular mutation must be a matrix");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < rows_json.size(); ++i) {
    std::ostringstream where;
    where << "mutation row " << i;
    rows.push_back(to_doubles(rows_json[i], where.str().c_str()));
  }
  Instance inst = Instance::tabular(std::move(labels), std::move(fitness), std::move(mult));
  MutationKernel kernel = tabular_mutation(inst, rows);
  return {std::move(inst), std::move(kernel), "tabular", ""};
}

LoadedProblem from_knapsack(const json& k) {
  int n = require(k, "n", "knapsack").get<int>();
  auto values = to_doubles(require(k, "values", "knapsack"), "knapsack values");
  auto weights = to_doubles(require(k, "weights", "knapsack"), "knapsack weights");
  double capacity = require(k, "capacity", "knapsack").get<double>();
  double flip = k.value("flip_prob", n > 0 ? 1.0 / n : 0.5);
  Instance inst = Instance::knapsack(n, values, weights, capacity);
  MutationKernel kernel = bitwise_rejection_mutation(inst, flip);
  return {std::move(inst), std::move(kernel), "knapsack", ""};
}

LoadedProblem from_builtin(const json& b) {
  std::string name = require(b, "name", "builtin").get<std::string>();
  BuiltinParams params;
  params.epsilon = b.value("epsilon", 0.0);
  params.n = b.value("n", 4);
  params.flip_prob = b.value("flip_prob", -1.0);
  BuiltinProblem built = make_builtin(name, params);
  return {std::move(built.instance), std::move(built.kernel), name, ""};
}

}  // namespace

LoadedProblem parse_instance_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    int version = require(j, "schema_version", "instance file").get<int>();
    if (version != 1) throw ParseError("unsupported schema_version");
    std::string kind = require(j, "kind", "instance file").get<std::string>();
    int sections = static_cast<int>(j.contains("tabular")) +
                   static_cast<int>(j.contains("knapsack")) +
                   static_cast<int>(j.contains("builtin"));
    if (sections != 1 || !j.contains(kind))
      throw ParseError("exactly one of tabular/knapsack/builtin must be present and match kind");
    LoadedProblem problem = kind == "tabular"    ? from_tabular(j.at("tabular"))
                            : kind == "knapsack" ? from_knapsack(j.at("knapsack"))
                                                 : from_builtin(j.at("builtin"));
    problem.echo = j.dump();
    return problem;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed instance file: ") + e.what());
  }
}

LoadedProblem load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance_json(buf.str());
}

LoadedProblem resolve_problem(const std::string& path_or_builtin,
                              const BuiltinParams& overrides) {
  const auto& names = builtin_names();
  if (std::find(names.begin(), names.end(), path_or_builtin) != names.end()) {
    BuiltinProblem built = make_builtin(path_or_builtin, overrides);
    nlohmann::json echo = {{"schema_version", 1},
                           {"kind", "builtin"},
                           {"builtin",
                            {{"name", path_or_builtin},
                             {"epsilon", overrides.epsilon},
                             {"n", overrides.n},
                             {"flip_prob", overrides.flip_prob}}}};
    return {std::move(built.instance), std::move(built.kernel), path_or_builtin, echo.dump()};
  }
  if (!std::filesystem::exists(path_or_builtin))
    throw ParseError("no such instance file or builtin: " + path_or_builtin);
  return load_instance_file(path_or_builtin);
}

std::string instance_to_json(const LoadedProblem& problem) {
  const Instance& inst = problem.instance;
  nlohmann::json t;
  t["states"] = inst.labels();
  std::vector<double> fitness;
  std::vector<std::int64_t> mult;
  for (int s = 0; s < inst.size(); ++s) {
    fitness.push_back(inst.fitness(s));
    mult.push_back(inst.multiplicity(s));
  }
  t["fitness"] = fitness;
  t["multiplicity"] = mult;
  // rows are stored per actual state: divide the class entries back out
  std::vector<std::vector<double>> rows(inst.size(), std::vector<double>(inst.size()));
  for (int x = 0; x < inst.size(); ++x)
    for (int y = 0; y < inst.size(); ++y)
      rows[x][y] = problem.kernel.entry(x, y) / static_cast<double>(inst.multiplicity(y));
  t["mutation"] = rows;
  nlohmann::json j = {{"schema_version", 1}, {"kind", "tabular"}, {"tabular", t}};
  return j.dump(2);
}

}  // namespace popscale
