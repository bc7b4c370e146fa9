#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "popscale/builtins.hpp"
#include "popscale/errors.hpp"
#include "popscale/instance_io.hpp"
#include "popscale/report.hpp"
#include "popscale/scalability.hpp"
#include "popscale/sim.hpp"
#include "popscale/verify.hpp"

namespace {

using nlohmann::json;
using namespace popscale;

struct CommonArgs {
  std::string instance;
  std::string selection = "replicate_best";
  std::string out = "-";
  double epsilon = 0.0;
  int n = 4;
  double flip_prob = -1.0;
  std::int64_t state_cap = kDefaultStateCap;
};

void add_instance_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("instance", args.instance,
                  "instance file (JSON) or builtin name: paper-table12, paper-table34, "
                  "onemax-knapsack, deceptive-knapsack")
      ->required();
  cmd->add_option("--epsilon", args.epsilon, "epsilon override for the table builtins");
  cmd->add_option("--n", args.n, "bit length override for the knapsack builtins");
  cmd->add_option("--flip-prob", args.flip_prob, "flip probability override (default 1/n)");
  cmd->add_option("--out", args.out, "report path ('-' for stdout)");
  cmd->add_option("--state-cap", args.state_cap, "transient state cap override");
}

LoadedProblem load(const CommonArgs& args) {
  BuiltinParams params;
  params.epsilon = args.epsilon;
  params.n = args.n;
  params.flip_prob = args.flip_prob;
  return resolve_problem(args.instance, params);
}

std::int64_t effective_cap(const CommonArgs& args) {
  if (args.state_cap != kDefaultStateCap) return args.state_cap;
  if (const char* env = std::getenv("POPSCALE_STATE_CAP")) {
    try {
      return std::stoll(env);
    } catch (...) {
      throw ConfigError("POPSCALE_STATE_CAP is not an integer");
    }
  }
  return kDefaultStateCap;
}

const SelectionRule& rule_for(const std::string& name) {
  const SelectionRule* rule = selection_by_name(name);
  if (rule == nullptr)
    throw ConfigError("unknown selection rule: " + name +
                      " (replicate_best, elitist_proportional, elitist_truncation)");
  return *rule;
}

json inputs_echo(const LoadedProblem& problem, const CommonArgs& args) {
  json j;
  j["source"] = problem.source;
  j["states"] = problem.instance.size();
  j["total_states"] = problem.instance.total_states();
  j["selection"] = args.selection;
  if (!problem.echo.empty()) j["instance"] = json::parse(problem.echo);
  return j;
}

int cmd_analyze(const CommonArgs& args, int mu) {
  LoadedProblem problem = load(args);
  TransitionSystem ts =
      mu == 1 ? build_one_plus_one_chain(problem.instance, problem.kernel)
              : build_population_chain(problem.instance, problem.kernel,
                                       rule_for(args.selection), mu, effective_cap(args));
  SpectralReport rep = spectral_report(ts);
  json doc;
  doc["inputs"] = inputs_echo(problem, args);
  doc["mu"] = mu;
  doc["transient_states"] = ts.size();
  doc["blocks"] = ts.blocks.size();
  doc["spectral"] = to_json(rep);
  write_text_output(args.out, doc.dump(2));
  return 0;
}

int cmd_scale(const CommonArgs& args, int mu_max, const std::string& csv_path) {
  LoadedProblem problem = load(args);
  const SelectionRule& rule = rule_for(args.selection);
  json rows = json::array();
  std::ostringstream csv;
  csv << "mu,rho_scalability,inf_scalability,a_scalability,a_hat_scalability,rho_class\n";
  for (int mu = 2; mu <= mu_max; ++mu) {
    ScalabilityReport rep =
        compute_scalability(problem.instance, problem.kernel, rule, mu, effective_cap(args));
    rows.push_back(to_json(rep));
    csv << mu << ',' << to_string(rep.rho) << ',' << to_string(rep.inf) << ','
        << to_string(rep.a) << ',' << to_string(rep.a_hat) << ','
        << to_string(rep.rho.classify(mu)) << "\n";
  }
  json doc;
  doc["inputs"] = inputs_echo(problem, args);
  doc["sweep"] = rows;
  write_text_output(args.out, doc.dump(2));
  if (!csv_path.empty()) write_text_output(csv_path, csv.str());
  return 0;
}

int cmd_landscape(const CommonArgs& args) {
  LoadedProblem problem = load(args);
  BridgeAnalysis bridges = bridge_analysis(problem.instance, problem.kernel);
  json doc;
  doc["inputs"] = inputs_echo(problem, args);
  doc["bridge"] = to_json(bridges, problem.instance);
  write_text_output(args.out, doc.dump(2));
  return 0;
}

int cmd_roads(const CommonArgs& args, int mu, int k_max) {
  LoadedProblem problem = load(args);
  const SelectionRule& rule = rule_for(args.selection);
  json doc;
  doc["inputs"] = inputs_echo(problem, args);
  doc["mu"] = mu;
  doc["k_max"] = k_max;
  doc["road_condition"] =
      to_json(check_road_condition(problem.instance, problem.kernel, rule, mu, k_max,
                             effective_cap(args)));
  doc["blockwise_road_condition"] =
      to_json(check_blockwise_road_condition(problem.instance, problem.kernel, rule, mu, k_max,
                             effective_cap(args)));
  doc["bridge_necessity"] = to_json(check_bridge_necessity(problem.instance, problem.kernel, rule, mu,
                                                     k_max, effective_cap(args)),
                            problem.instance);
  doc["sufficiency"] = to_json(check_sufficiency_conditions(problem.instance, problem.kernel, mu),
                         problem.instance);
  doc["sufficiency"]["fitness_diversity_flag"] = rule.preserves_fitness_diversity;
  write_text_output(args.out, doc.dump(2));
  return 0;
}

int cmd_simulate(const CommonArgs& args, int mu, const SimConfig& base,
                 const std::string& init_mode, const std::string& start) {
  LoadedProblem problem = load(args);
  const SelectionRule& rule = rule_for(args.selection);
  SimConfig config = base;
  if (init_mode == "fixed") {
    config.init = InitMode::fixed;
    std::istringstream in(start);
    std::string label;
    while (std::getline(in, label, ',')) {
      int s = problem.instance.state_by_label(label);
      if (s < 0) throw ConfigError("unknown start state label: " + label);
      config.fixed.push_back(s);
    }
  } else if (init_mode == "uniform-all") {
    config.init = InitMode::uniform_all;
  } else if (init_mode == "uniform-non-optimal") {
    config.init = InitMode::uniform_non_optimal;
  } else {
    throw ConfigError("unknown init mode: " + init_mode);
  }
  SimEstimate est = estimate(problem.instance, problem.kernel, rule, mu, config);
  json doc;
  doc["inputs"] = inputs_echo(problem, args);
  doc["mu"] = mu;
  doc["seed"] = config.seed;
  doc["estimate"] = to_json(est);
  write_text_output(args.out, doc.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact absorbing-chain analysis of population scalability for elitist EAs"};
  app.require_subcommand(1);

  CommonArgs args;
  int mu = 1;
  int mu_max = 4;
  int k_max = 100;
  std::string csv_path;
  std::string init_mode = "uniform-non-optimal";
  std::string start;
  SimConfig sim_config;

  CLI::App* analyze = app.add_subcommand("analyze", "spectral report for one chain");
  add_instance_options(analyze, args);
  analyze->add_option("--mu", mu, "population size (1 = benchmark chain)");
  analyze->add_option("--selection", args.selection, "selection rule for mu >= 2");

  CLI::App* scale = app.add_subcommand("scale", "scalability sweep over mu = 2..mu-max");
  add_instance_options(scale, args);
  scale->add_option("--mu-max", mu_max, "largest population size");
  scale->add_option("--selection", args.selection, "selection rule");
  scale->add_option("--csv", csv_path, "also write the sweep as CSV");

  CLI::App* landscape = app.add_subcommand("landscape", "bridgeable-point analysis");
  add_instance_options(landscape, args);

  CLI::App* roads = app.add_subcommand("roads", "road-condition checkers");
  add_instance_options(roads, args);
  roads->add_option("--mu", mu, "population size")->check(CLI::Range(2, 1 << 20));
  roads->add_option("--k-max", k_max, "largest road length");
  roads->add_option("--selection", args.selection, "selection rule");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the EA");
  add_instance_options(simulate, args);
  simulate->add_option("--mu", mu, "population size");
  simulate->add_option("--selection", args.selection, "selection rule");
  simulate->add_option("--runs", sim_config.runs, "number of runs");
  simulate->add_option("--seed", sim_config.seed, "reproducibility seed");
  simulate->add_option("--t-cap", sim_config.t_cap, "per-run generation cap");
  simulate->add_option("--init", init_mode, "fixed | uniform-non-optimal | uniform-all");
  simulate->add_option("--start", start, "comma-separated labels for --init fixed");

  CLI::App* verify = app.add_subcommand("verify", "run the built-in verification suite");

  try {
    app.parse(argc, argv);
    if (analyze->parsed()) return cmd_analyze(args, mu);
    if (scale->parsed()) return cmd_scale(args, mu_max, csv_path);
    if (landscape->parsed()) return cmd_landscape(args);
    if (roads->parsed()) return cmd_roads(args, mu == 1 ? 2 : mu, k_max);
    if (simulate->parsed()) return cmd_simulate(args, mu, sim_config, init_mode, start);
    if (verify->parsed()) return run_verification(std::cout).all_passed() ? 0 : 4;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << " (required " << e.required << ", cap " << e.cap
              << ")\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
