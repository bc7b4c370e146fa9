#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "popscale/builtins.hpp"
#include "popscale/errors.hpp"
#include "popscale/instance_io.hpp"
#include "popscale/scalability.hpp"
#include "popscale/sim.hpp"
#include "popscale/verify.hpp"

namespace py = pybind11;
using namespace popscale;

namespace {

const SelectionRule& rule_arg(const std::string& name) {
  const SelectionRule* rule = selection_by_name(name);
  if (rule == nullptr) throw ConfigError("unknown selection rule: " + name);
  return *rule;
}

}  // namespace

PYBIND11_MODULE(_popscale, m) {
  m.doc() = "Exact absorbing-chain analysis of population scalability for elitist EAs";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceededError", PyExc_RuntimeError);
  py::register_exception<NonConvergentError>(m, "NonConvergentError", PyExc_RuntimeError);

  py::class_<Instance>(m, "Instance")
      .def_static("tabular", &Instance::tabular, py::arg("labels"), py::arg("fitness"),
                  py::arg("multiplicity") = std::vector<std::int64_t>{})
      .def_static("knapsack", &Instance::knapsack, py::arg("n"), py::arg("values"),
                  py::arg("weights"), py::arg("capacity"))
      .def_property_readonly("size", &Instance::size)
      .def_property_readonly("labels", &Instance::labels)
      .def("fitness", &Instance::fitness)
      .def("multiplicity", &Instance::multiplicity)
      .def("is_optimal", &Instance::is_optimal)
      .def_property_readonly("optimal", &Instance::optimal)
      .def_property_readonly("non_optimal", &Instance::non_optimal)
      .def("high_set", &Instance::high_set)
      .def("level_of", &Instance::level_of)
      .def_property_readonly("total_states", &Instance::total_states)
      .def("state_by_label", &Instance::state_by_label)
      .def("__repr__", [](const Instance& inst) {
        std::ostringstream os;
        os << "Instance(" << inst.size() << " states, " << inst.total_states()
           << " represented)";
        return os.str();
      });

  py::class_<MutationKernel>(m, "MutationKernel")
      .def("entry", &MutationKernel::entry)
      .def_property_readonly("is_global", &MutationKernel::is_global)
      .def("mass",
           [](const MutationKernel& k, int x, const std::vector<int>& targets) {
             return k.mass(x, targets);
           })
      .def("mass_to_optimal", &MutationKernel::mass_to_optimal)
      .def("mass_to_high", &MutationKernel::mass_to_high);

  m.def("tabular_mutation", &tabular_mutation, py::arg("instance"), py::arg("rows"));
  m.def("bitwise_rejection_mutation", &bitwise_rejection_mutation, py::arg("instance"),
        py::arg("flip_prob"));
  m.def("mix_with_global", &mix_with_global, py::arg("instance"), py::arg("base"),
        py::arg("epsilon"));

  py::class_<SelectionRule>(m, "SelectionRule")
      .def_property_readonly("name", [](const SelectionRule& r) { return std::string(r.name); })
      .def_readonly("elitist", &SelectionRule::elitist)
      .def_readonly("exchangeable", &SelectionRule::exchangeable)
      .def_readonly("best_determined", &SelectionRule::best_determined);
  m.def("selection", [](const std::string& name) { return rule_arg(name); });

  py::class_<PopulationState>(m, "PopulationState")
      .def_readonly("members", &PopulationState::members)
      .def_readonly("best", &PopulationState::best);

  py::class_<TransitionSystem>(m, "TransitionSystem")
      .def_property_readonly("size", &TransitionSystem::size)
      .def_readonly("mu", &TransitionSystem::mu)
      .def_readonly("triangular", &TransitionSystem::triangular)
      .def_readonly("block_triangular", &TransitionSystem::block_triangular)
      .def_readonly("absorption", &TransitionSystem::absorption)
      .def_readonly("weights", &TransitionSystem::weights)
      .def_property_readonly("states", [](const TransitionSystem& ts) { return ts.states; })
      .def("row", [](const TransitionSystem& ts, int i) { return ts.q.at(i).entries; })
      .def("find_state", &TransitionSystem::find_state);

  m.def("build_one_plus_one_chain", &build_one_plus_one_chain);
  m.def(
      "build_population_chain",
      [](const Instance& inst, const MutationKernel& k, const std::string& rule, int mu,
         std::int64_t cap) { return build_population_chain(inst, k, rule_arg(rule), mu, cap); },
      py::arg("instance"), py::arg("kernel"), py::arg("selection"), py::arg("mu"),
      py::arg("state_cap") = kDefaultStateCap);
  m.def("build_lumped_chain",
        [](const Instance& inst, const MutationKernel& k, const std::string& rule, int mu) {
          return build_lumped_chain(inst, k, rule_arg(rule), mu);
        });

  py::class_<Bracket>(m, "Bracket")
      .def_readonly("lo", &Bracket::lo)
      .def_readonly("hi", &Bracket::hi)
      .def_readonly("certified", &Bracket::certified)
      .def_property_readonly("mid", &Bracket::mid);

  py::class_<SpectralReport>(m, "SpectralReport")
      .def_readonly("convergent", &SpectralReport::convergent)
      .def_property_readonly("rho_q", [](const SpectralReport& r) { return r.rho_q.mid(); })
      .def_readonly("rho_q_bracket", &SpectralReport::rho_q)
      .def_readonly("rho_n", &SpectralReport::rho_n)
      .def_readonly("m", &SpectralReport::m)
      .def_readonly("norm_inf", &SpectralReport::norm_inf)
      .def_readonly("norm_a", &SpectralReport::norm_a);

  m.def("hitting_vector", &hitting_vector);
  m.def("spectral_radius", &spectral_radius);
  m.def("spectral_report", &spectral_report);
  m.def("argmax_self_transition", &argmax_self_transition);
  m.def("fundamental_matrix", &fundamental_matrix);
  m.def("collatz_wielandt_bounds", &collatz_wielandt_bounds);

  py::class_<DistributionTrace>(m, "DistributionTrace")
      .def_readonly("survival", &DistributionTrace::survival)
      .def_readonly("rates", &DistributionTrace::rates);
  m.def("exact_rate_curve", &exact_rate_curve, py::arg("ts"), py::arg("q0"), py::arg("t_max"));

  py::class_<ElitistCheck>(m, "ElitistCheck")
      .def_readonly("residuals", &ElitistCheck::residuals)
      .def_readonly("max_residual", &ElitistCheck::max_residual)
      .def_readonly("holds", &ElitistCheck::holds);
  m.def("verify_elitist_property", &verify_elitist_property);

  py::class_<MutationPropertyCheck>(m, "MutationPropertyCheck")
      .def_readonly("population_mass", &MutationPropertyCheck::population_mass)
      .def_readonly("member_masses", &MutationPropertyCheck::member_masses)
      .def_readonly("lower_ok", &MutationPropertyCheck::lower_ok)
      .def_readonly("upper_ok", &MutationPropertyCheck::upper_ok)
      .def_readonly("strict", &MutationPropertyCheck::strict);
  m.def("verify_mutation_property", &verify_mutation_property);

  py::class_<ScalabilityValue>(m, "ScalabilityValue")
      .def_property_readonly("value",
                             [](const ScalabilityValue& v) -> py::object {
                               if (v.tag == ScalTag::value) return py::float_(v.value);
                               return py::str(v.tag == ScalTag::infinite ? "infinite"
                                                                         : "undefined");
                             })
      .def("classification",
           [](const ScalabilityValue& v, int mu) { return to_string(v.classify(mu)); });

  py::class_<ScalabilityReport>(m, "ScalabilityReport")
      .def_readonly("mu", &ScalabilityReport::mu)
      .def_readonly("rho", &ScalabilityReport::rho)
      .def_readonly("inf", &ScalabilityReport::inf)
      .def_readonly("a", &ScalabilityReport::a)
      .def_readonly("a_hat", &ScalabilityReport::a_hat)
      .def_readonly("benchmark", &ScalabilityReport::bench)
      .def_readonly("population", &ScalabilityReport::pop);

  m.def(
      "compute_scalability",
      [](const Instance& inst, const MutationKernel& k, const std::string& rule, int mu,
         std::int64_t cap) { return compute_scalability(inst, k, rule_arg(rule), mu, cap); },
      py::arg("instance"), py::arg("kernel"), py::arg("selection"), py::arg("mu"),
      py::arg("state_cap") = kDefaultStateCap);

  py::class_<BridgeAnalysis>(m, "BridgeAnalysis")
      .def_readonly("bridge_points", &BridgeAnalysis::bridge_points)
      .def_readonly("bridgeable", &BridgeAnalysis::bridgeable)
      .def_readonly("x_rho", &BridgeAnalysis::x_rho)
      .def_property_readonly("landscape", [](const BridgeAnalysis& b) {
        return std::string(b.bridgeable ? "bridgeable" : "non_bridgeable");
      });
  m.def("bridge_analysis", &bridge_analysis);
  m.def("road_probability", &road_probability);

  py::class_<RoadConditionResult>(m, "RoadConditionResult")
      .def_readonly("feasible", &RoadConditionResult::feasible)
      .def_readonly("satisfied_at", &RoadConditionResult::satisfied_at);
  py::class_<BlockRoadConditionResult>(m, "BlockRoadConditionResult")
      .def_readonly("feasible", &BlockRoadConditionResult::feasible)
      .def_readonly("satisfied_at", &BlockRoadConditionResult::satisfied_at);
  py::class_<BridgeNecessityResult>(m, "BridgeNecessityResult")
      .def_readonly("no_superlinear_possible", &BridgeNecessityResult::no_superlinear_possible)
      .def_readonly("through_bridge", &BridgeNecessityResult::through_bridge)
      .def_readonly("through_bridge_total", &BridgeNecessityResult::through_bridge_total);
  py::class_<SufficiencyConditions>(m, "SufficiencyConditions")
      .def_readonly("x_rho_on_second_level", &SufficiencyConditions::x_rho_on_second_level)
      .def_readonly("lower_states_all_bridgeable", &SufficiencyConditions::lower_states_all_bridgeable)
      .def_readonly("opt_mass_factor_ok", &SufficiencyConditions::opt_mass_factor_ok)
      .def_readonly("bridge_mass_factor_ok", &SufficiencyConditions::bridge_mass_factor_ok);

  m.def("check_road_condition",
        [](const Instance& inst, const MutationKernel& k, const std::string& rule, int mu,
           int k_max) { return check_road_condition(inst, k, rule_arg(rule), mu, k_max); });
  m.def("check_blockwise_road_condition",
        [](const Instance& inst, const MutationKernel& k, const std::string& rule, int mu,
           int k_max) { return check_blockwise_road_condition(inst, k, rule_arg(rule), mu, k_max); });
  m.def("check_bridge_necessity",
        [](const Instance& inst, const MutationKernel& k, const std::string& rule, int mu,
           int k_max) { return check_bridge_necessity(inst, k, rule_arg(rule), mu, k_max); });
  m.def("check_sufficiency_conditions", &check_sufficiency_conditions);

  py::class_<SimEstimate>(m, "SimEstimate")
      .def_readonly("runs", &SimEstimate::runs)
      .def_readonly("censored", &SimEstimate::censored)
      .def_readonly("usable", &SimEstimate::usable)
      .def_readonly("mean_hitting", &SimEstimate::mean_hitting)
      .def_readonly("std_error", &SimEstimate::std_error)
      .def_readonly("survival", &SimEstimate::survival)
      .def_readonly("empirical_rate", &SimEstimate::empirical_rate);

  m.def(
      "simulate",
      [](const Instance& inst, const MutationKernel& k, const std::string& rule, int mu,
         std::int64_t runs, std::int64_t t_cap, std::uint64_t seed, const std::string& init,
         const Members& start) {
        SimConfig config;
        config.runs = runs;
        config.t_cap = t_cap;
        config.seed = seed;
        if (init == "fixed") {
          config.init = InitMode::fixed;
          config.fixed = start;
        } else if (init == "uniform-all") {
          config.init = InitMode::uniform_all;
        } else if (init == "uniform-non-optimal") {
          config.init = InitMode::uniform_non_optimal;
        } else {
          throw ConfigError("unknown init mode: " + init);
        }
        return estimate(inst, k, rule_arg(rule), mu, config);
      },
      py::arg("instance"), py::arg("kernel"), py::arg("selection"), py::arg("mu"),
      py::arg("runs") = 10000, py::arg("t_cap") = 1000000, py::arg("seed") = 0,
      py::arg("init") = "uniform-non-optimal", py::arg("start") = Members{});

  m.def("builtin", [](const std::string& name, double epsilon, int n, double flip_prob) {
    BuiltinParams params{epsilon, n, flip_prob};
    BuiltinProblem p = make_builtin(name, params);
    return py::make_tuple(p.instance, p.kernel);
  }, py::arg("name"), py::arg("epsilon") = 0.0, py::arg("n") = 4, py::arg("flip_prob") = -1.0);
  m.def("builtin_names", [] { return builtin_names(); });
  m.def("parse_instance_json", [](const std::string& text) {
    LoadedProblem p = parse_instance_json(text);
    return py::make_tuple(p.instance, p.kernel, p.source);
  });

  m.def("run_verification", [] {
    std::ostringstream log;
    VerificationReport report = run_verification(log);
    py::list rows;
    for (const auto& cr : report.criteria)
      rows.append(py::make_tuple(cr.id, cr.passed, cr.seconds, cr.detail));
    return py::make_tuple(report.all_passed(), log.str(), rows);
  });
}
