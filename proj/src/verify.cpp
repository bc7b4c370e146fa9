#include "popscale/verify.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "popscale/builtins.hpp"
#include "popscale/scalability.hpp"
#include "popscale/sim.hpp"

namespace popscale {

namespace {

using Clock = std::chrono::steady_clock;

struct Checker {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " FAILED{" << what << "}";
    }
  }
  void note(const std::string& what) { detail << " " << what; }
};

Eigen::MatrixXd dense_q(const TransitionSystem& ts) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(ts.size(), ts.size());
  for (int i = 0; i < ts.size(); ++i)
    for (const auto& [j, p] : ts.q[i].entries) q(i, j) = p;
  return q;
}

double max_abs_eigenvalue(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  double r = 0.0;
  for (int i = 0; i < a.rows(); ++i) r = std::max(r, std::abs(solver.eigenvalues()(i)));
  return r;
}

// one optimal state on top of `transients` random lower-fitness states
Instance random_instance(std::uint64_t& rng, int transients) {
  std::vector<std::string> labels;
  std::vector<double> fitness;
  labels.push_back("top");
  fitness.push_back(1000.0);
  for (int i = 0; i < transients; ++i) {
    labels.push_back("s" + std::to_string(i));
    fitness.push_back(static_cast<double>(split_next(rng) % 900));
  }
  return Instance::tabular(std::move(labels), std::move(fitness));
}

// random row-stochastic rows; the first column (the optimal state) keeps
// positive mass so that every generated chain is convergent
MutationKernel random_kernel(std::uint64_t& rng, const Instance& inst, double zero_fraction) {
  const int n = inst.size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  for (int x = 0; x < n; ++x) {
    double sum = 0.0;
    for (int y = 0; y < n; ++y) {
      double u = split_uniform(rng);
      bool zero = y != 0 && split_uniform(rng) < zero_fraction;
      rows[x][y] = zero ? 0.0 : 0.001 + u * u;
      sum += rows[x][y];
    }
    for (int y = 0; y < n; ++y) rows[x][y] /= sum;
  }
  return tabular_mutation(inst, rows);
}

std::vector<SelectionRule> all_rules() {
  return {replicate_best_selection(), elitist_proportional_selection(),
          elitist_truncation_selection()};
}

CriterionResult criterion1() {
  Checker c;
  auto t0 = Clock::now();
  BuiltinProblem p = paper_table12(0.0);
  TransitionSystem bench = build_one_plus_one_chain(p.instance, p.kernel);
  std::vector<double> m = hitting_vector(bench);
  int x4 = bench.find_state({4});
  c.require(std::abs(m[x4] - 2.5) < 1e-12, "m(x4) != 2.5");
  c.detail << "m(x4)=" << m[x4] << " lumped:";
  SelectionRule rule = replicate_best_selection();
  for (int mu = 2; mu <= 5; ++mu) {
    TransitionSystem lumped = build_lumped_chain(p.instance, p.kernel, rule, mu);
    std::vector<double> ml = hitting_vector(lumped);
    int idx = lumped.find_state(Members(mu, 4));
    double expected = 2.0 * std::pow(0.5, mu) + 3.0 * (1.0 - std::pow(0.5, mu));
    c.require(std::abs(ml[idx] - expected) < 1e-12, "lumped m mismatch at mu=" + std::to_string(mu));
    c.detail << " " << ml[idx];
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.require(secs < 1.0, "runtime above 1 s");
  return {1, "hitting generations on the five-state counterexample", c.ok, secs, c.detail.str()};
}

CriterionResult criterion2() {
  Checker c;
  auto t0 = Clock::now();
  BuiltinProblem p = paper_table12(0.0);
  SelectionRule rule = replicate_best_selection();
  double prev = 1.0;
  c.detail << "inf-scal:";
  for (int mu = 2; mu <= 5; ++mu) {
    ScalabilityReport rep = compute_scalability(p.instance, p.kernel, rule, mu);
    c.require(rep.inf.tag == ScalTag::value, "inf-scalability undefined");
    c.require(rep.inf.value < 1.0, "inf-scalability not below 1 at mu=" + std::to_string(mu));
    c.require(rep.inf.value < prev, "inf-scalability not decreasing at mu=" + std::to_string(mu));
    prev = rep.inf.value;
    c.detail << " " << rep.inf.value;
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return {2, "infinity-scalability below one and decreasing", c.ok, secs, c.detail.str()};
}

CriterionResult criterion3() {
  Checker c;
  auto t0 = Clock::now();
  BuiltinProblem p = paper_table34(0.0);
  TransitionSystem bench = build_one_plus_one_chain(p.instance, p.kernel);
  SpectralReport b = spectral_report(bench);
  c.require(std::abs(b.norm_a - 254.0 / 103.0) < 1e-12, "benchmark a-norm != 254/103");
  c.detail << "a-norm(1)=" << std::setprecision(17) << b.norm_a;
  SelectionRule rule = replicate_best_selection();
  for (int mu = 2; mu <= 4; ++mu) {
    ScalabilityReport rep = compute_scalability(p.instance, p.kernel, rule, mu);
    c.require(rep.a.tag == ScalTag::value && rep.a.value < 1.0,
              "a-scalability not below 1 at mu=" + std::to_string(mu));
    c.require(rep.a_hat.tag == ScalTag::value && rep.a_hat.value < 1.0,
              "a-hat-scalability not below 1 at mu=" + std::to_string(mu));
    // the lumped chain reproduces the homogeneous-state hitting values
    TransitionSystem lumped = build_lumped_chain(p.instance, p.kernel, rule, mu);
    std::vector<double> ml = hitting_vector(lumped);
    int li = lumped.find_state(Members(mu, 4));
    c.require(std::abs(ml[li] - rep.pop.norm_inf) < 1e-10, "lumped/full norm mismatch");
    c.detail << " mu" << mu << ":a=" << std::setprecision(8) << rep.a.value
             << ",ahat=" << rep.a_hat.value;
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.require(secs < 5.0, "runtime above 5 s");
  return {3, "a- and a-hat-scalability below one with multiplicities", c.ok, secs, c.detail.str()};
}

CriterionResult criterion4() {
  Checker c;
  auto t0 = Clock::now();
  std::uint64_t rng = 0x5eed0004ull;
  int done = 0;
  double worst_identity = 0.0, worst_enclosure = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    TransitionSystem ts;
    if (trial % 10 < 7) {
      int transients = 5 + static_cast<int>(split_next(rng) % 21);
      Instance inst = random_instance(rng, transients);
      MutationKernel kernel = random_kernel(rng, inst, 0.3);
      ts = build_one_plus_one_chain(inst, kernel);
    } else {
      int transients = 3 + static_cast<int>(split_next(rng) % 4);
      Instance inst = random_instance(rng, transients);
      MutationKernel kernel = random_kernel(rng, inst, 0.2);
      const auto rules = all_rules();
      ts = build_population_chain(inst, kernel, rules[trial % 3], 2);
    }
    SpectralReport rep = spectral_report(ts);
    c.require(rep.convergent, "random chain not convergent");
    if (!rep.convergent) break;

    Eigen::MatrixXd q = dense_q(ts);
    double rho_q_oracle = max_abs_eigenvalue(q);
    Eigen::MatrixXd n_mat =
        (Eigen::MatrixXd::Identity(ts.size(), ts.size()) - q).partialPivLu().solve(
            Eigen::MatrixXd::Identity(ts.size(), ts.size()));
    double rho_n_oracle = max_abs_eigenvalue(n_mat);

    double identity = std::abs(rho_n_oracle * (1.0 - rho_q_oracle) - 1.0);
    worst_identity = std::max(worst_identity, identity);
    c.require(identity < 1e-9, "rho(N)(1-rho(Q)) identity violated");

    double mmin = *std::min_element(rep.m.begin(), rep.m.end());
    double mmax = *std::max_element(rep.m.begin(), rep.m.end());
    c.require(mmin <= rho_n_oracle + 1e-9 && rho_n_oracle <= mmax + 1e-9,
              "rho(N) outside [min m, max m]");

    c.require(rep.rho_q.certified, "bracket not certified");
    double enclosure = std::max(rep.rho_q.lo - rho_q_oracle, rho_q_oracle - rep.rho_q.hi);
    worst_enclosure = std::max(worst_enclosure, enclosure);
    c.require(enclosure < 1e-8, "bracket does not enclose the dense eigensolver value");

    // Collatz-Wielandt bounds from a random positive start contain rho(N)
    std::vector<double> q0(ts.size());
    for (auto& v : q0) v = 0.05 + split_uniform(rng);
    Bracket cw = collatz_wielandt_bounds(ts, q0);
    c.require(cw.lo <= rho_n_oracle + 1e-9 && rho_n_oracle <= cw.hi + 1e-9,
              "Collatz-Wielandt bounds exclude rho(N)");
    ++done;
    if (!c.ok) break;
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.detail << " chains=" << done << " worst-identity=" << std::setprecision(3) << worst_identity
           << " worst-enclosure=" << worst_enclosure;
  c.require(secs < 30.0, "runtime above 30 s");
  return {4, "spectral identity suite on random convergent chains", c.ok, secs, c.detail.str()};
}

CriterionResult criterion5() {
  Checker c;
  auto t0 = Clock::now();
  std::uint64_t rng = 0x5eed0005ull;
  double min_scal = 1e9;
  int cases = 0;
  for (int trial = 0; trial < 100 && c.ok; ++trial) {
    int transients = 4 + static_cast<int>(split_next(rng) % 6);
    Instance inst = random_instance(rng, transients);
    MutationKernel base = random_kernel(rng, inst, 0.6);
    MutationKernel kernel = mix_with_global(inst, base, trial % 2 == 0 ? 0.01 : 0.1);
    c.require(kernel.is_global(), "mixed kernel not global");
    for (const SelectionRule& rule : all_rules()) {
      for (int mu : {2, 3}) {
        ScalabilityReport rep = compute_scalability(inst, kernel, rule, mu);
        c.require(rep.rho.tag == ScalTag::value, "rho-scalability not a value");
        if (rep.rho.tag == ScalTag::value) {
          min_scal = std::min(min_scal, rep.rho.value);
          c.require(rep.rho.value > 1.0, std::string("rho-scalability <= 1 for ") + rule.name +
                                              " mu=" + std::to_string(mu));
        }
        ++cases;
        if (!c.ok) break;
      }
      if (!c.ok) break;
    }
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.detail << " cases=" << cases << " min rho-scal=" << std::setprecision(10) << min_scal;
  c.require(secs < 120.0, "runtime above 2 min");
  return {5, "global mutation and elitism always scale above one", c.ok, secs, c.detail.str()};
}

CriterionResult criterion6() {
  Checker c;
  auto t0 = Clock::now();
  for (int n : {4, 5}) {
    BuiltinProblem p = onemax_knapsack(n);
    BridgeAnalysis bridges = bridge_analysis(p.instance, p.kernel);
    c.require(!bridges.bridgeable, "onemax n=" + std::to_string(n) + " classified bridgeable");
    for (const SelectionRule& rule : all_rules()) {
      for (int mu : {2, 3}) {
        ScalabilityReport rep = compute_scalability(p.instance, p.kernel, rule, mu);
        c.require(rep.rho.tag == ScalTag::value &&
                      rep.rho.value <= static_cast<double>(mu) + 1e-9,
                  std::string("superlinear on onemax with ") + rule.name);
        if (n == 4 && mu == 2)
          c.detail << " n4mu2:" << rule.name << "=" << std::setprecision(6) << rep.rho.value;
      }
    }
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return {6, "non-bridgeable landscape never scales superlinearly", c.ok, secs, c.detail.str()};
}

CriterionResult criterion7() {
  Checker c;
  auto t0 = Clock::now();
  SelectionRule rule = elitist_proportional_selection();
  for (int n : {4, 5}) {
    BuiltinProblem p = deceptive_knapsack(n);
    // the factor conditions hold exactly for mu <= n-1: the worst bridgeable
    // point gives an optimal-mass ratio of n-1, so mu = n falsifies it
    for (int mu = 2; mu <= n - 1; ++mu) {
      SufficiencyConditions cond = check_sufficiency_conditions(p.instance, p.kernel, mu);
      c.require(cond.all_hold(rule.preserves_fitness_diversity),
                "conditions fail at n=" + std::to_string(n) + " mu=" + std::to_string(mu));
    }
    SufficiencyConditions at_n = check_sufficiency_conditions(p.instance, p.kernel, n);
    c.require(at_n.x_rho_on_second_level && at_n.lower_states_all_bridgeable &&
                  at_n.bridge_mass_factor_ok && !at_n.opt_mass_factor_ok,
              "expected exactly the optimal-mass factor to fail at mu=n");
    c.detail << " n" << n << ":worst-opt-ratio=" << std::setprecision(6) << at_n.worst_opt_ratio;

    for (int mu : {2, 3}) {
      ScalabilityReport rep = compute_scalability(p.instance, p.kernel, rule, mu);
      c.require(rep.rho.tag == ScalTag::value && rep.rho.value > static_cast<double>(mu),
                "not superlinear at n=" + std::to_string(n) + " mu=" + std::to_string(mu));
      RoadConditionResult road = check_road_condition(p.instance, p.kernel, rule, mu, 100);
      bool road_says = road.satisfied_at > 0;
      bool ratio_says = rep.rho.tag == ScalTag::value && rep.rho.value > static_cast<double>(mu);
      c.require(road_says == ratio_says, "road condition and radius ratio disagree");
      c.detail << " n" << n << "mu" << mu << ":scal=" << std::setprecision(6) << rep.rho.value
               << ",k=" << road.satisfied_at;
    }
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.require(secs < 300.0, "runtime above 5 min");
  return {7, "deceptive knapsack scales superlinearly, dual-certified", c.ok, secs,
          c.detail.str()};
}

CriterionResult criterion8() {
  Checker c;
  auto t0 = Clock::now();
  struct Entry {
    Instance inst;
    MutationKernel kernel;
    std::string name;
  };
  std::vector<Entry> entries;
  for (double eps : {0.0, 0.01}) {
    BuiltinProblem p = paper_table12(eps);
    entries.push_back({p.instance, p.kernel, "table12-eps" + std::to_string(eps)});
  }
  {
    BuiltinProblem p = paper_table34(0.0);
    entries.push_back({p.instance, p.kernel, "table34"});
  }
  for (int n : {4, 5}) {
    BuiltinProblem p1 = onemax_knapsack(n);
    entries.push_back({p1.instance, p1.kernel, "onemax" + std::to_string(n)});
    BuiltinProblem p2 = deceptive_knapsack(n);
    entries.push_back({p2.instance, p2.kernel, "deceptive" + std::to_string(n)});
  }
  std::uint64_t rng = 0x5eed0008ull;
  for (int trial = 0; trial < 20; ++trial) {
    int transients = 4 + static_cast<int>(split_next(rng) % 5);
    Instance inst = random_instance(rng, transients);
    MutationKernel base = random_kernel(rng, inst, 0.5);
    entries.push_back({inst, mix_with_global(inst, base, 0.05), "rand" + std::to_string(trial)});
  }

  int cases = 0;
  for (const Entry& e : entries) {
    for (const SelectionRule& rule : all_rules()) {
      for (int mu : {2, 3}) {
        ScalabilityReport rep = compute_scalability(e.inst, e.kernel, rule, mu);
        if (rep.rho.tag != ScalTag::value) continue;  // non-convergent cases out of scope here
        bool superlinear = rep.rho.value > static_cast<double>(mu);
        RoadConditionResult road = check_road_condition(e.inst, e.kernel, rule, mu, 100);
        bool road_says = road.feasible && road.satisfied_at > 0;
        c.require(road_says == superlinear, "road-condition mismatch on " + e.name + " rule=" +
                                                rule.name + " mu=" + std::to_string(mu));
        BridgeNecessityResult necessary = check_bridge_necessity(e.inst, e.kernel, rule, mu, 50);
        if (necessary.no_superlinear_possible)
          c.require(!superlinear, "bridge-necessity verdict contradicts the radii on " + e.name);
        if (rule.kind == SelectionKind::replicate_best)
          c.require(necessary.no_superlinear_possible,
                    "replicate-best not flagged no-superlinear on " + e.name);
        ++cases;
        if (!c.ok) return {8, "road-condition and bridge-necessity cross-consistency", false,
                           std::chrono::duration<double>(Clock::now() - t0).count(),
                           c.detail.str()};
      }
    }
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.detail << " cases=" << cases;
  return {8, "road-condition and bridge-necessity cross-consistency", c.ok, secs, c.detail.str()};
}

CriterionResult criterion9() {
  Checker c;
  auto t0 = Clock::now();
  BuiltinProblem p = paper_table12(0.0);
  {
    SimConfig config;
    config.runs = 100000;
    config.t_cap = 1000;
    config.seed = 90001;
    config.init = InitMode::fixed;
    config.fixed = {4};
    SimEstimate est = estimate(p.instance, p.kernel, replicate_best_selection(), 1, config);
    c.require(est.usable && est.censored == 0, "mu=1 runs censored");
    c.require(std::abs(est.mean_hitting - 2.5) <= 3.0 * est.std_error,
              "mu=1 mean outside 3 standard errors of 2.5");
    c.detail << " mu1:" << std::setprecision(6) << est.mean_hitting << "±" << est.std_error;
  }
  {
    SimConfig config;
    config.runs = 100000;
    config.t_cap = 1000;
    config.seed = 90002;
    config.init = InitMode::fixed;
    config.fixed = {4, 4};
    SimEstimate est = estimate(p.instance, p.kernel, replicate_best_selection(), 2, config);
    c.require(std::abs(est.mean_hitting - 2.75) <= 3.0 * est.std_error,
              "mu=2 mean outside 3 standard errors of 2.75");
    c.detail << " mu2:" << est.mean_hitting << "±" << est.std_error;
  }
  {
    BuiltinProblem f2 = deceptive_knapsack(4);
    SelectionRule rule = elitist_proportional_selection();
    TransitionSystem ts = build_population_chain(f2.instance, f2.kernel, rule, 2);
    Bracket rho = spectral_radius(ts);
    SimConfig config;
    config.runs = 100000;
    config.t_cap = 3000;
    config.seed = 90003;
    config.init = InitMode::uniform_non_optimal;
    SimEstimate est = estimate(f2.instance, f2.kernel, rule, 2, config);
    double exact_rate = 1.0 - rho.mid();
    double got = est.empirical_rate[199];
    c.require(std::abs(got - exact_rate) < 0.02, "empirical rate at t=200 off the exact rate");
    c.detail << " rate200=" << got << " exact=" << exact_rate;
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.require(secs < 120.0, "runtime above 2 min");
  return {9, "simulator calibration against the exact pipeline", c.ok, secs, c.detail.str()};
}

}  // namespace

bool VerificationReport::all_passed() const {
  for (const auto& cr : criteria)
    if (!cr.passed) return false;
  return true;
}

VerificationReport run_verification(std::ostream& log) {
  VerificationReport report;
  report.criteria.push_back(criterion1());
  report.criteria.push_back(criterion2());
  report.criteria.push_back(criterion3());
  report.criteria.push_back(criterion4());
  report.criteria.push_back(criterion5());
  report.criteria.push_back(criterion6());
  report.criteria.push_back(criterion7());
  report.criteria.push_back(criterion8());
  report.criteria.push_back(criterion9());
  for (const auto& cr : report.criteria) {
    log << (cr.passed ? "[PASS] " : "[FAIL] ") << "criterion " << cr.id << ": " << cr.name << " ("
        << std::fixed << std::setprecision(2) << cr.seconds << " s)" << cr.detail << "\n";
    log.unsetf(std::ios::fixed);
  }
  log << (report.all_passed() ? "verification passed" : "VERIFICATION FAILED") << std::endl;
  return report;
}

}  // namespace popscale
