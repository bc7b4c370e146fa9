#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "popscale/builtins.hpp"
#include "popscale/chain.hpp"
#include "popscale/errors.hpp"
#include "popscale/sim.hpp"
#include "popscale/spectral.hpp"

using namespace popscale;

namespace {

double row_total(const TransitionSystem& ts, int i) {
  double s = ts.absorption[i];
  for (const auto& [j, p] : ts.q[i].entries) s += p;
  return s;
}

double entry(const TransitionSystem& ts, int i, int j) {
  for (const auto& [c, p] : ts.q[i].entries)
    if (c == j) return p;
  return 0.0;
}

Instance random_instance(std::uint64_t& rng, int transients) {
  std::vector<std::string> labels{"top"};
  std::vector<double> fitness{100.0};
  for (int i = 0; i < transients; ++i) {
    labels.push_back("s" + std::to_string(i));
    fitness.push_back(static_cast<double>(split_next(rng) % 90));
  }
  return Instance::tabular(labels, fitness);
}

MutationKernel random_kernel(std::uint64_t& rng, const Instance& inst) {
  const int n = inst.size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  for (int x = 0; x < n; ++x) {
    double sum = 0.0;
    for (int y = 0; y < n; ++y) {
      rows[x][y] = 0.01 + split_uniform(rng);
      sum += rows[x][y];
    }
    for (int y = 0; y < n; ++y) rows[x][y] /= sum;
  }
  return tabular_mutation(inst, rows);
}

}  // namespace

TEST_CASE("the (1+1) chain on tables 1-2") {
  BuiltinProblem p = paper_table12(0.0);
  TransitionSystem ts = build_one_plus_one_chain(p.instance, p.kernel);
  REQUIRE(ts.size() == 4);
  CHECK(ts.triangular);
  // stored fitness-descending: x1, x2, x3, x4
  CHECK(ts.states[0].best == 1);
  CHECK(ts.states[3].best == 4);
  SUBCASE("zero diagonal and the solved hitting vector") {
    for (int i = 0; i < 4; ++i) CHECK(entry(ts, i, i) == 0.0);
    std::vector<double> m = hitting_vector(ts);
    CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m[3] == doctest::Approx(2.5).epsilon(1e-14));
  }
  SUBCASE("epsilon 0.01 diagonal comes from the row sums") {
    BuiltinProblem q = paper_table12(0.01);
    TransitionSystem ts2 = build_one_plus_one_chain(q.instance, q.kernel);
    int x4 = ts2.find_state({4});
    CHECK(entry(ts2, x4, x4) == doctest::Approx(0.01).epsilon(1e-10));
    for (int i = 0; i < ts2.size(); ++i)
      CHECK(row_total(ts2, i) == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("identity kernel gives the identity chain") {
    Instance inst = Instance::tabular({"a", "b", "c"}, {2, 1, 0});
    MutationKernel k = tabular_mutation(inst, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    TransitionSystem id = build_one_plus_one_chain(inst, k);
    for (int i = 0; i < id.size(); ++i) CHECK(entry(id, i, i) == 1.0);
  }
}

TEST_CASE("population chain on tables 1-2 with replicate-best") {
  BuiltinProblem p = paper_table12(0.0);
  SelectionRule rule = replicate_best_selection();
  TransitionSystem ts = build_population_chain(p.instance, p.kernel, rule, 2);
  int from = ts.find_state({4, 4});
  REQUIRE(from >= 0);
  CHECK(entry(ts, from, ts.find_state({3, 3})) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(entry(ts, from, ts.find_state({2, 2})) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(ts.block_triangular);
}

TEST_CASE("mu=1 population chain reproduces the benchmark chain") {
  BuiltinProblem p = deceptive_knapsack(4);
  TransitionSystem bench = build_one_plus_one_chain(p.instance, p.kernel);
  for (const SelectionRule& rule : {replicate_best_selection(), elitist_proportional_selection(),
                                    elitist_truncation_selection()}) {
    TransitionSystem pop = build_population_chain(p.instance, p.kernel, rule, 1);
    REQUIRE(pop.size() == bench.size());
    for (int i = 0; i < bench.size(); ++i) {
      CHECK(pop.states[i].members == bench.states[i].members);
      REQUIRE(pop.q[i].entries.size() == bench.q[i].entries.size());
      for (std::size_t e = 0; e < bench.q[i].entries.size(); ++e) {
        CHECK(pop.q[i].entries[e].first == bench.q[i].entries[e].first);
        CHECK(pop.q[i].entries[e].second ==
              doctest::Approx(bench.q[i].entries[e].second).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("rows plus absorption balance to one") {
  BuiltinProblem p = deceptive_knapsack(4);
  for (const SelectionRule& rule : {replicate_best_selection(), elitist_proportional_selection(),
                                    elitist_truncation_selection()}) {
    TransitionSystem ts = build_population_chain(p.instance, p.kernel, rule, 2);
    for (int i = 0; i < ts.size(); ++i)
      CHECK(row_total(ts, i) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ts.block_triangular);
  }
}

TEST_CASE("state cap is enforced with the required count") {
  BuiltinProblem p = onemax_knapsack(4);
  try {
    build_population_chain(p.instance, p.kernel, replicate_best_selection(), 3, 10);
    FAIL("expected CapExceeded");
  } catch (const CapExceeded& e) {
    CHECK(e.required == transient_multiset_count(5, 3));
    CHECK(e.cap == 10);
  }
}

TEST_CASE("lumped chain matches the closed forms and the full chain") {
  BuiltinProblem p = paper_table12(0.0);
  SelectionRule rule = replicate_best_selection();
  SUBCASE("mu=2 and mu=4 closed forms") {
    for (int mu : {2, 4}) {
      TransitionSystem lumped = build_lumped_chain(p.instance, p.kernel, rule, mu);
      std::vector<double> m = hitting_vector(lumped);
      int x4 = lumped.find_state(Members(mu, 4));
      double expect = 2 * std::pow(0.5, mu) + 3 * (1 - std::pow(0.5, mu));
      CHECK(m[x4] == doctest::Approx(expect).epsilon(1e-14));
    }
  }
  SUBCASE("mu=1 lumped chain equals the benchmark chain") {
    TransitionSystem lumped = build_lumped_chain(p.instance, p.kernel, rule, 1);
    TransitionSystem bench = build_one_plus_one_chain(p.instance, p.kernel);
    std::vector<double> ml = hitting_vector(lumped), mb = hitting_vector(bench);
    for (int i = 0; i < bench.size(); ++i) CHECK(ml[i] == doctest::Approx(mb[i]).epsilon(1e-14));
  }
  SUBCASE("lumped hitting values agree with the full chain on homogeneous states") {
    for (auto prob : {paper_table12(0.01), deceptive_knapsack(4)}) {
      TransitionSystem lumped = build_lumped_chain(prob.instance, prob.kernel, rule, 2);
      TransitionSystem full = build_population_chain(prob.instance, prob.kernel, rule, 2);
      std::vector<double> ml = hitting_vector(lumped), mf = hitting_vector(full);
      for (int x : prob.instance.non_optimal()) {
        int li = lumped.find_state(Members(2, x));
        int fi = full.find_state(Members(2, x));
        CHECK(ml[li] == doctest::Approx(mf[fi]).epsilon(1e-10));
      }
    }
  }
  SUBCASE("lumping needs a best-determined rule") {
    CHECK_THROWS_AS(build_lumped_chain(p.instance, p.kernel,
                                       elitist_proportional_selection(), 2),
                    ConfigError);
  }
}

TEST_CASE("block lower triangularity for the elitist rules") {
  std::uint64_t rng = 99;
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = random_instance(rng, 5);
    MutationKernel kernel = random_kernel(rng, inst);
    for (const SelectionRule& rule : {replicate_best_selection(),
                                      elitist_proportional_selection(),
                                      elitist_truncation_selection()}) {
      TransitionSystem ts = build_population_chain(inst, kernel, rule, 2);
      CHECK(ts.block_triangular);
      // explicit check: no mass into later blocks
      for (int i = 0; i < ts.size(); ++i)
        for (const auto& [j, p] : ts.q[i].entries)
          CHECK(ts.block_of(j) <= ts.block_of(i));
    }
  }
}

TEST_CASE("elitist property holds exactly, corrupted rows are flagged") {
  BuiltinProblem p = deceptive_knapsack(4);
  SUBCASE("replicate-best and proportional chains") {
    for (const SelectionRule& rule :
         {replicate_best_selection(), elitist_proportional_selection()}) {
      TransitionSystem ts = build_population_chain(p.instance, p.kernel, rule, 2);
      ElitistCheck check = verify_elitist_property(ts, p.instance);
      CHECK(check.holds);
      CHECK(check.max_residual < 1e-12);
    }
  }
  SUBCASE("negative control") {
    TransitionSystem ts =
        build_population_chain(p.instance, p.kernel, replicate_best_selection(), 2);
    // move mass from the first row's entries into absorption of a lower state
    REQUIRE(!ts.q[ts.size() - 1].entries.empty());
    auto& last_row = ts.q[ts.size() - 1];
    last_row.entries[0].second *= 0.5;
    ElitistCheck check = verify_elitist_property(ts, p.instance);
    CHECK_FALSE(check.holds);
    CHECK(check.max_residual >= 1e-12);
  }
}

TEST_CASE("mutation property bounds") {
  SUBCASE("closed form on a homogeneous pair") {
    Instance inst = Instance::tabular({"top", "x"}, {1, 0});
    MutationKernel k = tabular_mutation(inst, {{1, 0}, {0.3, 0.7}});
    MutationPropertyCheck c = verify_mutation_property(k, inst, {1, 1});
    CHECK(c.population_mass == doctest::Approx(0.51).epsilon(1e-14));
    CHECK(c.lower_ok);
    CHECK(c.upper_ok);
    CHECK(c.strict);
  }
  SUBCASE("strictness on the global table kernel") {
    BuiltinProblem p = paper_table12(0.01);
    MutationPropertyCheck c = verify_mutation_property(p.kernel, p.instance, {4, 4});
    CHECK(c.lower_ok);
    CHECK(c.upper_ok);
    CHECK(c.strict);
  }
  SUBCASE("mu = 1 reaches equality") {
    BuiltinProblem p = paper_table12(0.01);
    MutationPropertyCheck c = verify_mutation_property(p.kernel, p.instance, {4});
    CHECK(c.population_mass == doctest::Approx(c.member_masses[0]).epsilon(1e-14));
    CHECK(c.lower_ok);
    CHECK(c.upper_ok);
    CHECK_FALSE(c.strict);
  }
}

TEST_CASE("tuple weights recover the Cartesian-product counts") {
  BuiltinProblem p = paper_table34(0.0);
  TransitionSystem ts = build_population_chain(p.instance, p.kernel,
                                               replicate_best_selection(), 2);
  CHECK(ts.total_weight() == doctest::Approx(103.0 * 103.0).epsilon(1e-12));
  // the homogeneous bottom class stands for 100^2 ordered tuples
  int i = ts.find_state({4, 4});
  CHECK(ts.weights[i] == doctest::Approx(10000.0).epsilon(1e-12));
  // a mixed class counts both orderings
  int j = ts.find_state({3, 4});
  CHECK(ts.weights[j] == doctest::Approx(200.0).epsilon(1e-12));
}

TEST_CASE("multiplicity expansion equals explicit duplication") {
  // the table-3 instance at reduced multiplicity vs. spelled-out duplicates
  Instance compact = Instance::tabular({"x0", "x1", "x2", "x3", "x4"}, {5, 4, 3, 2, 1},
                                       {1, 1, 1, 1, 3});
  std::vector<std::vector<double>> rows{
      {0.9, 0.02, 0.02, 0.02, 0.04 / 3},
      {0.9, 0.02, 0.02, 0.02, 0.04 / 3},
      {0.02, 0.9, 0.02, 0.02, 0.04 / 3},
      {0.9, 0.02, 0.02, 0.02, 0.04 / 3},
      {0.02, 0.02, 0.45, 0.45, 0.06 / 3},
  };
  MutationKernel kc = tabular_mutation(compact, rows);
  // expanded: three explicit copies of the bottom state
  Instance expanded = Instance::tabular({"x0", "x1", "x2", "x3", "y1", "y2", "y3"},
                                        {5, 4, 3, 2, 1, 1, 1});
  std::vector<std::vector<double>> rex;
  for (int x = 0; x < 5; ++x) {
    std::vector<double> r{rows[x][0], rows[x][1], rows[x][2], rows[x][3],
                          rows[x][4], rows[x][4], rows[x][4]};
    rex.push_back(r);
  }
  rex.push_back(rex[4]);
  rex.push_back(rex[4]);
  MutationKernel ke = tabular_mutation(expanded, rex);

  TransitionSystem tc = build_one_plus_one_chain(compact, kc);
  TransitionSystem te = build_one_plus_one_chain(expanded, ke);
  std::vector<double> mc = hitting_vector(tc), me = hitting_vector(te);
  // the compact bottom state and every expanded copy agree
  CHECK(mc[tc.find_state({4})] == doctest::Approx(me[te.find_state({4})]).epsilon(1e-12));
  CHECK(me[te.find_state({4})] == doctest::Approx(me[te.find_state({6})]).epsilon(1e-12));
  // a-norms agree because the weights line up
  SpectralReport rc = spectral_report(tc), re = spectral_report(te);
  CHECK(rc.norm_a == doctest::Approx(re.norm_a).epsilon(1e-12));
}
