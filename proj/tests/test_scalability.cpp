#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "popscale/builtins.hpp"
#include "popscale/errors.hpp"
#include "popscale/scalability.hpp"
#include "popscale/sim.hpp"

using namespace popscale;

namespace {

std::vector<int> bridge_points_of(const BridgeAnalysis& b, const Instance& inst, int x) {
  const auto& nonopt = inst.non_optimal();
  for (std::size_t i = 0; i < nonopt.size(); ++i)
    if (nonopt[i] == x) return b.bridge_points[i];
  return {};
}

}  // namespace

TEST_CASE("rho-scalability values and tags") {
  SUBCASE("table 1-2 at epsilon 0 gives exactly one") {
    BuiltinProblem p = paper_table12(0.0);
    ScalabilityReport rep =
        compute_scalability(p.instance, p.kernel, replicate_best_selection(), 2);
    REQUIRE(rep.rho.tag == ScalTag::value);
    CHECK(rep.rho.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.rho.classify(2) == ScalClass::none);
  }
  SUBCASE("identity kernel is undefined") {
    Instance inst = Instance::tabular({"a", "b"}, {1, 0});
    MutationKernel k = tabular_mutation(inst, {{1, 0}, {0, 1}});
    ScalabilityReport rep = compute_scalability(inst, k, replicate_best_selection(), 2);
    CHECK(rep.rho.tag == ScalTag::undefined);
    CHECK(rep.rho.classify(2) == ScalClass::undefined);
  }
  SUBCASE("global mutation with elitism scales above one") {
    BuiltinProblem p = paper_table12(0.01);
    ScalabilityReport rep =
        compute_scalability(p.instance, p.kernel, replicate_best_selection(), 2);
    REQUIRE(rep.rho.tag == ScalTag::value);
    CHECK(rep.rho.value > 1.0);
    CHECK(rep.rho.value == doctest::Approx((1 - 0.0016) / (1 - 0.04)).epsilon(1e-9));
  }
}

TEST_CASE("infinity-scalability of the counterexample") {
  BuiltinProblem p = paper_table12(0.0);
  ScalabilityReport rep = compute_scalability(p.instance, p.kernel, replicate_best_selection(), 2);
  REQUIRE(rep.inf.tag == ScalTag::value);
  CHECK(rep.inf.value == doctest::Approx(2.5 / 2.75).epsilon(1e-12));
  CHECK(rep.inf.value < 1.0);
}

TEST_CASE("a- and a-hat-scalability with multiplicities") {
  BuiltinProblem p = paper_table34(0.0);
  ScalabilityReport rep = compute_scalability(p.instance, p.kernel, replicate_best_selection(), 2);
  CHECK(rep.bench.norm_a == doctest::Approx(254.0 / 103.0).epsilon(1e-13));
  REQUIRE(rep.a.tag == ScalTag::value);
  CHECK(rep.a.value < 1.0);
  CHECK(rep.a_hat.value == doctest::Approx(rep.a.value * 103.0 / (103.0 * 103.0)).epsilon(1e-12));
}

TEST_CASE("bridge analysis classifies the two knapsack landscapes") {
  SUBCASE("onemax is non-bridgeable, ties notwithstanding") {
    BuiltinProblem p = onemax_knapsack(4);
    BridgeAnalysis b = bridge_analysis(p.instance, p.kernel);
    CHECK_FALSE(b.bridgeable);
    // equal-fitness twins are tie bridge points under the weak inequality
    int one = p.instance.state_by_label("1000");
    CHECK_FALSE(bridge_points_of(b, p.instance, one).empty());
  }
  SUBCASE("deceptive is bridgeable with every lower state bridging 0111") {
    BuiltinProblem p = deceptive_knapsack(4);
    BridgeAnalysis b = bridge_analysis(p.instance, p.kernel);
    CHECK(b.bridgeable);
    int x = p.instance.state_by_label("0111");
    CHECK(b.x_rho == x);
    auto pts = bridge_points_of(b, p.instance, x);
    CHECK(pts.size() == 7);  // every feasible non-optimal state except 0111 itself
  }
  SUBCASE("identical rows make every ordered pair a tie bridge point") {
    Instance inst = Instance::tabular({"top", "a", "b"}, {2, 1, 0});
    MutationKernel k = tabular_mutation(inst, {{1, 0, 0}, {0.3, 0.3, 0.4}, {0.3, 0.3, 0.4}});
    BridgeAnalysis b = bridge_analysis(inst, k);
    CHECK_FALSE(b.bridgeable);  // ties only, no strict inequality
    CHECK(bridge_points_of(b, inst, 1) == std::vector<int>{2});
    // the higher-fitness state is never a bridge point of the lower one
    CHECK(bridge_points_of(b, inst, 2).empty());
  }
}

TEST_CASE("road probabilities on the five-state chain") {
  BuiltinProblem p = paper_table12(0.0);
  TransitionSystem ts = build_one_plus_one_chain(p.instance, p.kernel);
  int x4 = ts.find_state({4});
  SUBCASE("k = 1 equals the absorption vector") {
    std::vector<double> r1 = road_probability(ts, 1);
    for (int i = 0; i < ts.size(); ++i) CHECK(r1[i] == doctest::Approx(ts.absorption[i]));
  }
  SUBCASE("from the bottom state: half absorbed within 2, surely within 3") {
    CHECK(road_probability(ts, 2)[x4] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(road_probability(ts, 3)[x4] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("road condition for superlinear scaling") {
  SUBCASE("deceptive knapsack certifies superlinearity at small k") {
    BuiltinProblem p = deceptive_knapsack(4);
    RoadConditionResult r =
        check_road_condition(p.instance, p.kernel, elitist_proportional_selection(), 2, 100);
    CHECK(r.feasible);
    CHECK(r.satisfied_at == 2);
    ScalabilityReport rep =
        compute_scalability(p.instance, p.kernel, elitist_proportional_selection(), 2);
    CHECK(rep.rho.value > 2.0);
  }
  SUBCASE("onemax never certifies, consistent with its scalability") {
    BuiltinProblem p = onemax_knapsack(4);
    RoadConditionResult r =
        check_road_condition(p.instance, p.kernel, elitist_proportional_selection(), 2, 100);
    CHECK(r.feasible);
    CHECK(r.satisfied_at == -1);
  }
  SUBCASE("degenerate threshold is reported infeasible") {
    BuiltinProblem p = paper_table12(0.0);  // rho(Q1) = 0, so mu(1-rho) >= 1
    RoadConditionResult r = check_road_condition(p.instance, p.kernel, replicate_best_selection(), 2, 10);
    CHECK_FALSE(r.feasible);
    CHECK(r.satisfied_at == -1);
  }
}

TEST_CASE("blockwise road condition matches the full-chain one on the case study") {
  BuiltinProblem p = deceptive_knapsack(4);
  SelectionRule rule = elitist_proportional_selection();
  RoadConditionResult r2 = check_road_condition(p.instance, p.kernel, rule, 2, 40);
  BlockRoadConditionResult r3 = check_blockwise_road_condition(p.instance, p.kernel, rule, 2, 40);
  CHECK(r3.satisfied_at == r2.satisfied_at);
  // an isolated worst block cannot exceed the threshold at k=1 here
  CHECK_FALSE(r3.checks[0].satisfied);
}

TEST_CASE("bridge-necessity condition") {
  SUBCASE("replicate-best destroys diversity on every instance") {
    for (auto p : {paper_table12(0.01), deceptive_knapsack(4), onemax_knapsack(4)}) {
      BridgeNecessityResult r =
          check_bridge_necessity(p.instance, p.kernel, replicate_best_selection(), 2, 30);
      CHECK(r.no_superlinear_possible);
      CHECK(r.through_bridge_total == 0.0);
    }
  }
  SUBCASE("proportional selection keeps bridge mass alive on the deceptive instance") {
    BuiltinProblem p = deceptive_knapsack(4);
    BridgeNecessityResult r =
        check_bridge_necessity(p.instance, p.kernel, elitist_proportional_selection(), 2, 30);
    CHECK_FALSE(r.no_superlinear_possible);
    CHECK(r.through_bridge_total > 0.0);
    // exits never exceed the total
    for (std::size_t k = 0; k < r.through_bridge.size(); ++k)
      CHECK(r.through_bridge[k] <= r.total_exit[k] + 1e-15);
  }
  SUBCASE("no bridge points at all implies the verdict") {
    Instance inst = Instance::tabular({"top", "a", "b"}, {2, 1, 0});
    // b has strictly less upward mass than a: no bridge points anywhere
    MutationKernel k = tabular_mutation(inst, {{1, 0, 0}, {0.6, 0.2, 0.2}, {0.3, 0.3, 0.4}});
    BridgeNecessityResult r =
        check_bridge_necessity(inst, k, elitist_proportional_selection(), 2, 20);
    CHECK(r.no_superlinear_possible);
  }
}

TEST_CASE("proposition 2 conditions on the deceptive knapsack") {
  BuiltinProblem p = deceptive_knapsack(4);
  SUBCASE("they hold up to mu = n-1 and condition 30 fails at mu = n") {
    for (int mu = 2; mu <= 3; ++mu) {
      SufficiencyConditions c = check_sufficiency_conditions(p.instance, p.kernel, mu);
      CHECK(c.x_rho_on_second_level);
      CHECK(c.lower_states_all_bridgeable);
      CHECK(c.opt_mass_factor_ok);
      CHECK(c.bridge_mass_factor_ok);
    }
    SufficiencyConditions at_n = check_sufficiency_conditions(p.instance, p.kernel, 4);
    CHECK_FALSE(at_n.opt_mass_factor_ok);
    CHECK(at_n.worst_opt_ratio == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(at_n.bridge_mass_factor_ok);
  }
  SUBCASE("huge mu fails the factor condition") {
    SufficiencyConditions c = check_sufficiency_conditions(p.instance, p.kernel, 1000000);
    CHECK_FALSE(c.opt_mass_factor_ok);
  }
  SUBCASE("onemax lacks the bridge structure") {
    BuiltinProblem q = onemax_knapsack(4);
    SufficiencyConditions c = check_sufficiency_conditions(q.instance, q.kernel, 2);
    CHECK_FALSE(c.lower_states_all_bridgeable);
  }
}

TEST_CASE("a-hat relation to a-scalability is exact") {
  BuiltinProblem p = deceptive_knapsack(4);
  for (int mu : {2, 3}) {
    ScalabilityReport rep =
        compute_scalability(p.instance, p.kernel, elitist_truncation_selection(), mu);
    REQUIRE(rep.a.tag == ScalTag::value);
    double states_1 = static_cast<double>(p.instance.total_non_optimal());
    double ratio = states_1 / std::pow(states_1, mu);
    CHECK(rep.a_hat.value == doctest::Approx(rep.a.value * ratio).epsilon(1e-12));
  }
}

TEST_CASE("classification boundaries") {
  ScalabilityValue v{ScalTag::value, 1.0};
  CHECK(v.classify(2) == ScalClass::none);
  v.value = 1.5;
  CHECK(v.classify(2) == ScalClass::sublinear);
  v.value = 2.0;
  CHECK(v.classify(2) == ScalClass::sublinear);
  v.value = 2.0000001;
  CHECK(v.classify(2) == ScalClass::superlinear);
  CHECK(ScalabilityValue{ScalTag::infinite, 0.0}.classify(2) == ScalClass::superlinear);
}
