// Test-only oracle: the chain over ordered population tuples, built from
// first principles. For exchangeable rules its hitting times must coincide
// with the canonical multiset chain's.
#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <vector>

#include "popscale/builtins.hpp"
#include "popscale/chain.hpp"
#include "popscale/spectral.hpp"

using namespace popscale;

namespace {

using Tuple = std::vector<int>;

// ordered-successor law whose multiset projection is the library rule:
// slot 1 holds the winner, the remaining slots are the i.i.d. roulette draws
// (elitist proportional); children are child-of-slot-i ordered draws
std::map<Tuple, double> proportional_tuple_step(const Instance& inst, const MutationKernel& k,
                                                const Tuple& parents) {
  const int mu = static_cast<int>(parents.size());
  std::map<Tuple, double> out;  // absorbed mass keyed by the empty tuple
  std::vector<Tuple> child_tuples{{}};
  std::vector<double> child_probs{1.0};
  for (int slot = 0; slot < mu; ++slot) {
    std::vector<Tuple> next;
    std::vector<double> probs;
    for (std::size_t c = 0; c < child_tuples.size(); ++c) {
      for (int y = 0; y < inst.size(); ++y) {
        double p = k.entry(parents[slot], y);
        if (p <= 0.0) continue;
        Tuple t = child_tuples[c];
        t.push_back(y);
        next.push_back(std::move(t));
        probs.push_back(child_probs[c] * p);
      }
    }
    child_tuples = std::move(next);
    child_probs = std::move(probs);
  }

  for (std::size_t c = 0; c < child_tuples.size(); ++c) {
    const Tuple& children = child_tuples[c];
    double pc = child_probs[c];
    bool child_optimal = false;
    for (int y : children) child_optimal = child_optimal || inst.is_optimal(y);
    if (child_optimal) {
      out[{}] += pc;  // elitist selection keeps the optimum: absorbed
      continue;
    }
    Members cp = children;
    std::sort(cp.begin(), cp.end());
    Members pp = parents;
    std::sort(pp.begin(), pp.end());
    int incumbent = crown_of(inst, pp);
    int best_child = crown_of(inst, cp);
    int winner = inst.fitness(best_child) > inst.fitness(incumbent) ? best_child : incumbent;
    // pool = all 2 mu individuals minus one winner copy
    Members pool = pp;
    pool.insert(pool.end(), cp.begin(), cp.end());
    pool.erase(std::find(pool.begin(), pool.end(), winner));
    double total = 0.0;
    for (int s : pool) total += inst.fitness(s);
    // ordered draws for slots 2..mu
    std::vector<Tuple> zs{{winner}};
    std::vector<double> zp{pc};
    for (int slot = 1; slot < mu; ++slot) {
      std::vector<Tuple> next;
      std::vector<double> probs;
      for (std::size_t z = 0; z < zs.size(); ++z) {
        for (int s : pool) {
          double p = total > 0.0 ? inst.fitness(s) / total : 1.0 / pool.size();
          if (p <= 0.0) continue;
          Tuple t = zs[z];
          t.push_back(s);
          next.push_back(std::move(t));
          probs.push_back(zp[z] * p);
        }
      }
      zs = std::move(next);
      zp = std::move(probs);
    }
    for (std::size_t z = 0; z < zs.size(); ++z) out[zs[z]] += zp[z];
  }
  return out;
}

}  // namespace

TEST_CASE("ordered-tuple oracle agrees with the multiset chain") {
  Instance inst = Instance::tabular({"top", "a", "b", "c"}, {5, 3, 2, 1});
  MutationKernel kernel = tabular_mutation(inst, {{1.0, 0.0, 0.0, 0.0},
                                                  {0.35, 0.4, 0.15, 0.1},
                                                  {0.2, 0.3, 0.3, 0.2},
                                                  {0.1, 0.25, 0.3, 0.35}});
  const int mu = 2;

  // tuple chain over ordered pairs of non-optimal states
  std::vector<Tuple> tuples;
  for (int x : inst.non_optimal())
    for (int y : inst.non_optimal()) tuples.push_back({x, y});
  std::map<Tuple, int> index;
  for (std::size_t i = 0; i < tuples.size(); ++i) index[tuples[i]] = static_cast<int>(i);

  const int n = static_cast<int>(tuples.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    auto step = proportional_tuple_step(inst, kernel, tuples[i]);
    for (const auto& [z, p] : step) {
      if (z.empty()) continue;  // absorbed
      q(i, index.at(z)) += p;
    }
  }
  Eigen::VectorXd m_tuple =
      (Eigen::MatrixXd::Identity(n, n) - q).partialPivLu().solve(Eigen::VectorXd::Ones(n));

  TransitionSystem ts =
      build_population_chain(inst, kernel, elitist_proportional_selection(), mu);
  std::vector<double> m_multiset = hitting_vector(ts);

  for (int i = 0; i < n; ++i) {
    Members ms = tuples[i];
    std::sort(ms.begin(), ms.end());
    int j = ts.find_state(ms);
    REQUIRE(j >= 0);
    CHECK(m_tuple(i) == doctest::Approx(m_multiset[j]).epsilon(1e-11));
  }

  // the two orderings of a mixed pair are genuinely the same state
  CHECK(m_tuple(index.at({1, 2})) == doctest::Approx(m_tuple(index.at({2, 1}))).epsilon(1e-12));
}
