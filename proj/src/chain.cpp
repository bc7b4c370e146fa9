#include "popscale/chain.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "popscale/errors.hpp"

namespace popscale {

namespace {

constexpr double kBalanceTol = 1e-12;

struct StateKey {
  double crown_fitness;
  int crown;
  const Members* members;
};

bool key_less(double fa, int ca, const Members& ma, double fb, int cb, const Members& mb) {
  if (fa != fb) return fa > fb;  // higher fitness first
  if (ca != cb) return ca < cb;  // declared order within a level
  return ma < mb;
}

void sort_states(const Instance& inst, std::vector<PopulationState>& states) {
  std::sort(states.begin(), states.end(), [&](const PopulationState& a, const PopulationState& b) {
    return key_less(inst.fitness(a.best), a.best, a.members, inst.fitness(b.best), b.best,
                    b.members);
  });
}

std::vector<Block> make_blocks(const Instance& inst, const std::vector<PopulationState>& states) {
  std::vector<Block> blocks;
  for (int i = 0; i < static_cast<int>(states.size()); ++i) {
    if (blocks.empty() || blocks.back().best != states[i].best) {
      blocks.push_back({i, i + 1, states[i].best, inst.fitness(states[i].best)});
    } else {
      blocks.back().end = i + 1;
    }
  }
  return blocks;
}

double tuple_count(const Instance& inst, const Members& members) {
  // multinomial coefficient over repeated entries times class multiplicities
  double count = 1.0;
  int total = 0;
  int run = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    ++total;
    count *= total;
    run = (i > 0 && members[i] == members[i - 1]) ? run + 1 : 1;
    count /= run;
    count *= static_cast<double>(inst.multiplicity(members[i]));
  }
  return count;
}

}  // namespace

std::uint64_t transient_multiset_count(int non_optimal_states, int mu) {
  // C(n + mu - 1, mu), saturating at uint64 max
  std::uint64_t result = 1;
  for (int i = 1; i <= mu; ++i) {
    std::uint64_t factor = static_cast<std::uint64_t>(non_optimal_states) + mu - i;
    if (factor != 0 && result > std::numeric_limits<std::uint64_t>::max() / factor)
      return std::numeric_limits<std::uint64_t>::max();
    result = result * factor / i;
  }
  return result;
}

int TransitionSystem::block_of(int state) const {
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
    if (state >= blocks[b].begin && state < blocks[b].end) return b;
  return -1;
}

int TransitionSystem::find_state(const Members& members) const {
  for (int i = 0; i < size(); ++i)
    if (states[i].members == members) return i;
  return -1;
}

double TransitionSystem::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

TransitionSystem build_one_plus_one_chain(const Instance& inst, const MutationKernel& kernel) {
  if (kernel.size() != inst.size()) throw ConfigError("kernel does not match the instance");
  TransitionSystem ts;
  ts.mu = 1;
  for (int x : inst.non_optimal()) ts.states.push_back({{x}, x});
  sort_states(inst, ts.states);
  const int n = ts.size();
  std::vector<int> pos(inst.size(), -1);
  for (int i = 0; i < n; ++i) pos[ts.states[i].best] = i;

  ts.q.resize(n);
  ts.absorption.resize(n);
  ts.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    int x = ts.states[i].best;
    ts.weights[i] = static_cast<double>(inst.multiplicity(x));
    double high = 0.0;
    std::vector<std::pair<int, double>> entries;
    for (int y = 0; y < inst.size(); ++y) {
      if (inst.fitness(y) <= inst.fitness(x)) continue;
      double p = kernel.entry(x, y);
      high += p;
      if (p > 0.0 && !inst.is_optimal(y)) entries.emplace_back(pos[y], p);
    }
    double stay = 1.0 - high;
    if (stay > 0.0) entries.emplace_back(i, stay);
    std::sort(entries.begin(), entries.end());
    double row_sum = 0.0;
    for (auto& [c, p] : entries) row_sum += p;
    ts.q[i].entries = std::move(entries);
    ts.absorption[i] = 1.0 - row_sum;
    assert(ts.absorption[i] > -kBalanceTol);
  }
  ts.blocks = make_blocks(inst, ts.states);
  ts.triangular = true;
  ts.block_triangular = true;
  return ts;
}

TransitionSystem build_population_chain(const Instance& inst, const MutationKernel& kernel,
                                        const SelectionRule& rule, int mu,
                                        std::int64_t state_cap) {
  if (kernel.size() != inst.size()) throw ConfigError("kernel does not match the instance");
  if (mu < 1) throw ConfigError("population size must be >= 1");
  if (!rule.exchangeable)
    throw ConfigError("population chains need an exchangeable selection rule");

  const auto& nonopt = inst.non_optimal();
  std::uint64_t needed = transient_multiset_count(static_cast<int>(nonopt.size()), mu);
  if (needed > static_cast<std::uint64_t>(state_cap))
    throw CapExceeded("transient state count above the cap", needed,
                      static_cast<std::uint64_t>(state_cap));

  TransitionSystem ts;
  ts.mu = mu;
  {  // all multisets of size mu over the non-optimal states
    Members current;
    auto rec = [&](auto&& self, std::size_t from) -> void {
      if (static_cast<int>(current.size()) == mu) {
        ts.states.push_back({current, crown_of(inst, current)});
        return;
      }
      for (std::size_t i = from; i < nonopt.size(); ++i) {
        current.push_back(nonopt[i]);
        self(self, i);
        current.pop_back();
      }
    };
    rec(rec, 0);
  }
  sort_states(inst, ts.states);
  const int n = ts.size();
  ts.blocks = make_blocks(inst, ts.states);
  std::vector<int> block_index(n);
  for (int b = 0; b < static_cast<int>(ts.blocks.size()); ++b)
    for (int i = ts.blocks[b].begin; i < ts.blocks[b].end; ++i) block_index[i] = b;

  auto locate = [&](const Members& m, int crown) -> int {
    double f = inst.fitness(crown);
    int lo = 0, hi = n;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      const auto& s = ts.states[mid];
      if (key_less(inst.fitness(s.best), s.best, s.members, f, crown, m))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo >= n || ts.states[lo].members != m)
      throw std::logic_error("selection produced a population outside the transient set");
    return lo;
  };

  ts.q.resize(n);
  ts.absorption.resize(n);
  ts.weights.resize(n);
  ts.triangular = (mu == 1);
  ts.block_triangular = true;

  std::vector<double> acc(n, 0.0);
  std::vector<int> touched;
  for (int i = 0; i < n; ++i) {
    const PopulationState& X = ts.states[i];
    ts.weights[i] = tuple_count(inst, X.members);

    // distribution of the child multiset, restricted to non-optimal children;
    // the missing mass is exactly the absorption for an elitist rule
    std::map<Members, double> dist;
    dist[{}] = 1.0;
    for (int member : X.members) {
      std::map<Members, double> next;
      for (int y : nonopt) {
        double ky = kernel.entry(member, y);
        if (ky <= 0.0) continue;
        for (const auto& [ms, p] : dist) {
          Members t = ms;
          t.insert(std::lower_bound(t.begin(), t.end(), y), y);
          next[std::move(t)] += p * ky;
        }
      }
      dist = std::move(next);
    }

    double surviving = 0.0;
    for (const auto& [children, p_children] : dist) {
      surviving += p_children;
      for (const auto& succ : successor_distribution(rule, inst, X.members, children)) {
        int j = locate(succ.members, crown_of(inst, succ.members));
        if (acc[j] == 0.0) touched.push_back(j);
        acc[j] += p_children * succ.prob;
      }
    }
    ts.absorption[i] = 1.0 - surviving;

    std::sort(touched.begin(), touched.end());
    double row_sum = 0.0;
    ts.q[i].entries.reserve(touched.size());
    for (int j : touched) {
      ts.q[i].entries.emplace_back(j, acc[j]);
      row_sum += acc[j];
      if (block_index[j] > block_index[i]) ts.block_triangular = false;
      if (j != i && mu == 1) ts.triangular = ts.triangular && j < i;
      acc[j] = 0.0;
    }
    touched.clear();
    assert(std::abs(row_sum + ts.absorption[i] - 1.0) < 1e-9);
  }
  return ts;
}

TransitionSystem build_lumped_chain(const Instance& inst, const MutationKernel& kernel,
                                    const SelectionRule& rule, int mu) {
  if (kernel.size() != inst.size()) throw ConfigError("kernel does not match the instance");
  if (mu < 1) throw ConfigError("population size must be >= 1");
  if (!rule.best_determined)
    throw ConfigError("lumping needs a best-determined selection rule");

  TransitionSystem ts;
  ts.mu = mu;
  for (int x : inst.non_optimal()) ts.states.push_back({Members(mu, x), x});
  sort_states(inst, ts.states);
  const int n = ts.size();
  std::vector<int> pos(inst.size(), -1);
  for (int i = 0; i < n; ++i) pos[ts.states[i].best] = i;

  ts.q.resize(n);
  ts.absorption.resize(n);
  ts.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    int x = ts.states[i].best;
    ts.weights[i] = std::pow(static_cast<double>(inst.multiplicity(x)), mu);

    double low = 0.0;  // children that cannot displace x
    for (int y = 0; y < inst.size(); ++y)
      if (inst.fitness(y) <= inst.fitness(x)) low += kernel.entry(x, y);

    std::vector<std::pair<int, double>> entries;
    double stay = std::pow(low, mu);
    if (stay > 0.0) entries.emplace_back(i, stay);
    for (int z : inst.non_optimal()) {
      if (inst.fitness(z) <= inst.fitness(x)) continue;
      // the crown of the child tuple is z: every child below z (or losing the
      // declared-order tie to z) and at least one child equal to z
      double below = 0.0;
      for (int y = 0; y < inst.size(); ++y)
        if (inst.fitness(y) < inst.fitness(z) ||
            (inst.fitness(y) == inst.fitness(z) && y > z))
          below += kernel.entry(x, y);
      double p = std::pow(below + kernel.entry(x, z), mu) - std::pow(below, mu);
      if (p > 0.0) entries.emplace_back(pos[z], p);
    }
    std::sort(entries.begin(), entries.end());
    double row_sum = 0.0;
    for (auto& [c, p] : entries) row_sum += p;
    ts.q[i].entries = std::move(entries);
    ts.absorption[i] = 1.0 - row_sum;
  }
  ts.blocks = make_blocks(inst, ts.states);
  ts.triangular = true;
  ts.block_triangular = true;
  return ts;
}

ElitistCheck verify_elitist_property(const TransitionSystem& ts, const Instance& inst) {
  ElitistCheck check;
  check.residuals.resize(ts.size());
  for (int i = 0; i < ts.size(); ++i) {
    int x = ts.states[i].best;
    double fx = inst.fitness(x);
    double same = 0.0, high = ts.absorption[i];
    for (const auto& [j, p] : ts.q[i].entries) {
      const PopulationState& Z = ts.states[j];
      double fz = inst.fitness(Z.best);
      if (fz > fx) {
        high += p;
      } else if (fz == fx &&
                 std::binary_search(Z.members.begin(), Z.members.end(), x)) {
        same += p;
      }
    }
    check.residuals[i] = std::abs(1.0 - same - high);
  }
  check.max_residual = 0.0;
  for (double r : check.residuals) check.max_residual = std::max(check.max_residual, r);
  check.holds = check.max_residual < kBalanceTol;
  return check;
}

MutationPropertyCheck verify_mutation_property(const MutationKernel& kernel, const Instance& inst,
                                               const Members& population) {
  if (population.empty()) throw ConfigError("empty population");
  MutationPropertyCheck check;
  int x = crown_of(inst, population);
  double fx = inst.fitness(x);
  double stay_all = 1.0;
  double sum = 0.0;
  for (int member : population) {
    double m = 0.0;
    for (int y = 0; y < inst.size(); ++y)
      if (inst.fitness(y) > fx) m += kernel.entry(member, y);
    check.member_masses.push_back(m);
    stay_all *= 1.0 - m;
    sum += m;
  }
  check.population_mass = 1.0 - stay_all;
  check.lower_ok = true;
  for (double m : check.member_masses)
    check.lower_ok = check.lower_ok && check.population_mass >= m - kBalanceTol;
  check.upper_ok = check.population_mass <= sum + kBalanceTol;
  check.strict = true;
  for (double m : check.member_masses)
    check.strict = check.strict && check.population_mass > m;
  check.strict = check.strict && check.population_mass < sum;
  return check;
}

}  // namespace popscale
