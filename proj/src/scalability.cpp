#include "popscale/scalability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "popscale/errors.hpp"

namespace popscale {

namespace {

double high_mass(const Instance& inst, const MutationKernel& kernel, int from, int reference) {
  // mass of one mutation of `from` into S^(1)_high(reference)
  double s = 0.0;
  for (int y = 0; y < inst.size(); ++y)
    if (inst.fitness(y) > inst.fitness(reference)) s += kernel.entry(from, y);
  return s;
}

int x_rho_of(const Instance& inst, const MutationKernel& kernel) {
  // maximal self-transition of the (1+1) elitist chain, declared-order ties
  int best = -1;
  double best_diag = -1.0;
  for (int x : inst.non_optimal()) {
    double diag = 1.0 - kernel.mass_to_high(x);
    if (diag > best_diag) {
      best = x;
      best_diag = diag;
    }
  }
  return best;
}

struct BlockView {
  const Block* block;
  std::vector<int> states;              // global indices
  std::vector<std::vector<std::pair<int, double>>> q;  // local sparse rows
  std::vector<double> exit_high;        // one-step mass into S_high(best) incl. absorption
};

std::vector<BlockView> block_views(const TransitionSystem& ts, const Instance& inst) {
  std::vector<BlockView> views;
  std::vector<int> local(ts.size(), -1);
  for (const Block& b : ts.blocks) {
    BlockView v;
    v.block = &b;
    for (int i = b.begin; i < b.end; ++i) {
      local[i] = static_cast<int>(v.states.size());
      v.states.push_back(i);
    }
    v.q.resize(v.states.size());
    v.exit_high.assign(v.states.size(), 0.0);
    double fb = b.best_fitness;
    for (int i = b.begin; i < b.end; ++i) {
      int li = local[i];
      v.exit_high[li] += ts.absorption[i];
      for (const auto& [j, p] : ts.q[i].entries) {
        if (j >= b.begin && j < b.end) {
          v.q[li].emplace_back(local[j], p);
        } else if (inst.fitness(ts.states[j].best) > fb) {
          v.exit_high[li] += p;
        }
        // exits to equal-fitness sibling blocks are neither "same" nor "high"
      }
    }
    for (int i = b.begin; i < b.end; ++i) local[i] = -1;
    views.push_back(std::move(v));
  }
  return views;
}

}  // namespace

ScalClass ScalabilityValue::classify(int mu) const {
  if (tag == ScalTag::infinite) return ScalClass::superlinear;
  if (tag == ScalTag::undefined) return ScalClass::undefined;
  if (value <= 1.0) return ScalClass::none;
  if (value <= static_cast<double>(mu)) return ScalClass::sublinear;
  return ScalClass::superlinear;
}

ScalabilityReport compute_scalability(const Instance& inst, const MutationKernel& kernel,
                                      const SelectionRule& rule, int mu,
                                      std::int64_t state_cap) {
  if (mu < 2) throw ConfigError("scalability compares against mu >= 2");
  ScalabilityReport rep;
  rep.mu = mu;
  rep.bench = spectral_report(build_one_plus_one_chain(inst, kernel));
  rep.pop = spectral_report(build_population_chain(inst, kernel, rule, mu, state_cap));

  if (rep.bench.convergent && rep.pop.convergent) {
    rep.rho = {ScalTag::value,
               (1.0 - rep.pop.rho_q.mid()) / (1.0 - rep.bench.rho_q.mid())};
    rep.inf = {ScalTag::value, rep.bench.norm_inf / rep.pop.norm_inf};
    rep.a = {ScalTag::value, rep.bench.norm_a / rep.pop.norm_a};
    double count_ratio = static_cast<double>(inst.total_non_optimal()) /
                         std::pow(static_cast<double>(inst.total_non_optimal()), mu);
    rep.a_hat = {ScalTag::value, count_ratio * rep.a.value};
  } else if (!rep.bench.convergent && rep.pop.convergent) {
    rep.rho = {ScalTag::infinite, 0.0};
  } else {
    rep.rho = {ScalTag::undefined, 0.0};
  }
  return rep;
}

BridgeAnalysis bridge_analysis(const Instance& inst, const MutationKernel& kernel) {
  BridgeAnalysis out;
  const auto& nonopt = inst.non_optimal();
  out.bridge_points.resize(nonopt.size());
  out.strict_bridge_points.resize(nonopt.size());
  for (std::size_t i = 0; i < nonopt.size(); ++i) {
    int x = nonopt[i];
    double px = kernel.mass_to_high(x);
    for (int y : nonopt) {
      if (y == x || inst.fitness(y) > inst.fitness(x)) continue;
      double py = high_mass(inst, kernel, y, x);
      if (py >= px - BridgeAnalysis::kTieTol) out.bridge_points[i].push_back(y);
      if (py > px + BridgeAnalysis::kTieTol) out.strict_bridge_points[i].push_back(y);
    }
    if (!out.strict_bridge_points[i].empty()) out.bridgeable = true;
  }
  out.x_rho = x_rho_of(inst, kernel);
  return out;
}

std::vector<double> road_probability(const TransitionSystem& ts, int k) {
  if (k < 1) throw ConfigError("road length must be >= 1");
  const int n = ts.size();
  std::vector<double> s(n, 1.0), next(n);
  for (int step = 0; step < k; ++step) {
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (const auto& [j, p] : ts.q[i].entries) v += p * s[j];
      next[i] = v;
    }
    s.swap(next);
  }
  for (int i = 0; i < n; ++i) s[i] = 1.0 - s[i];
  return s;
}

RoadConditionResult check_road_condition(const Instance& inst, const MutationKernel& kernel,
                              const SelectionRule& rule, int mu, int k_max,
                              std::int64_t state_cap) {
  RoadConditionResult out;
  TransitionSystem bench = build_one_plus_one_chain(inst, kernel);
  Bracket rho1 = spectral_radius(bench);
  double rate = static_cast<double>(mu) * (1.0 - rho1.mid());
  if (rate >= 1.0) {
    out.feasible = false;
    RoadCheck rc;
    rc.feasible = false;
    out.checks.push_back(rc);
    return out;
  }
  TransitionSystem ts = build_population_chain(inst, kernel, rule, mu, state_cap);
  const int n = ts.size();
  const double base = 1.0 - rate;
  std::vector<double> s(n, 1.0), next(n);
  double base_pow = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (const auto& [j, p] : ts.q[i].entries) v += p * s[j];
      next[i] = v;
    }
    s.swap(next);
    base_pow *= base;
    double worst_survival = n > 0 ? *std::max_element(s.begin(), s.end()) : 0.0;
    RoadCheck rc;
    rc.k = k;
    rc.lhs_min = 1.0 - worst_survival;
    rc.rhs = 1.0 - base_pow;
    rc.satisfied = worst_survival < base_pow;
    out.checks.push_back(rc);
    if (rc.satisfied && out.satisfied_at < 0) out.satisfied_at = k;
  }
  return out;
}

BlockRoadConditionResult check_blockwise_road_condition(const Instance& inst, const MutationKernel& kernel,
                              const SelectionRule& rule, int mu, int k_max,
                              std::int64_t state_cap) {
  if (!rule.elitist) throw ConfigError("the road-through-bridge form needs an elitist rule");
  BlockRoadConditionResult out;
  TransitionSystem bench = build_one_plus_one_chain(inst, kernel);
  double p_xrho = 0.0;
  for (int i = 0; i < bench.size(); ++i) {
    double d = 0.0;
    for (const auto& [j, p] : bench.q[i].entries)
      if (j == i) d = p;
    p_xrho = std::max(p_xrho, d);
  }
  double rate = static_cast<double>(mu) * (1.0 - p_xrho);
  if (rate >= 1.0) {
    out.feasible = false;
    RoadCheck rc;
    rc.feasible = false;
    out.checks.push_back(rc);
    return out;
  }
  TransitionSystem ts = build_population_chain(inst, kernel, rule, mu, state_cap);
  auto views = block_views(ts, inst);

  // cumulative within-block road probability into the block's high set
  std::vector<std::vector<double>> cum(views.size());
  std::vector<std::vector<double>> term(views.size());
  for (std::size_t b = 0; b < views.size(); ++b) {
    cum[b].assign(views[b].states.size(), 0.0);
    term[b] = views[b].exit_high;
  }
  const double base = 1.0 - rate;
  double base_pow = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    double lhs_min = 1.0;
    for (std::size_t b = 0; b < views.size(); ++b) {
      auto& c = cum[b];
      auto& t = term[b];
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += t[i];
      std::vector<double> nt(t.size(), 0.0);
      for (std::size_t i = 0; i < t.size(); ++i)
        for (const auto& [j, p] : views[b].q[i]) nt[i] += p * t[j];
      t.swap(nt);
      for (double v : c) lhs_min = std::min(lhs_min, v);
    }
    base_pow *= base;
    RoadCheck rc;
    rc.k = k;
    rc.lhs_min = lhs_min;
    rc.rhs = 1.0 - base_pow;
    rc.satisfied = lhs_min > rc.rhs;
    out.checks.push_back(rc);
    if (rc.satisfied && out.satisfied_at < 0) out.satisfied_at = k;
  }
  return out;
}

BridgeNecessityResult check_bridge_necessity(const Instance& inst, const MutationKernel& kernel,
                                        const SelectionRule& rule, int mu, int k_max,
                                        std::int64_t state_cap) {
  if (!rule.elitist) throw ConfigError("the necessary condition needs an elitist rule");
  BridgeNecessityResult out;
  BridgeAnalysis bridges = bridge_analysis(inst, kernel);
  out.x_rho = bridges.x_rho;

  const auto& nonopt = inst.non_optimal();
  std::vector<bool> is_bridge_point(inst.size(), false);
  for (std::size_t i = 0; i < nonopt.size(); ++i) {
    if (nonopt[i] == bridges.x_rho) {
      for (int y : bridges.bridge_points[i]) is_bridge_point[y] = true;
    }
  }

  TransitionSystem ts = build_population_chain(inst, kernel, rule, mu, state_cap);
  auto views = block_views(ts, inst);
  const BlockView* view = nullptr;
  for (const auto& v : views)
    if (v.block->best == bridges.x_rho) view = &v;
  if (view == nullptr) throw std::logic_error("x_rho block not found");

  const std::size_t m = view->states.size();
  std::vector<bool> contains_bridge(m, false);
  int start = -1;
  Members x_rho_pop(static_cast<std::size_t>(mu), bridges.x_rho);
  for (std::size_t i = 0; i < m; ++i) {
    const PopulationState& st = ts.states[view->states[i]];
    for (int member : st.members)
      if (is_bridge_point[member]) contains_bridge[i] = true;
    if (st.members == x_rho_pop) start = static_cast<int>(i);
  }
  if (start < 0) throw std::logic_error("homogeneous x_rho population not found");

  // exact reachability on the lifted graph decides the verdict
  {
    std::vector<int> flag(m, -1);  // -1 unseen, 0 bridge-not-visited, 1 visited
    std::vector<std::size_t> queue;
    auto push = [&](std::size_t v, int f) {
      if (flag[v] < f) {
        flag[v] = f;
        queue.push_back(v);
      }
    };
    push(start, 0);
    bool through_possible = false;
    while (!queue.empty() && !through_possible) {
      std::size_t v = queue.back();
      queue.pop_back();
      int f = flag[v];
      if (f == 1 && view->exit_high[v] > 0.0) through_possible = true;
      for (const auto& [w, p] : view->q[v]) {
        if (p <= 0.0) continue;
        push(w, std::max(f, contains_bridge[w] ? 1 : 0));
      }
    }
    out.no_superlinear_possible = !through_possible;
  }

  // through-bridge and total exit masses per road length
  std::vector<double> v0(m, 0.0), v1(m, 0.0);
  v0[start] = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    double tb = 0.0, total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      tb += v1[i] * view->exit_high[i];
      total += (v0[i] + v1[i]) * view->exit_high[i];
    }
    out.through_bridge.push_back(tb);
    out.total_exit.push_back(total);
    out.through_bridge_total += tb;
    std::vector<double> n0(m, 0.0), n1(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (v0[i] == 0.0 && v1[i] == 0.0) continue;
      for (const auto& [j, p] : view->q[i]) {
        if (contains_bridge[j]) {
          n1[j] += (v0[i] + v1[i]) * p;
        } else {
          n0[j] += v0[i] * p;
          n1[j] += v1[i] * p;
        }
      }
    }
    v0.swap(n0);
    v1.swap(n1);
  }
  return out;
}

SufficiencyConditions check_sufficiency_conditions(const Instance& inst, const MutationKernel& kernel,
                                       int mu) {
  if (mu < 2) throw ConfigError("the proposition concerns mu >= 2");
  SufficiencyConditions out;
  BridgeAnalysis bridges = bridge_analysis(inst, kernel);
  out.x_rho = bridges.x_rho;
  out.x_rho_on_second_level = inst.level_of(bridges.x_rho) == 1;

  const auto& nonopt = inst.non_optimal();
  std::vector<int> bridge_set;
  for (std::size_t i = 0; i < nonopt.size(); ++i)
    if (nonopt[i] == bridges.x_rho) bridge_set = bridges.bridge_points[i];

  out.lower_states_all_bridgeable = true;
  for (int y : nonopt) {
    if (inst.fitness(y) >= inst.fitness(bridges.x_rho)) continue;
    if (std::find(bridge_set.begin(), bridge_set.end(), y) == bridge_set.end())
      out.lower_states_all_bridgeable = false;
  }

  double p_opt = kernel.mass_to_optimal(bridges.x_rho);
  double worst = std::numeric_limits<double>::infinity();
  for (int y : bridge_set) worst = std::min(worst, kernel.mass_to_optimal(y));
  out.worst_opt_ratio = bridge_set.empty() || p_opt <= 0.0
                            ? 0.0
                            : worst / p_opt;
  out.opt_mass_factor_ok =
      !bridge_set.empty() && worst >= static_cast<double>(mu) * p_opt;

  double bridge_mass = 0.0;
  for (int y : bridge_set) bridge_mass += kernel.entry(bridges.x_rho, y);
  out.bridge_ratio = p_opt > 0.0 ? bridge_mass / p_opt : 0.0;
  out.bridge_mass_factor_ok = bridge_mass >= static_cast<double>(mu) * p_opt;
  return out;
}

std::string to_string(ScalClass c) {
  switch (c) {
    case ScalClass::none: return "none";
    case ScalClass::sublinear: return "sublinear";
    case ScalClass::superlinear: return "superlinear";
    case ScalClass::undefined: return "undefined";
  }
  return "?";
}

std::string to_string(const ScalabilityValue& v) {
  switch (v.tag) {
    case ScalTag::infinite: return "infinite";
    case ScalTag::undefined: return "undefined";
    case ScalTag::value: return std::to_string(v.value);
  }
  return "?";
}

}  // namespace popscale
