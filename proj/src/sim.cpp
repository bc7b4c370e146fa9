#include "popscale/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "popscale/errors.hpp"

namespace popscale {

std::uint64_t split_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double split_uniform(std::uint64_t& state) {
  return static_cast<double>(split_next(state) >> 11) * 0x1.0p-53;
}

namespace {

std::uint64_t stream_for_run(std::uint64_t seed, std::int64_t run_index) {
  // counter-based: the stream depends only on (seed, run), not on scheduling
  std::uint64_t s = seed;
  std::uint64_t a = split_next(s);
  s = seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(run_index + 1));
  return a ^ split_next(s);
}

int sample_index(const std::vector<double>& cumulative, double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  int idx = static_cast<int>(it - cumulative.begin());
  return std::min(idx, static_cast<int>(cumulative.size()) - 1);
}

struct KernelSampler {
  std::vector<std::vector<double>> cdf;  // per source state
  explicit KernelSampler(const MutationKernel& kernel) {
    const int n = kernel.size();
    cdf.resize(n);
    for (int x = 0; x < n; ++x) {
      cdf[x].resize(n);
      double acc = 0.0;
      for (int y = 0; y < n; ++y) {
        acc += kernel.entry(x, y);
        cdf[x][y] = acc;
      }
    }
  }
  int draw(int x, std::uint64_t& rng) const { return sample_index(cdf[x], split_uniform(rng)); }
};

int uniform_state(const Instance& inst, bool non_optimal_only, std::uint64_t& rng) {
  // multiplicity-weighted: uniform over represented states
  std::int64_t total = non_optimal_only ? inst.total_non_optimal() : inst.total_states();
  double u = split_uniform(rng) * static_cast<double>(total);
  double acc = 0.0;
  int last = 0;
  for (int s = 0; s < inst.size(); ++s) {
    if (non_optimal_only && inst.is_optimal(s)) continue;
    acc += static_cast<double>(inst.multiplicity(s));
    last = s;
    if (u < acc) return s;
  }
  return last;
}

Members initial_population(const Instance& inst, const SimConfig& config, int mu,
                           std::uint64_t& rng) {
  Members pop;
  switch (config.init) {
    case InitMode::fixed:
      if (static_cast<int>(config.fixed.size()) != mu)
        throw ConfigError("fixed initial population size differs from mu");
      pop = config.fixed;
      std::sort(pop.begin(), pop.end());
      return pop;
    case InitMode::uniform_non_optimal:
      for (int i = 0; i < mu; ++i) pop.push_back(uniform_state(inst, true, rng));
      break;
    case InitMode::uniform_all:
      for (int i = 0; i < mu; ++i) pop.push_back(uniform_state(inst, false, rng));
      break;
  }
  std::sort(pop.begin(), pop.end());
  return pop;
}

bool contains_optimal(const Instance& inst, const Members& pop) {
  for (int s : pop)
    if (inst.is_optimal(s)) return true;
  return false;
}

Members sample_proportional(const SelectionRule&, const Instance& inst, const Members& parents,
                            const Members& children, std::uint64_t& rng) {
  int cx = crown_of(inst, parents);
  int cy = crown_of(inst, children);
  bool child_wins = inst.fitness(cy) > inst.fitness(cx);
  int winner = child_wins ? cy : cx;
  Members pool;
  pool.reserve(parents.size() + children.size() - 1);
  bool removed = false;
  for (const Members* side : {&parents, &children}) {
    bool winner_side = child_wins ? side == &children : side == &parents;
    for (int s : *side) {
      if (!removed && winner_side && s == winner) {
        removed = true;
        continue;
      }
      pool.push_back(s);
    }
  }
  double total = 0.0;
  for (int s : pool) {
    if (inst.fitness(s) < 0.0)
      throw ConfigError("proportional selection over a negative fitness pool");
    total += inst.fitness(s);
  }
  std::vector<double> cdf(pool.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    acc += total > 0.0 ? inst.fitness(pool[i]) / total : 1.0 / static_cast<double>(pool.size());
    cdf[i] = acc;
  }
  Members z{winner};
  for (std::size_t slot = 1; slot < parents.size(); ++slot)
    z.push_back(pool[sample_index(cdf, split_uniform(rng))]);
  std::sort(z.begin(), z.end());
  return z;
}

}  // namespace

Members sample_successor(const SelectionRule& rule, const Instance& inst, const Members& parents,
                         const Members& children, std::uint64_t& rng_state) {
  switch (rule.kind) {
    case SelectionKind::replicate_best:
    case SelectionKind::elitist_truncation:
      // deterministic rules share the exact successor code
      return successor_distribution(rule, inst, parents, children).front().members;
    case SelectionKind::elitist_proportional:
      return sample_proportional(rule, inst, parents, children, rng_state);
  }
  throw ConfigError("unknown selection rule");
}

Members sample_successor_exact(const SelectionRule& rule, const Instance& inst,
                               const Members& parents, const Members& children,
                               std::uint64_t& rng_state) {
  auto dist = successor_distribution(rule, inst, parents, children);
  double u = split_uniform(rng_state);
  double acc = 0.0;
  for (const auto& succ : dist) {
    acc += succ.prob;
    if (u < acc) return succ.members;
  }
  return dist.back().members;
}

std::optional<std::int64_t> run_once(const Instance& inst, const MutationKernel& kernel,
                                     const SelectionRule& rule, int mu, const SimConfig& config,
                                     std::int64_t run_index) {
  if (mu < 1) throw ConfigError("population size must be >= 1");
  KernelSampler sampler(kernel);
  std::uint64_t rng = stream_for_run(config.seed, run_index);
  Members pop = initial_population(inst, config, mu, rng);
  if (contains_optimal(inst, pop)) return 0;
  Members children(pop.size());
  for (std::int64_t t = 1; t <= config.t_cap; ++t) {
    for (std::size_t i = 0; i < pop.size(); ++i) children[i] = sampler.draw(pop[i], rng);
    std::sort(children.begin(), children.end());
    pop = sample_successor(rule, inst, pop, children, rng);
    if (contains_optimal(inst, pop)) return t;
  }
  return std::nullopt;
}

SimEstimate estimate(const Instance& inst, const MutationKernel& kernel, const SelectionRule& rule,
                     int mu, const SimConfig& config) {
  if (config.runs < 1) throw ConfigError("need at least one run");
  if (config.t_cap < 1) throw ConfigError("generation cap must be >= 1");

  const std::int64_t horizon = std::min<std::int64_t>(config.t_cap, 1024);
  SimEstimate est;
  est.runs = config.runs;
  std::vector<std::int64_t> over_t(horizon + 1, 0);  // runs with hitting time > t
  double sum = 0.0, sumsq = 0.0;
  std::int64_t n_hit = 0;

  KernelSampler sampler(kernel);
  for (std::int64_t run = 0; run < config.runs; ++run) {
    std::uint64_t rng = stream_for_run(config.seed, run);
    Members pop = initial_population(inst, config, mu, rng);
    std::int64_t hit = -1;
    if (contains_optimal(inst, pop)) {
      hit = 0;
    } else {
      Members children(pop.size());
      for (std::int64_t t = 1; t <= config.t_cap; ++t) {
        for (std::size_t i = 0; i < pop.size(); ++i) children[i] = sampler.draw(pop[i], rng);
        std::sort(children.begin(), children.end());
        pop = sample_successor(rule, inst, pop, children, rng);
        if (contains_optimal(inst, pop)) {
          hit = t;
          break;
        }
      }
    }
    if (hit < 0) {
      ++est.censored;
      for (std::int64_t t = 0; t <= horizon; ++t) ++over_t[t];
    } else {
      ++n_hit;
      sum += static_cast<double>(hit);
      sumsq += static_cast<double>(hit) * static_cast<double>(hit);
      for (std::int64_t t = 0; t <= std::min(horizon, hit - 1); ++t) ++over_t[t];
    }
  }

  est.usable = n_hit > 0;
  if (est.usable) {
    est.mean_hitting = sum / static_cast<double>(n_hit);
    if (n_hit > 1) {
      double var = (sumsq - sum * sum / static_cast<double>(n_hit)) /
                   static_cast<double>(n_hit - 1);
      est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(n_hit));
    } else {
      est.std_error = std::numeric_limits<double>::quiet_NaN();
    }
  }
  est.survival.resize(horizon + 1);
  for (std::int64_t t = 0; t <= horizon; ++t)
    est.survival[t] = static_cast<double>(over_t[t]) / static_cast<double>(config.runs);
  double s0 = est.survival[0];
  for (std::int64_t t = 1; t <= horizon; ++t) {
    double st = est.survival[t];
    double rate;
    if (s0 <= 0.0) {
      rate = 1.0;
    } else if (st <= 0.0) {
      rate = 1.0;
    } else {
      rate = 1.0 - std::pow(st / s0, 1.0 / static_cast<double>(t));
    }
    est.empirical_rate.push_back(rate);
  }
  return est;
}

}  // namespace popscale
