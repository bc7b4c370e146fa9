#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "popscale/model.hpp"
#include "popscale/operators.hpp"

namespace popscale {

enum class InitMode { fixed, uniform_non_optimal, uniform_all };

struct SimConfig {
  std::int64_t runs = 10000;
  std::int64_t t_cap = 1000000;
  std::uint64_t seed = 0;
  InitMode init = InitMode::uniform_non_optimal;
  Members fixed;  // used when init == fixed
};

struct SimEstimate {
  std::int64_t runs = 0;
  std::int64_t censored = 0;
  bool usable = false;           // false when every run was censored
  double mean_hitting = 0.0;     // over uncensored runs
  double std_error = 0.0;        // NaN when fewer than 2 uncensored runs
  std::vector<double> survival;        // empirical P(Phi_t non-optimal), t = 0..horizon
  std::vector<double> empirical_rate;  // 1 - (survival_t / survival_0)^(1/t), t = 1..horizon
};

// One complete run of the EA; returns the first generation whose population
// holds an optimal individual, or nothing when t_cap is exceeded.
std::optional<std::int64_t> run_once(const Instance& inst, const MutationKernel& kernel,
                                     const SelectionRule& rule, int mu, const SimConfig& config,
                                     std::int64_t run_index);

SimEstimate estimate(const Instance& inst, const MutationKernel& kernel,
                     const SelectionRule& rule, int mu, const SimConfig& config);

// Exact-distribution successor sampling, used to cross-check the procedural
// samplers on small cases.
Members sample_successor_exact(const SelectionRule& rule, const Instance& inst,
                               const Members& parents, const Members& children,
                               std::uint64_t& rng_state);

Members sample_successor(const SelectionRule& rule, const Instance& inst, const Members& parents,
                         const Members& children, std::uint64_t& rng_state);

// splitmix64 step, the shared counter-based stream primitive
std::uint64_t split_next(std::uint64_t& state);
double split_uniform(std::uint64_t& state);  // in [0,1)

}  // namespace popscale
