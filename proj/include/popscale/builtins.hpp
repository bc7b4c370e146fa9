#pragma once

#include <string>
#include <vector>

#include "popscale/model.hpp"
#include "popscale/operators.hpp"

namespace popscale {

struct BuiltinProblem {
  std::string name;
  Instance instance;
  MutationKernel kernel;
};

// The five-state chain with the slow bottom state (mutation rows parametrized
// by a small epsilon; epsilon = 0 keeps the chain convergent but not global).
BuiltinProblem paper_table12(double epsilon = 0.0);

// The same chain with the bottom state standing for 100 identical states.
BuiltinProblem paper_table34(double epsilon = 0.0);

// Average-capacity knapsack with unit values and weights (OneMax-like).
BuiltinProblem onemax_knapsack(int n = 4, double flip_prob = -1.0);  // default 1/n

// Average-capacity knapsack with one heavy, valuable item (deceptive).
BuiltinProblem deceptive_knapsack(int n = 4, double flip_prob = -1.0);

const std::vector<std::string>& builtin_names();

struct BuiltinParams {
  double epsilon = 0.0;
  int n = 4;
  double flip_prob = -1.0;
};

BuiltinProblem make_builtin(const std::string& name, const BuiltinParams& params);

}  // namespace popscale
