#include "popscale/builtins.hpp"

#include "popscale/errors.hpp"

namespace popscale {

namespace {

std::vector<std::vector<double>> table_rows(double e, double tail) {
  // per-state probabilities; the last column stands for every bottom state
  return {
      {1 - 4 * e, e, e, e, tail},
      {1 - 4 * e, e, e, e, tail},
      {e, 1 - 4 * e, e, e, tail},
      {1 - 4 * e, e, e, e, tail},
      {e, e, 0.5, 0.5 - 3 * e, tail},
  };
}

}  // namespace

BuiltinProblem paper_table12(double epsilon) {
  if (epsilon < 0.0 || epsilon > 0.1)
    throw ConfigError("table epsilon must lie in [0, 0.1]");
  Instance inst = Instance::tabular({"x0", "x1", "x2", "x3", "x4"}, {5, 4, 3, 2, 1});
  MutationKernel kernel = tabular_mutation(inst, table_rows(epsilon, epsilon));
  return {"paper-table12", std::move(inst), std::move(kernel)};
}

BuiltinProblem paper_table34(double epsilon) {
  if (epsilon < 0.0 || epsilon > 0.1)
    throw ConfigError("table epsilon must lie in [0, 0.1]");
  Instance inst =
      Instance::tabular({"x0", "x1", "x2", "x3", "x4"}, {5, 4, 3, 2, 1}, {1, 1, 1, 1, 100});
  MutationKernel kernel = tabular_mutation(inst, table_rows(epsilon, 0.01 * epsilon));
  return {"paper-table34", std::move(inst), std::move(kernel)};
}

BuiltinProblem onemax_knapsack(int n, double flip_prob) {
  if (flip_prob <= 0.0) flip_prob = 1.0 / n;
  Instance inst = Instance::knapsack(n, std::vector<double>(n, 1.0), std::vector<double>(n, 1.0),
                                     0.5 * n);
  MutationKernel kernel = bitwise_rejection_mutation(inst, flip_prob);
  return {"onemax-knapsack", std::move(inst), std::move(kernel)};
}

BuiltinProblem deceptive_knapsack(int n, double flip_prob) {
  if (flip_prob <= 0.0) flip_prob = 1.0 / n;
  std::vector<double> values(n, 1.0), weights(n, 1.0);
  values[0] = static_cast<double>(n);
  weights[0] = static_cast<double>(n - 1);
  Instance inst = Instance::knapsack(n, values, weights, static_cast<double>(n - 1));
  MutationKernel kernel = bitwise_rejection_mutation(inst, flip_prob);
  return {"deceptive-knapsack", std::move(inst), std::move(kernel)};
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"paper-table12", "paper-table34",
                                                 "onemax-knapsack", "deceptive-knapsack"};
  return names;
}

BuiltinProblem make_builtin(const std::string& name, const BuiltinParams& params) {
  if (name == "paper-table12") return paper_table12(params.epsilon);
  if (name == "paper-table34") return paper_table34(params.epsilon);
  if (name == "onemax-knapsack") return onemax_knapsack(params.n, params.flip_prob);
  if (name == "deceptive-knapsack") return deceptive_knapsack(params.n, params.flip_prob);
  throw ConfigError("unknown builtin instance: " + name);
}

}  // namespace popscale
