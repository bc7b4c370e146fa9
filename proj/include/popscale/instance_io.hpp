#pragma once

#include <string>

#include "popscale/builtins.hpp"
#include "popscale/model.hpp"
#include "popscale/operators.hpp"

namespace popscale {

// A problem resolved from an instance file (or builtin shorthand): the
// instance, its mutation kernel, and an echo of where it came from.
struct LoadedProblem {
  Instance instance;
  MutationKernel kernel;
  std::string source;  // "tabular", "knapsack" or the builtin name
  std::string echo;    // serialized resolved configuration (JSON text)
};

// Parses the schema_version-1 instance file format:
//   { "schema_version": 1, "kind": "tabular" | "knapsack" | "builtin",
//     "tabular":  { "states": [..], "fitness": [..], "multiplicity": [..]?, "mutation": [[..]] },
//     "knapsack": { "n": int, "values": [..], "weights": [..], "capacity": real,
//                   "flip_prob": real? },
//     "builtin":  { "name": str, "epsilon": real?, "n": int?, "flip_prob": real? } }
// Exactly one of the three sections may be present and must match "kind".
LoadedProblem parse_instance_json(const std::string& text);

LoadedProblem load_instance_file(const std::string& path);

// Resolves either a file path or a bare builtin name with optional overrides.
LoadedProblem resolve_problem(const std::string& path_or_builtin, const BuiltinParams& overrides);

// Round-trip helper: the canonical JSON text of a loaded problem.
std::string instance_to_json(const LoadedProblem& problem);

}  // namespace popscale
