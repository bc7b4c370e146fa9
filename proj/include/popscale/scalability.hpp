#pragma once

#include <optional>
#include <string>
#include <vector>

#include "popscale/chain.hpp"
#include "popscale/spectral.hpp"

namespace popscale {

enum class ScalTag { value, infinite, undefined };
enum class ScalClass { none, sublinear, superlinear, undefined };

struct ScalabilityValue {
  ScalTag tag = ScalTag::undefined;
  double value = 0.0;  // meaningful when tag == value
  ScalClass classify(int mu) const;
};

struct ScalabilityReport {
  int mu = 2;
  ScalabilityValue rho;    // (1 - rho(Q^mu)) / (1 - rho(Q^1))
  ScalabilityValue inf;    // ||N^1||_inf / ||N^mu||_inf
  ScalabilityValue a;      // ||N^1||_a / ||N^mu||_a
  ScalabilityValue a_hat;  // a, renormalized by transient tuple counts
  SpectralReport bench;    // the (1+1) side
  SpectralReport pop;      // the (mu+mu) side
};

ScalabilityReport compute_scalability(const Instance& inst, const MutationKernel& kernel,
                                      const SelectionRule& rule, int mu,
                                      std::int64_t state_cap = kDefaultStateCap);

struct BridgeAnalysis {
  // bridge_points[i]: the bridgeable points of non_optimal()[i] under the
  // displayed inequality P_M(x, high(x)) <= P_M(y, high(x)), y distinct
  std::vector<std::vector<int>> bridge_points;
  // strict_bridge_points uses the strict inequality; the landscape is
  // non-bridgeable exactly when all of these are empty
  std::vector<std::vector<int>> strict_bridge_points;
  bool bridgeable = false;
  int x_rho = -1;  // declared index of the maximal self-transition state
  static constexpr double kTieTol = 1e-12;
};

BridgeAnalysis bridge_analysis(const Instance& inst, const MutationKernel& kernel);

// Per-state probability of reaching the optimal set along roads of length at
// most k: 1 - (Q^k 1)_X.
std::vector<double> road_probability(const TransitionSystem& ts, int k);

struct RoadCheck {
  int k = 0;
  double lhs_min = 0.0;  // worst-state road probability
  double rhs = 0.0;      // 1 - (1 - mu (1 - rho(Q^1)))^k
  bool satisfied = false;
  bool feasible = true;  // false when mu (1 - rho(Q^1)) >= 1
};

struct RoadConditionResult {
  bool feasible = true;
  int satisfied_at = -1;  // smallest certifying k, -1 when none up to k_max
  std::vector<RoadCheck> checks;
};

// The if-and-only-if road condition for superlinear scaling, on the full chain.
RoadConditionResult check_road_condition(const Instance& inst, const MutationKernel& kernel,
                              const SelectionRule& rule, int mu, int k_max,
                              std::int64_t state_cap = kDefaultStateCap);

struct BlockRoadConditionResult {
  bool feasible = true;
  int satisfied_at = -1;
  std::vector<RoadCheck> checks;  // lhs_min is worst over every block and state
};

// Block-restricted variant: within each same-best block, roads to the
// populations whose best is strictly fitter.
BlockRoadConditionResult check_blockwise_road_condition(const Instance& inst, const MutationKernel& kernel,
                              const SelectionRule& rule, int mu, int k_max,
                              std::int64_t state_cap = kDefaultStateCap);

struct BridgeNecessityResult {
  bool no_superlinear_possible = false;  // through-bridge roads have probability 0
  int x_rho = -1;
  std::vector<double> through_bridge;  // mass exiting through a bridge at length k = 1..k_max
  std::vector<double> total_exit;      // all exits to the high set at length k
  double through_bridge_total = 0.0;
};

// Necessary condition: lifts the x_rho block by a bridge-visited flag and
// measures the road-through-bridge mass from (x_rho, ..., x_rho).
BridgeNecessityResult check_bridge_necessity(const Instance& inst, const MutationKernel& kernel,
                                        const SelectionRule& rule, int mu, int k_max,
                                        std::int64_t state_cap = kDefaultStateCap);

struct SufficiencyConditions {
  int x_rho = -1;
  bool x_rho_on_second_level = false;
  bool lower_states_all_bridgeable = false;       // condition on the bridge set
  bool opt_mass_factor_ok = false;                // P_M(y, opt) >= mu P_M(x_rho, opt) for all y
  bool bridge_mass_factor_ok = false;             // P_M(x_rho, bridge) >= mu P_M(x_rho, opt)
  double worst_opt_ratio = 0.0;                   // min_y P_M(y, opt) / P_M(x_rho, opt)
  double bridge_ratio = 0.0;                      // P_M(x_rho, bridge) / P_M(x_rho, opt)
  bool all_hold(bool diversity_flag) const {
    return x_rho_on_second_level && lower_states_all_bridgeable && opt_mass_factor_ok &&
           bridge_mass_factor_ok && diversity_flag;
  }
};

SufficiencyConditions check_sufficiency_conditions(const Instance& inst, const MutationKernel& kernel, int mu);

std::string to_string(ScalClass c);
std::string to_string(const ScalabilityValue& v);

}  // namespace popscale
