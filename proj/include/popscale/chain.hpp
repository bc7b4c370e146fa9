#pragma once

#include <cstdint>
#include <vector>

#include "popscale/model.hpp"
#include "popscale/operators.hpp"

namespace popscale {

struct PopulationState {
  Members members;  // sorted multiset of declared state indices
  int best;         // crown: fittest member, declared order breaking ties
};

struct SparseRow {
  std::vector<std::pair<int, double>> entries;  // (column, probability), column-sorted
};

struct Block {
  int begin = 0;  // state range [begin, end)
  int end = 0;
  int best = 0;            // shared crown
  double best_fitness = 0;
};

// An absorbing chain restricted to the transient (non-optimal) populations.
// States are ordered with the fitness of the crown descending and, within a
// fitness level, the crown's declared index ascending; blocks are the runs
// sharing a crown. For the built-in elitist rules the matrix is block lower
// triangular in this order.
struct TransitionSystem {
  std::vector<PopulationState> states;
  std::vector<SparseRow> q;
  std::vector<double> absorption;   // r(X) = 1 - sum of the row
  std::vector<Block> blocks;
  std::vector<double> weights;      // tuple counts induced by multiplicities
  int mu = 1;
  bool triangular = false;          // strictly triangular (1+1 and lumped chains)
  bool block_triangular = false;    // verified during assembly

  int size() const { return static_cast<int>(states.size()); }
  int block_of(int state) const;                    // index into blocks
  int find_state(const Members& members) const;     // -1 when absent
  double total_weight() const;
};

inline constexpr std::int64_t kDefaultStateCap = 200000;

TransitionSystem build_one_plus_one_chain(const Instance& inst, const MutationKernel& kernel);

TransitionSystem build_population_chain(const Instance& inst, const MutationKernel& kernel,
                                        const SelectionRule& rule, int mu,
                                        std::int64_t state_cap = kDefaultStateCap);

// Exact aggregation for best-determined rules: one state per non-optimal
// individual x standing for the homogeneous population (x,...,x).
TransitionSystem build_lumped_chain(const Instance& inst, const MutationKernel& kernel,
                                    const SelectionRule& rule, int mu);

struct ElitistCheck {
  std::vector<double> residuals;  // per transient state
  double max_residual = 0.0;
  bool holds = false;             // max residual < 1e-12
};

// Elitist selection property: from any X with best individual x, the next
// population either still carries x at the same best fitness or its best
// entered a strictly higher level; the two masses add to one.
ElitistCheck verify_elitist_property(const TransitionSystem& ts, const Instance& inst);

struct MutationPropertyCheck {
  double population_mass = 0.0;          // P_M(X, S^(mu)_high(x))
  std::vector<double> member_masses;     // P_M(x_i, S^(1)_high(x))
  bool lower_ok = false;                 // population mass >= each member mass
  bool upper_ok = false;                 // population mass <= sum of member masses
  bool strict = false;                   // strict versions (expected for global kernels)
};

MutationPropertyCheck verify_mutation_property(const MutationKernel& kernel, const Instance& inst,
                                               const Members& population);

// Number of transient multisets C(|non-opt| + mu - 1, mu), saturating.
std::uint64_t transient_multiset_count(int non_optimal_states, int mu);

}  // namespace popscale
