#pragma once

#include <span>
#include <vector>

#include "popscale/model.hpp"

namespace popscale {

// Mutation over declared states. entry(x,y) is the probability that a child of
// an x-state lands in the y-class, i.e. the per-state probability times the
// class multiplicity; rows sum to 1 within 1e-12.
class MutationKernel {
public:
  static constexpr double kRowSumTol = 1e-12;
  static constexpr double kInputRowSumTol = 1e-9;

  MutationKernel(const Instance& inst, std::vector<double> class_rows);

  int size() const { return n_; }
  double entry(int x, int y) const { return rows_[static_cast<std::size_t>(x) * n_ + y]; }
  bool is_global() const { return is_global_; }

  double mass(int x, std::span<const int> targets) const;
  double mass_to_optimal(int x) const { return to_optimal_[x]; }
  double mass_to_high(int x) const { return to_high_[x]; }  // into S^(1)_high(x)

private:
  int n_ = 0;
  std::vector<double> rows_;        // row-major class kernel
  std::vector<double> to_optimal_;  // per state
  std::vector<double> to_high_;
  bool is_global_ = false;
};

// rows are per-actual-state probabilities (a multiplicity-k column counts k times
// toward the row sum).
MutationKernel tabular_mutation(const Instance& inst,
                                const std::vector<std::vector<double>>& rows);

// Flip each bit independently with probability flip_prob; infeasible offspring
// are rejected and the parent keeps its place, which folds into the diagonal.
MutationKernel bitwise_rejection_mutation(const Instance& inst, double flip_prob);

// (1-eps) * base + eps * uniform over all represented states; always global.
MutationKernel mix_with_global(const Instance& inst, const MutationKernel& base, double epsilon);

enum class SelectionKind { replicate_best, elitist_proportional, elitist_truncation };

struct SelectionRule {
  SelectionKind kind;
  bool elitist;
  bool exchangeable;
  bool best_determined;
  bool preserves_fitness_diversity;
  const char* name;
};

SelectionRule replicate_best_selection();
SelectionRule elitist_proportional_selection();
SelectionRule elitist_truncation_selection();
const SelectionRule* selection_by_name(const std::string& name);  // nullptr when unknown

// Populations as sorted multisets of declared state indices.
using Members = std::vector<int>;

// The fittest member; equal-fitness ties go to the smallest declared index.
int crown_of(const Instance& inst, const Members& members);

struct SuccessorMass {
  Members members;  // sorted
  double prob;
};

// Exact successor distribution of a rule given parents X and children Y
// (both sorted multisets of equal size). Probabilities sum to 1 within 1e-12.
std::vector<SuccessorMass> successor_distribution(const SelectionRule& rule, const Instance& inst,
                                                  const Members& parents, const Members& children);

}  // namespace popscale
