#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace popscale {

// Bitstring metadata for instances enumerated from {0,1}^n.
struct BitEncoding {
  int n = 0;
  std::string feasibility;            // human-readable predicate description
  std::vector<std::uint32_t> bits;    // per-state bitmask, bit i-1 holds s_i
};

// A finite optimization instance: declared states with fitness values and
// multiplicities. A state with multiplicity k stands for k identical states
// (identical fitness and identical mutation behaviour); every counting
// quantity downstream (tuple counts, a-norms) is multiplicity-weighted.
// Declaration order is the canonical order used for all tie-breaking.
class Instance {
public:
  static Instance tabular(std::vector<std::string> labels, std::vector<double> fitness,
                          std::vector<std::int64_t> multiplicity = {});

  // All feasible strings of the 0-1 knapsack max sum(v_i s_i) s.t. sum(w_i s_i) <= C,
  // enumerated in increasing integer order with s_1 in the lowest bit.
  // Infeasible strings are excluded; mutation treats them by rejection.
  static Instance knapsack(int n, const std::vector<double>& values,
                           const std::vector<double>& weights, double capacity);

  // Hard cap on bitstring enumeration (2^n states must stay desk-scale).
  static constexpr int kMaxBits = 16;

  int size() const { return static_cast<int>(fitness_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int s) const { return labels_[s]; }
  double fitness(int s) const { return fitness_[s]; }
  std::int64_t multiplicity(int s) const { return multiplicity_[s]; }
  const std::optional<BitEncoding>& encoding() const { return encoding_; }

  double max_fitness() const { return max_fitness_; }
  bool is_optimal(int s) const { return fitness_[s] == max_fitness_; }
  const std::vector<int>& optimal() const { return optimal_; }
  const std::vector<int>& non_optimal() const { return non_optimal_; }

  // S^(1)_high(x): states with strictly higher fitness than x.
  std::vector<int> high_set(int x) const;

  // Fitness levels, distinct values sorted descending; level 0 is optimal.
  const std::vector<double>& levels() const { return levels_; }
  int level_of(int s) const { return level_of_[s]; }

  // Total number of represented states, multiplicity included.
  std::int64_t total_states() const { return total_states_; }
  std::int64_t total_non_optimal() const { return total_non_optimal_; }

  int state_by_label(const std::string& label) const;  // -1 when absent

private:
  Instance() = default;
  void finalize();

  std::vector<std::string> labels_;
  std::vector<double> fitness_;
  std::vector<std::int64_t> multiplicity_;
  std::optional<BitEncoding> encoding_;

  double max_fitness_ = 0.0;
  std::vector<int> optimal_, non_optimal_;
  std::vector<double> levels_;
  std::vector<int> level_of_;
  std::int64_t total_states_ = 0;
  std::int64_t total_non_optimal_ = 0;
};

}  // namespace popscale
