#include "popscale/operators.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <string>

#include "popscale/errors.hpp"

namespace popscale {

MutationKernel::MutationKernel(const Instance& inst, std::vector<double> class_rows)
    : n_(inst.size()), rows_(std::move(class_rows)) {
  if (rows_.size() != static_cast<std::size_t>(n_) * n_)
    throw ConfigError("mutation matrix size does not match the instance");
  for (int x = 0; x < n_; ++x) {
    double sum = 0.0;
    for (int y = 0; y < n_; ++y) {
      double p = entry(x, y);
      if (!(p >= 0.0) || p > 1.0 + kRowSumTol)
        throw ConfigError("mutation probability outside [0,1] in row " + inst.label(x));
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw ConfigError("mutation row " + inst.label(x) + " does not sum to 1");
  }
  to_optimal_.resize(n_);
  to_high_.resize(n_);
  for (int x = 0; x < n_; ++x) {
    double opt = 0.0;
    for (int y : inst.optimal()) opt += entry(x, y);
    to_optimal_[x] = opt;
    double high = 0.0;
    for (int y = 0; y < n_; ++y)
      if (inst.fitness(y) > inst.fitness(x)) high += entry(x, y);
    to_high_[x] = high;
  }
  is_global_ = true;
  for (int x : inst.non_optimal())
    if (!(to_optimal_[x] > 0.0)) is_global_ = false;
}

double MutationKernel::mass(int x, std::span<const int> targets) const {
  double s = 0.0;
  for (int y : targets) s += entry(x, y);
  return s;
}

MutationKernel tabular_mutation(const Instance& inst,
                                const std::vector<std::vector<double>>& rows) {
  const int n = inst.size();
  if (static_cast<int>(rows.size()) != n)
    throw ConfigError("mutation matrix must have one row per state");
  std::vector<double> class_rows(static_cast<std::size_t>(n) * n);
  for (int x = 0; x < n; ++x) {
    if (static_cast<int>(rows[x].size()) != n)
      throw ConfigError("mutation row " + inst.label(x) + " has wrong length");
    double sum = 0.0;
    for (int y = 0; y < n; ++y) {
      if (rows[x][y] < 0.0)
        throw ConfigError("negative mutation probability in row " + inst.label(x));
      sum += rows[x][y] * static_cast<double>(inst.multiplicity(y));
    }
    if (std::abs(sum - 1.0) > MutationKernel::kInputRowSumTol)
      throw ConfigError("mutation row " + inst.label(x) + " sums to " + std::to_string(sum));
    for (int y = 0; y < n; ++y)
      class_rows[static_cast<std::size_t>(x) * n + y] =
          rows[x][y] * static_cast<double>(inst.multiplicity(y)) / sum;
  }
  return MutationKernel(inst, std::move(class_rows));
}

MutationKernel bitwise_rejection_mutation(const Instance& inst, double flip_prob) {
  if (!inst.encoding())
    throw ConfigError("bitwise mutation needs a bitstring-encoded instance");
  if (!(flip_prob > 0.0) || !(flip_prob < 1.0))
    throw ConfigError("flip probability must lie in (0,1)");
  const auto& enc = *inst.encoding();
  const int n = enc.n;
  const int m = inst.size();

  // p^d (1-p)^(n-d) by Hamming distance.
  std::vector<double> by_distance(n + 1);
  for (int d = 0; d <= n; ++d)
    by_distance[d] = std::pow(flip_prob, d) * std::pow(1.0 - flip_prob, n - d);

  std::vector<int> feasible_index(1u << n, -1);
  for (int s = 0; s < m; ++s) feasible_index[enc.bits[s]] = s;

  std::vector<double> class_rows(static_cast<std::size_t>(m) * m, 0.0);
  for (int x = 0; x < m; ++x) {
    double* row = &class_rows[static_cast<std::size_t>(x) * m];
    for (std::uint32_t z = 0; z < (1u << n); ++z) {
      int d = std::popcount(enc.bits[x] ^ z);
      int y = feasible_index[z];
      row[y >= 0 ? y : x] += by_distance[d];  // rejection keeps the parent
    }
  }
  return MutationKernel(inst, std::move(class_rows));
}

MutationKernel mix_with_global(const Instance& inst, const MutationKernel& base, double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw ConfigError("mixing epsilon must lie in (0,1)");
  const int n = inst.size();
  const double total = static_cast<double>(inst.total_states());
  std::vector<double> class_rows(static_cast<std::size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      class_rows[static_cast<std::size_t>(x) * n + y] =
          (1.0 - epsilon) * base.entry(x, y) +
          epsilon * static_cast<double>(inst.multiplicity(y)) / total;
  return MutationKernel(inst, std::move(class_rows));
}

SelectionRule replicate_best_selection() {
  return {SelectionKind::replicate_best, true, true, true, false, "replicate_best"};
}
SelectionRule elitist_proportional_selection() {
  return {SelectionKind::elitist_proportional, true, true, false, true, "elitist_proportional"};
}
SelectionRule elitist_truncation_selection() {
  return {SelectionKind::elitist_truncation, true, true, false, false, "elitist_truncation"};
}

const SelectionRule* selection_by_name(const std::string& name) {
  static const SelectionRule rules[] = {replicate_best_selection(),
                                        elitist_proportional_selection(),
                                        elitist_truncation_selection()};
  for (const auto& r : rules)
    if (name == r.name) return &r;
  return nullptr;
}

int crown_of(const Instance& inst, const Members& members) {
  assert(!members.empty());
  int best = members[0];
  for (int s : members)
    if (inst.fitness(s) > inst.fitness(best) ||
        (inst.fitness(s) == inst.fitness(best) && s < best))
      best = s;
  return best;
}

namespace {

// winner slot: the incumbent best parent, displaced only by a strictly fitter child
int winner_of(const Instance& inst, const Members& parents, const Members& children) {
  int cx = crown_of(inst, parents);
  int cy = crown_of(inst, children);
  return inst.fitness(cy) > inst.fitness(cx) ? cy : cx;
}

void proportional_compositions(const std::vector<int>& classes, const std::vector<double>& pi,
                               int slots, int winner, std::vector<SuccessorMass>& out) {
  // i.i.d. slot draws folded into per-multiset probabilities
  std::vector<int> counts(classes.size(), 0);
  std::vector<double> fact(static_cast<std::size_t>(slots) + 1, 1.0);
  for (int i = 1; i <= slots; ++i) fact[i] = fact[i - 1] * i;

  auto emit = [&]() {
    double coeff = fact[slots];
    double prob = 1.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      coeff /= fact[counts[c]];
      prob *= std::pow(pi[c], counts[c]);
    }
    prob *= coeff;
    if (prob <= 0.0) return;
    Members z;
    z.reserve(slots + 1);
    z.push_back(winner);
    for (std::size_t c = 0; c < classes.size(); ++c)
      for (int j = 0; j < counts[c]; ++j) z.push_back(classes[c]);
    std::sort(z.begin(), z.end());
    out.push_back({std::move(z), prob});
  };

  // recursive enumeration of compositions of `slots` over the classes
  auto rec = [&](auto&& self, std::size_t c, int left) -> void {
    if (c + 1 == classes.size()) {
      counts[c] = left;
      emit();
      counts[c] = 0;
      return;
    }
    for (int j = 0; j <= left; ++j) {
      counts[c] = j;
      self(self, c + 1, left - j);
    }
    counts[c] = 0;
  };
  if (classes.empty()) {
    if (slots == 0) out.push_back({{winner}, 1.0});
    return;
  }
  rec(rec, 0, slots);
}

}  // namespace

std::vector<SuccessorMass> successor_distribution(const SelectionRule& rule, const Instance& inst,
                                                  const Members& parents,
                                                  const Members& children) {
  assert(parents.size() == children.size() && !parents.empty());
  assert(std::is_sorted(parents.begin(), parents.end()));
  assert(std::is_sorted(children.begin(), children.end()));
  const int mu = static_cast<int>(parents.size());
  const int winner = winner_of(inst, parents, children);

  switch (rule.kind) {
    case SelectionKind::replicate_best:
      return {{Members(mu, winner), 1.0}};

    case SelectionKind::elitist_truncation: {
      // fitness desc, parents ahead of children at ties, then declared order
      struct Tagged {
        double f;
        int is_child;
        int s;
      };
      std::vector<Tagged> pool;
      pool.reserve(2 * mu);
      for (int s : parents) pool.push_back({inst.fitness(s), 0, s});
      for (int s : children) pool.push_back({inst.fitness(s), 1, s});
      std::sort(pool.begin(), pool.end(), [](const Tagged& a, const Tagged& b) {
        if (a.f != b.f) return a.f > b.f;
        if (a.is_child != b.is_child) return a.is_child < b.is_child;
        return a.s < b.s;
      });
      Members z;
      z.reserve(mu);
      for (int i = 0; i < mu; ++i) z.push_back(pool[i].s);
      std::sort(z.begin(), z.end());
      return {{std::move(z), 1.0}};
    }

    case SelectionKind::elitist_proportional: {
      // the other 2*mu-1 individuals compete for the non-best slots
      Members pool;
      pool.reserve(2 * mu - 1);
      bool winner_removed = false;
      const Members& winner_side = inst.fitness(crown_of(inst, children)) >
                                           inst.fitness(crown_of(inst, parents))
                                       ? children
                                       : parents;
      for (const Members* side : {&parents, &children}) {
        for (int s : *side) {
          if (!winner_removed && side == &winner_side && s == winner) {
            winner_removed = true;
            continue;
          }
          pool.push_back(s);
        }
      }
      assert(winner_removed && static_cast<int>(pool.size()) == 2 * mu - 1);

      std::vector<int> classes;
      std::vector<double> weight;
      for (int s : pool) {
        if (inst.fitness(s) < 0.0)
          throw ConfigError("proportional selection over a negative fitness pool");
        auto it = std::find(classes.begin(), classes.end(), s);
        if (it == classes.end()) {
          classes.push_back(s);
          weight.push_back(1.0);
        } else {
          weight[static_cast<std::size_t>(it - classes.begin())] += 1.0;
        }
      }
      double total = 0.0;
      for (std::size_t c = 0; c < classes.size(); ++c) total += weight[c] * inst.fitness(classes[c]);
      std::vector<double> pi(classes.size());
      for (std::size_t c = 0; c < classes.size(); ++c) {
        pi[c] = total > 0.0 ? weight[c] * inst.fitness(classes[c]) / total
                            : weight[c] / static_cast<double>(pool.size());
      }
      std::vector<SuccessorMass> out;
      proportional_compositions(classes, pi, mu - 1, winner, out);
      return out;
    }
  }
  throw ConfigError("unknown selection rule");
}

}  // namespace popscale
