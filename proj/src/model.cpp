#include "popscale/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "popscale/errors.hpp"

namespace popscale {

Instance Instance::tabular(std::vector<std::string> labels, std::vector<double> fitness,
                           std::vector<std::int64_t> multiplicity) {
  if (fitness.empty()) throw ConfigError("instance has no states");
  if (labels.empty()) {
    for (std::size_t i = 0; i < fitness.size(); ++i) labels.push_back("s" + std::to_string(i));
  }
  if (labels.size() != fitness.size())
    throw ConfigError("labels and fitness sizes differ");
  if (multiplicity.empty()) multiplicity.assign(fitness.size(), 1);
  if (multiplicity.size() != fitness.size())
    throw ConfigError("multiplicity and fitness sizes differ");

  Instance inst;
  inst.labels_ = std::move(labels);
  inst.fitness_ = std::move(fitness);
  inst.multiplicity_ = std::move(multiplicity);
  inst.finalize();
  return inst;
}

Instance Instance::knapsack(int n, const std::vector<double>& values,
                            const std::vector<double>& weights, double capacity) {
  if (n < 2) throw ConfigError("knapsack needs n >= 2");
  if (n > kMaxBits)
    throw CapExceeded("knapsack bit length above enumeration cap", static_cast<std::uint64_t>(n),
                      kMaxBits);
  if (static_cast<int>(values.size()) != n || static_cast<int>(weights.size()) != n)
    throw ConfigError("values/weights must have length n");
  if (!(capacity > 0)) throw ConfigError("capacity must be positive");

  Instance inst;
  BitEncoding enc;
  enc.n = n;
  {
    std::ostringstream os;
    os << "knapsack weight sum <= " << capacity;
    enc.feasibility = os.str();
  }
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    double w = 0.0, v = 0.0;
    for (int i = 0; i < n; ++i) {
      if (s >> i & 1u) {
        w += weights[i];
        v += values[i];
      }
    }
    if (w <= capacity) {
      std::string label(n, '0');
      for (int i = 0; i < n; ++i)
        if (s >> i & 1u) label[i] = '1';
      inst.labels_.push_back(std::move(label));
      inst.fitness_.push_back(v);
      inst.multiplicity_.push_back(1);
      enc.bits.push_back(s);
    }
  }
  if (inst.fitness_.size() < 2) throw ConfigError("fewer than two feasible strings");
  inst.encoding_ = std::move(enc);
  inst.finalize();
  return inst;
}

void Instance::finalize() {
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw ConfigError("duplicate state label: " + l);
  }
  for (double f : fitness_) {
    if (!std::isfinite(f)) throw ConfigError("non-finite fitness value");
  }
  for (std::int64_t m : multiplicity_) {
    if (m < 1) throw ConfigError("multiplicity must be >= 1");
  }

  max_fitness_ = *std::max_element(fitness_.begin(), fitness_.end());
  total_states_ = 0;
  total_non_optimal_ = 0;
  for (int s = 0; s < size(); ++s) {
    total_states_ += multiplicity_[s];
    if (fitness_[s] == max_fitness_) {
      optimal_.push_back(s);
    } else {
      non_optimal_.push_back(s);
      total_non_optimal_ += multiplicity_[s];
    }
  }

  std::vector<double> distinct(fitness_);
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  levels_ = std::move(distinct);
  level_of_.resize(size());
  for (int s = 0; s < size(); ++s) {
    level_of_[s] = static_cast<int>(
        std::lower_bound(levels_.begin(), levels_.end(), fitness_[s], std::greater<>()) -
        levels_.begin());
  }
}

std::vector<int> Instance::high_set(int x) const {
  if (x < 0 || x >= size()) throw ConfigError("unknown state index");
  std::vector<int> out;
  for (int y = 0; y < size(); ++y)
    if (fitness_[y] > fitness_[x]) out.push_back(y);
  return out;
}

int Instance::state_by_label(const std::string& label) const {
  for (int s = 0; s < size(); ++s)
    if (labels_[s] == label) return s;
  return -1;
}

}  // namespace popscale
