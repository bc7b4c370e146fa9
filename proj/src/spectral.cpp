#include "popscale/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stack>

#include "popscale/errors.hpp"

namespace popscale {

namespace {

constexpr int kDenseLimit = 2000;
constexpr int kMaxPowerIterations = 100000;

Eigen::SparseMatrix<double> i_minus_q_sparse(const TransitionSystem& ts) {
  const int n = ts.size();
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < n; ++i) {
    bool diag_seen = false;
    for (const auto& [j, p] : ts.q[i].entries) {
      if (j == i) {
        trips.emplace_back(i, i, 1.0 - p);
        diag_seen = true;
      } else {
        trips.emplace_back(i, j, -p);
      }
    }
    if (!diag_seen) trips.emplace_back(i, i, 1.0);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

std::vector<double> solve_i_minus_q(const TransitionSystem& ts, const std::vector<double>& rhs,
                                    bool* ok) {
  const int n = ts.size();
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
  Eigen::VectorXd x;
  if (n <= kDenseLimit) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (const auto& [j, p] : ts.q[i].entries) a(i, j) -= p;
    x = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(b);
  } else {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(i_minus_q_sparse(ts));
    if (lu.info() != Eigen::Success) {
      *ok = false;
      return {};
    }
    x = lu.solve(b);
  }
  *ok = x.allFinite();
  return std::vector<double>(x.data(), x.data() + n);
}

// iterative Tarjan over the sparsity graph of Q
std::vector<std::vector<int>> strongly_connected_components(const TransitionSystem& ts) {
  const int n = ts.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int counter = 0;

  struct Frame {
    int v;
    std::size_t edge;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::stack<Frame> frames;
    frames.push({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.top();
      const auto& edges = ts.q[f.v].entries;
      if (f.edge < edges.size()) {
        int w = edges[f.edge].first;
        double p = edges[f.edge].second;
        ++f.edge;
        if (p <= 0.0 || w == f.v) continue;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        int v = f.v;
        frames.pop();
        if (!frames.empty()) low[frames.top().v] = std::min(low[frames.top().v], low[v]);
        if (low[v] == index[v]) {
          std::vector<int> comp;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
            if (w == v) break;
          }
          components.push_back(std::move(comp));
        }
      }
    }
  }
  return components;
}

double diagonal_entry(const TransitionSystem& ts, int i) {
  for (const auto& [j, p] : ts.q[i].entries)
    if (j == i) return p;
  return 0.0;
}

// Collatz-Wielandt-bracketed power iteration on the shifted inverse
// (sigma I - Q_scc)^{-1}, which is nonnegative with spectral radius
// 1/(sigma - rho) whenever sigma > rho(Q_scc). The initial shift sigma = 1
// is the fundamental matrix itself; when the eigenvalues of the inverse
// cluster (rho much smaller than sigma), sigma is re-aimed just above the
// certified upper bound, which keeps every bound valid and restores the gap.
Bracket component_radius(const TransitionSystem& ts, const std::vector<int>& comp) {
  const int m = static_cast<int>(comp.size());
  std::vector<int> local(ts.size(), -1);
  for (int k = 0; k < m; ++k) local[comp[k]] = k;

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
  bool closed = true;  // no escape from the component => stochastic block
  for (int k = 0; k < m; ++k) {
    double inside = 0.0;
    for (const auto& [j, p] : ts.q[comp[k]].entries) {
      if (local[j] >= 0) {
        q(k, local[j]) = p;
        inside += p;
      }
    }
    if (inside < 1.0 - 1e-14) closed = false;
  }
  if (closed) return {1.0, 1.0, true};  // rho of a stochastic block is exactly 1

  double sigma = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sigma * Eigen::MatrixXd::Identity(m, m) - q);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
  double q_lo = 0.0, q_hi = 1.0;  // certified bracket on rho(Q_scc)
  double checkpoint_width = 2.0;
  for (int it = 0; it < kMaxPowerIterations; ++it) {
    Eigen::VectorXd w = lu.solve(v);
    if (!w.allFinite() || w.minCoeff() <= 0.0) return {q_lo, q_hi, false};
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int k = 0; k < m; ++k) {
      double ratio = w(k) / v(k);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    // lo <= rho((sigma I - Q)^{-1}) <= hi maps to sigma - 1/lo <= rho(Q) <= sigma - 1/hi
    q_lo = std::max(q_lo, sigma - 1.0 / lo);
    q_hi = std::min(q_hi, sigma - 1.0 / hi);
    if (q_hi - q_lo <= kBracketTol) return {q_lo, q_hi, true};
    v = w / w.maxCoeff();
    if (it % 50 == 49) {
      if (q_hi - q_lo > 0.5 * checkpoint_width && sigma - q_hi > 0.25 * (q_hi - q_lo)) {
        // slow progress: move the shift next to the certified upper bound
        sigma = q_hi + 0.25 * (q_hi - q_lo);
        lu.compute(sigma * Eigen::MatrixXd::Identity(m, m) - q);
        v = Eigen::VectorXd::Ones(m);
      }
      checkpoint_width = q_hi - q_lo;
    }
  }
  return {q_lo, q_hi, false};
}

}  // namespace

std::vector<double> hitting_vector(const TransitionSystem& ts) {
  const int n = ts.size();
  if (n == 0) return {};
  std::vector<double> ones(n, 1.0);
  bool ok = false;
  std::vector<double> m = solve_i_minus_q(ts, ones, &ok);
  if (!ok) throw NonConvergentError("I - Q is singular: the chain is not convergent");
  // residual ||(I-Q)m - 1||_inf and positivity
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = m[i];
    for (const auto& [j, p] : ts.q[i].entries) row -= p * m[j];
    worst = std::max(worst, std::abs(row - 1.0));
    if (!(m[i] > 0.0)) throw NonConvergentError("hitting-time solve produced a non-positive entry");
  }
  if (worst > kSolveResidualTol)
    throw NonConvergentError("hitting-time solve residual above tolerance");
  return m;
}

Bracket spectral_radius(const TransitionSystem& ts) {
  const int n = ts.size();
  if (n == 0) return {0.0, 0.0, true};
  if (ts.triangular) {
    double r = 0.0;
    for (int i = 0; i < n; ++i) r = std::max(r, diagonal_entry(ts, i));
    return {r, r, true};
  }
  Bracket out{0.0, 0.0, true};
  for (const auto& comp : strongly_connected_components(ts)) {
    Bracket b = comp.size() == 1
                    ? Bracket{diagonal_entry(ts, comp[0]), diagonal_entry(ts, comp[0]), true}
                    : component_radius(ts, comp);
    out.lo = std::max(out.lo, b.lo);
    out.hi = std::max(out.hi, b.hi);
    out.certified = out.certified && b.certified;
  }
  return out;
}

int argmax_self_transition(const TransitionSystem& ts) {
  if (ts.mu != 1) throw ConfigError("argmax self-transition is defined for mu = 1 chains");
  int best_state = -1;
  double best_diag = -1.0;
  for (int i = 0; i < ts.size(); ++i) {
    double d = diagonal_entry(ts, i);
    int declared = ts.states[i].best;
    if (d > best_diag || (d == best_diag && declared < best_state)) {
      best_diag = d;
      best_state = declared;
    }
  }
  return best_state;
}

DistributionTrace exact_rate_curve(const TransitionSystem& ts, const std::vector<double>& q0,
                                   int t_max) {
  const int n = ts.size();
  if (static_cast<int>(q0.size()) != n) throw ConfigError("q0 size does not match the chain");
  for (double v : q0)
    if (!(v > 0.0)) throw ConfigError("the rate curve needs q0 > 0 on every transient state");

  DistributionTrace trace;
  std::vector<double> q = q0;
  double s0 = 0.0;
  for (double v : q) s0 += v;
  trace.survival.push_back(s0);
  std::vector<double> next(n);
  for (int t = 1; t <= t_max; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      if (q[i] == 0.0) continue;
      for (const auto& [j, p] : ts.q[i].entries) next[j] += q[i] * p;
    }
    q.swap(next);
    double st = 0.0;
    for (double v : q) st += v;
    trace.survival.push_back(st);
    trace.rates.push_back(st > 0.0 ? 1.0 - std::pow(st / s0, 1.0 / t) : 1.0);
  }
  return trace;
}

Bracket collatz_wielandt_bounds(const TransitionSystem& ts, const std::vector<double>& q0) {
  const int n = ts.size();
  if (static_cast<int>(q0.size()) != n) throw ConfigError("q0 size does not match the chain");
  for (double v : q0)
    if (!(v > 0.0)) throw ConfigError("Collatz-Wielandt bounds need q0 > 0");
  // w = N^T q0 solved from (I - Q)^T w = q0
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, p] : ts.q[i].entries) a(j, i) -= p;
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(q0.data(), n);
  Eigen::VectorXd w = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(b);
  if (!w.allFinite()) throw NonConvergentError("I - Q is singular");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i < n; ++i) {
    double ratio = w(i) / q0[i];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo, hi, true};  // bounds on rho(N), not on rho(Q)
}

std::vector<std::vector<double>> fundamental_matrix(const TransitionSystem& ts) {
  const int n = ts.size();
  if (n > kDenseLimit) throw CapExceeded("explicit N is limited to small chains", n, kDenseLimit);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, p] : ts.q[i].entries) a(i, j) -= p;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::MatrixXd nn = lu.solve(Eigen::MatrixXd::Identity(n, n));
  std::vector<std::vector<double>> out(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = nn(i, j);
  return out;
}

SpectralReport spectral_report(const TransitionSystem& ts) {
  SpectralReport rep;
  rep.rho_q = spectral_radius(ts);
  rep.convergent = rep.rho_q.certified && rep.rho_q.hi < 1.0 - 1e-12;
  if (ts.size() == 0) {
    rep.convergent = true;
    rep.rho_n = 1.0;
    return rep;
  }
  if (rep.convergent) {
    rep.rho_n = 1.0 / (1.0 - rep.rho_q.mid());
    rep.m = hitting_vector(ts);
    rep.norm_inf = *std::max_element(rep.m.begin(), rep.m.end());
    double num = 0.0, den = 0.0;
    for (int i = 0; i < ts.size(); ++i) {
      num += ts.weights[i] * rep.m[i];
      den += ts.weights[i];
    }
    rep.norm_a = num / den;
  } else {
    rep.rho_n = std::numeric_limits<double>::infinity();
  }
  return rep;
}

}  // namespace popscale
