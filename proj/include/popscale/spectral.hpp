#pragma once

#include <vector>

#include "popscale/chain.hpp"

namespace popscale {

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  bool certified = false;
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

struct SpectralReport {
  bool convergent = false;
  Bracket rho_q;                 // spectral radius of Q
  double rho_n = 0.0;            // 1/(1 - rho(Q)); +inf when rho(Q) = 1
  std::vector<double> m;         // expected hitting generations per transient state
  double norm_inf = 0.0;         // max m
  double norm_a = 0.0;           // tuple-count-weighted average of m
};

inline constexpr double kSolveResidualTol = 1e-10;
inline constexpr double kIdentityTol = 1e-9;
inline constexpr double kBracketTol = 1e-10;

// Solves (I - Q) m = 1 by LU with partial pivoting (dense below 2000 states,
// sparse above); throws NonConvergentError when the residual or positivity
// check fails.
std::vector<double> hitting_vector(const TransitionSystem& ts);

// Certified bracket on rho(Q). Triangular chains are read off the diagonal;
// otherwise the sparsity graph is split into strongly connected components
// (their condensation is triangular, so rho is the max over components) and
// each non-trivial component is bracketed by Collatz-Wielandt bounds from
// power iteration on its fundamental matrix, which is primitive.
Bracket spectral_radius(const TransitionSystem& ts);

// The non-optimal state with maximal self-transition probability (mu = 1).
int argmax_self_transition(const TransitionSystem& ts);

struct DistributionTrace {
  std::vector<double> survival;  // ||q_t||_1 for t = 0..t_max
  std::vector<double> rates;     // 1 - (||q_t||_1/||q_0||_1)^(1/t) for t = 1..t_max
};

// Iterates q_t^T = q_{t-1}^T Q from a strictly positive start.
DistributionTrace exact_rate_curve(const TransitionSystem& ts, const std::vector<double>& q0,
                                   int t_max);

// Collatz-Wielandt bounds on rho(N) from a single application of N^T to q0 > 0.
Bracket collatz_wielandt_bounds(const TransitionSystem& ts, const std::vector<double>& q0);

// Explicit fundamental matrix (row X, column Y), for cross-checks; instances
// above 2000 states are refused.
std::vector<std::vector<double>> fundamental_matrix(const TransitionSystem& ts);

SpectralReport spectral_report(const TransitionSystem& ts);

}  // namespace popscale
