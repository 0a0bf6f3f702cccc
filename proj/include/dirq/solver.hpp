#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dirq/geometry.hpp"
#include "dirq/types.hpp"

namespace dirq {

/// One directional quantile problem: minimize the check loss of u'Z_i against
/// an affine function of Gamma'Z_i, over intercept and slope. Observations are
/// the columns of Z.
struct QuantileLP {
  Matrix Z;      // k x n
  Direction u;   // unit direction in R^k
  double tau;    // strictly inside (0,1)
  Matrix gamma;  // k x (k-1) orthonormal complement of u

  QuantileLP(Matrix Z_, Direction u_, double tau_);
  QuantileLP(Matrix Z_, Direction u_, double tau_, Matrix gamma_);

  int k() const { return static_cast<int>(Z.rows()); }
  int n() const { return static_cast<int>(Z.cols()); }
};

struct PrimalSolution {
  double a = 0.0;
  Vector b;  // slope against gamma' Z, length k-1
  Vector c;  // = u - gamma * b, satisfies u'c = 1
  std::vector<int> basis;  // k observations fitted exactly
  int N = 0, P = 0, Z0 = 0;  // negative / positive / zero residual counts
  bool nonunique = false;

  Hyperplane hyperplane() const { return Hyperplane{c, a}; }
};

struct DualSolution {
  double lambda_D = 0.0;  // optimal dual objective, = n * lambda
  Vector mu;              // n dual scores in [-tau, 1-tau]
  double lambda = 0.0;    // Lagrange multiplier of the direction constraint
};

struct SolveOptions {
  bool allow_degenerate = false;  // accept integer n*tau (nonunique optima)
  std::vector<int> start_basis;   // warm start; empty = automatic
  bool jitter = false;            // break ties in non-general-position data
  std::uint64_t jitter_seed = 0;
  int max_iter_factor = 50;       // iteration cap = max(1000, factor * n)
};

/// Solve by exterior-point simplex over k-observation bases. Throws
/// InvalidInput on malformed problems, DegeneracyError on integer n*tau
/// (without allow_degenerate) or on pivot cycling, NumericError on
/// non-general-position data (without jitter).
std::pair<PrimalSolution, DualSolution> solve(const QuantileLP& lp,
                                              const SolveOptions& opts = {});

struct CertificateReport {
  bool sandwich_ok = false;      // N/n <= tau <= (N+Z0)/n
  bool mass_balance_ok = false;  // lambda-shifted componentwise inequalities
  Vector xi;                     // basis subgradient coordinates, length k
  bool xi_in_box = false;        // -tau <= xi <= 1-tau
  bool strict = false;           // strict inequalities => unique optimum
  double lambda_resid = 0.0;     // |lambda - mean check loss|
  bool pass = false;
};

/// Independent post-solve optimality check from residual signs and the basis
/// subgradient system. Throws NumericError if the basis does not span.
CertificateReport verify_certificate(const QuantileLP& lp,
                                     const PrimalSolution& primal,
                                     const DualSolution& dual);

}  // namespace dirq
