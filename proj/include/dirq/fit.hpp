#pragma once

#include <utility>
#include <vector>

#include "dirq/models.hpp"
#include "dirq/solver.hpp"

namespace dirq {

/// A fitted directional quantile in both parameterizations: the (a, b)
/// regression form against gamma'Z and the constrained normal form (a, c)
/// with u'c = 1.
struct DirectionalQuantileFit {
  DirectionalQuantileFit(double tau_, Direction u_, Matrix gamma_)
      : tau(tau_), u(std::move(u_)), gamma(std::move(gamma_)) {}

  double tau = 0.0;
  Direction u;
  Matrix gamma;
  double a = 0.0;
  Vector b;  // length k-1
  Vector c;  // length k
  double lambda = 0.0;
  Vector mu;               // dual scores (empirical fits only)
  std::vector<int> basis;  // exactly-fitted observations (empirical only)
  int N = 0, P = 0, Z0 = 0;
  bool nonunique = false;

  Hyperplane hyperplane() const { return Hyperplane{c, a}; }
};

/// Fit one empirical directional quantile; wraps the LP solver and verifies
/// the optimality certificate.
DirectionalQuantileFit fit(const Matrix& data, double tau, const Direction& u,
                           const SolveOptions& opts = {});

/// Same, against a caller-chosen orthonormal complement of u (e.g. a block
/// basis separating regressor and response coordinates).
DirectionalQuantileFit fit(const Matrix& data, double tau, const Direction& u,
                           const Matrix& gamma, const SolveOptions& opts = {});

/// Lower open and upper closed quantile halfspaces of a fit.
std::pair<Halfspace, Halfspace> halfspaces(const DirectionalQuantileFit& f);

/// Projection quantile: hyperplane orthogonal to u at the classical empirical
/// tau-quantile of the projections u'Z_i (lower-semicontinuous inverse).
Hyperplane km_projection_quantile(const Matrix& data, double tau,
                                  const Vector& u);

/// Population directional quantile of an analytic model, by damped Newton on
/// the gradient system with quadrature moments. Throws DegeneracyError when
/// the population Hessian is numerically singular (e.g. symmetric models at
/// tau = 1/2 in flat directions).
DirectionalQuantileFit population_fit(const DensityModel& model, double tau,
                                      const Direction& u);

}  // namespace dirq
