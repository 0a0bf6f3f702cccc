#pragma once

#include <utility>
#include <vector>

#include "dirq/depth.hpp"
#include "dirq/sweep.hpp"

namespace dirq {

/// Which rows of a raw variable matrix act as regressors (W) and which as
/// responses (Y). An intercept is always implied; the assembled vector is
/// Z = (W', Y')' of dimension k = (p-1) + m.
struct RegressionSpec {
  std::vector<int> regressors;  // p-1 row indices, possibly empty
  std::vector<int> responses;   // m >= 1 row indices

  int p() const { return static_cast<int>(regressors.size()) + 1; }
  int m() const { return static_cast<int>(responses.size()); }
  int k() const { return p() - 1 + m(); }
};

/// Reorder raw variables into the (W', Y')' layout. Validates the spec.
Matrix assemble_zspace(const Matrix& data, const RegressionSpec& spec);

/// A fitted directional regression quantile: the hyperplane
///   u_y'y = b_y' G_{u_y}' y + b_w' w + a
/// in (w, y)-space, obtained from the location machinery on Z = (W', Y')'
/// with the embedded direction (0, u_y) and the block complement
/// diag(I_{p-1}, G_{u_y}).
struct RegressionFit {
  RegressionFit(double tau_, Direction u_y_)
      : tau(tau_), u_y(std::move(u_y_)) {}

  double tau;
  Direction u_y;  // unit direction in response space R^m
  double a = 0.0;
  Vector b_w;  // regressor slopes, length p-1
  Vector b_y;  // in-response slopes, length m-1
  Vector c;    // full k-vector: the hyperplane is {z : c'z = a}
  double lambda = 0.0;
  Vector mu;
  std::vector<int> basis;
  int N = 0, P = 0, Z0 = 0;

  Hyperplane hyperplane() const { return Hyperplane{c, a}; }
};

/// Embedded direction (0_{p-1}, u_y) and block orthonormal complement.
std::pair<Direction, Matrix> embed_direction(const RegressionSpec& spec,
                                             const Direction& u_y);

/// Fit one directional regression quantile. Throws NumericError when the
/// regressor design (intercept plus W) is rank deficient.
RegressionFit fit_regression(const Matrix& data, const RegressionSpec& spec,
                             double tau, const Direction& u_y,
                             const SolveOptions& opts = {});

/// Cross-section of the regression quantile tube at a fixed regressor value:
/// sweep directions over the response sphere only, then intersect the upper
/// halfspaces in y-space at w. m in {2, 3}.
struct RegressionTubeCut {
  double tau = 0.0;
  Vector w;
  ConvexPolytope polytope;                // in response space R^m
  std::vector<SweepHyperplane> sections;  // y-space halfspace boundaries
};

RegressionTubeCut regression_cut(const Matrix& data, const RegressionSpec& spec,
                                 double tau, const Vector& w);
RegressionTubeCut cut_from_sweep(const SweepResult& sw,
                                 const RegressionSpec& spec, const Vector& w);

/// Containment audit across tau for cuts at one regressor value: flags every
/// pair tau1 > tau2 whose cuts are not nested.
struct CrossingReport {
  bool crossing = false;
  std::vector<std::pair<double, double>> pairs;  // (tau_hi, tau_lo) failures
};

CrossingReport detect_crossing(const std::vector<RegressionTubeCut>& cuts);

}  // namespace dirq
