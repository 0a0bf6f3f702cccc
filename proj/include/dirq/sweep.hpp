#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dirq/fit.hpp"

namespace dirq {

/// A maximal cone of directions over which the optimal basis of the
/// directional quantile LP is constant. On the cone the fit is the fixed
/// basis hyperplane rescaled:
///   (a_u, c_u) = (a0, t) / t'u,   lambda_u = lambda0 / t'u,
/// and the dual score of basis member j is v_j'u / t'u. Off-basis scores
/// depend only on the (cone-constant) residual signs.
struct Cone {
  double tau = 0.0;
  std::vector<int> basis;  // k exactly-fitted observations, sorted
  Vector t;                // unit normal of the basis hyperplane; t'u > 0 inside
  double a0 = 0.0;         // t'Z_j = a0 for every basis j
  double lambda0 = 0.0;
  Matrix v;                // k x k; column j encodes the basis score v_j

  // The cone is {u : g'u >= 0 for all g in normals}: per basis slot j the
  // score bounds give the pair v_j + tau*t and (1-tau)*t - v_j.
  std::vector<Vector> normals;
  std::vector<int> neighbor;  // cone index across each normal; -1 if redundant
  Vector u_rep;               // a strictly interior unit direction

  std::vector<std::int8_t> res_sign;  // per-observation residual sign, 0 on basis
  int N = 0, P = 0;                   // negative / positive residual counts

  // restricted sweeps: directions ranged over u = subspace * s, s on the
  // sphere of the column space; empty for a full sweep
  Matrix subspace;

  double theta_lo = 0.0, theta_hi = 0.0;  // circle sweeps: counter-clockwise span

  /// Smallest margin min_g g'u / ||g|| over the facet normals.
  double min_slack(const Vector& u) const;
  bool contains(const Vector& u, double tol = 1e-9) const;
};

struct SweepHyperplane {
  Hyperplane plane;        // unit-normal scale, oriented as the cone's (t, a0)
  int cutoff = 0;          // observations strictly below
  std::vector<int> cones;  // cones that map to this hyperplane
};

struct SweepResult {
  double tau = 0.0;
  std::vector<Cone> cones;
  std::vector<SweepHyperplane> hyperplanes;  // deduplicated across cones

  /// Cone whose facet margins best cover u, or nullptr if none does.
  const Cone* locate(const Vector& u, double tol = 1e-9) const;
};

struct SweepOptions {
  Vector start_direction;  // empty = deterministic default
  int max_cones = 0;       // iteration cap; 0 = automatic
  // k x m orthonormal basis restricting the swept directions to a subspace
  // (e.g. a response space); empty sweeps the full sphere
  Matrix subspace;
};

/// Decompose the direction sphere into the cones of constant optimal basis
/// at fixed tau. Two swept dimensions walk the circle counter-clockwise;
/// three or more run a breadth-first search across cone facets, re-solving
/// warm-started at a slightly pushed-out facet direction. Requires
/// noninteger n*tau.
SweepResult sweep(const Matrix& data, double tau, const SweepOptions& opts = {});

/// Closed-form fit at a direction strictly inside the cone. Throws
/// InvalidInput when u is on the boundary or outside.
DirectionalQuantileFit evaluate_in_cone(const Cone& cone, const Direction& u);

/// Extreme rays of the cone as unit vectors.
std::vector<Vector> extreme_rays(const Cone& cone);

struct PiecewiseStatistic {
  std::vector<double> value;  // one constant per cone
  std::vector<bool> defined;  // false where the denominator vanishes
};

using ConeFunctional =
    std::function<double(double lambda, double a, const Vector& c)>;

/// Per-cone value of g1/g2 evaluated on the directional fit; constant on each
/// cone whenever g1 and g2 are positively homogeneous of the same order in
/// (lambda, a, c).
PiecewiseStatistic piecewise_statistic(const SweepResult& sw,
                                       const ConeFunctional& g1,
                                       const ConeFunctional& g2);

}  // namespace dirq
