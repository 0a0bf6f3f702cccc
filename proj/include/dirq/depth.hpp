#pragma once

#include <vector>

#include "dirq/sweep.hpp"

namespace dirq {

/// A fixed-tau quantile region / halfspace-depth region: the intersection of
/// closed upper quantile halfspaces, together with the generating hyperplanes
/// and their cut-off counts.
struct DepthRegion {
  double tau = 0.0;
  int level = 0;  // region = D(level/n) when known, 0 otherwise
  ConvexPolytope polytope;
  std::vector<SweepHyperplane> generators;

  bool empty() const { return polytope.empty; }
};

/// Intersection of every upper quantile halfspace of the tau-sweep. Empty
/// output is a valid result for large tau.
DepthRegion region(const Matrix& data, double tau);
DepthRegion region_from_sweep(const SweepResult& sw);

/// The depth regions D(l/n) recoverable from one sweep: levels
/// max(1, floor(n tau) + 2 - k) .. floor(n tau) + 1, each assembled from the
/// hyperplanes cutting off at most l-1 observations and cross-checked against
/// the enumeration oracle (k <= 3). Pass explicit levels to restrict; levels
/// outside the guaranteed range throw InvalidInput.
std::vector<DepthRegion> extract_adjacent_contours(
    const SweepResult& sw, const Matrix& data,
    const std::vector<int>& levels = {});

/// Exact halfspace depth of a point by candidate-normal enumeration,
/// k in {2, 3}. Returns a multiple of 1/n.
double brute_force_depth(const Vector& point, const Matrix& data);

/// D(level/n) by enumerating all halfspaces bounded by k-point hyperplanes
/// that contain at least n - level + 1 observations, k in {2, 3}.
DepthRegion brute_force_region(const Matrix& data, int level);

/// Largest level with nonempty D(level/n), by bisection over the oracle.
int max_nonempty_level(const Matrix& data);

/// Outer approximation: intersection of the directional projection-quantile
/// upper halfspaces over the given directions. Always contains region().
DepthRegion km_envelope(const Matrix& data, double tau,
                        const std::vector<Direction>& directions);

}  // namespace dirq
