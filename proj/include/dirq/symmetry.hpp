#pragma once

#include <functional>
#include <vector>

#include "dirq/sweep.hpp"

namespace dirq {

/// One cone of the direction sphere with its normalized scale readings.
/// lambda_norm / cnorm_norm are the suprema of lambda_u and ||c_u|| over the
/// cone closure, divided by the corresponding global suprema, so both lie in
/// (0, 1] and at least one entry of the map attains 1.
struct DirectionalMapEntry {
  int cone = -1;
  Vector direction;      // strictly interior representative
  double measure = 0.0;  // angular measure (k=2) / solid angle (k=3); 0 beyond
  double lambda_norm = 0.0;
  double cnorm_norm = 0.0;
};

/// Piecewise-constant directional diagnostic u -> lambda_u / lambda_sup and
/// u -> ||c_u|| / cnorm_sup, one entry per cone of the sweep.
struct DirectionalMap {
  double tau = 0.0;
  double lambda_sup = 0.0;
  double cnorm_sup = 0.0;
  double total_measure = 0.0;  // 2*pi for k=2, 4*pi for k=3
  std::vector<DirectionalMapEntry> entries;
};

DirectionalMap map_from_sweep(const SweepResult& sw);
DirectionalMap directional_map(const Matrix& data, double tau);

/// Pluggable discrepancy between a normalized map value and 1; the default is
/// the squared difference.
using Discrepancy = std::function<double(double, double)>;

/// Measure-weighted average of delta(lambda_norm, 1) over the sphere. Zero
/// exactly when every entry equals 1.
double map_discrepancy(const DirectionalMap& map, const Discrepancy& delta = {});

/// Symmetry functional: weighted average of map_discrepancy over the tau
/// grid. Weights default to uniform and are normalized to sum to one.
/// Requires k in {2, 3} and noninteger n*tau throughout the grid.
double T_statistic(const Matrix& data, const std::vector<double>& tau_grid,
                   const std::vector<double>& weight = {},
                   const Discrepancy& delta = {});

/// Dense angular samples of both normalized maps for polar plotting (k=2
/// full-circle sweeps only).
struct PolarSample {
  double angle = 0.0;  // radians in [0, 2*pi)
  double lambda_norm = 0.0;
  double cnorm_norm = 0.0;
};
std::vector<PolarSample> polar_profile(const SweepResult& sw, int per_cone = 16);

}  // namespace dirq
