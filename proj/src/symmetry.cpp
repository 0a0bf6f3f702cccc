#include "dirq/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dirq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int swept_dim(const Cone& cone) {
  return cone.subspace.size() == 0 ? static_cast<int>(cone.t.size())
                                   : static_cast<int>(cone.subspace.cols());
}

// Smallest t'u over the cone closure intersected with the sphere. The
// function is linear, so the minimum sits on the extreme rays; the interior
// representative and ray midpoints are thrown in as a safety net.
double min_t_dot_u(const Cone& cone) {
  std::vector<Vector> probes = extreme_rays(cone);
  probes.push_back(cone.u_rep);
  const std::size_t r = probes.size() - 1;
  for (std::size_t i = 0; i + 1 < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) {
      Vector m = probes[i] + probes[j];
      if (m.norm() > 1e-12) probes.push_back(m.normalized());
    }
  double lo = std::numeric_limits<double>::infinity();
  for (const Vector& u : probes) lo = std::min(lo, cone.t.dot(u));
  return lo;
}

// Solid angle of the spherical polygon spanned by the cone's extreme rays
// (k=3): fan of spherical triangles around the interior representative, each
// measured by the van Oosterom-Strackee formula.
double solid_angle(const Cone& cone) {
  std::vector<Vector> rays = extreme_rays(cone);
  Matrix Q = make_orthobasis(Direction(cone.u_rep));
  std::sort(rays.begin(), rays.end(), [&](const Vector& a, const Vector& b) {
    return std::atan2(Q.col(1).dot(a), Q.col(0).dot(a)) <
           std::atan2(Q.col(1).dot(b), Q.col(0).dot(b));
  });
  double total = 0.0;
  const Vector& o = cone.u_rep;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const Vector& p = rays[i];
    const Vector& q = rays[(i + 1) % rays.size()];
    double triple = o(0) * (p(1) * q(2) - p(2) * q(1)) +
                    o(1) * (p(2) * q(0) - p(0) * q(2)) +
                    o(2) * (p(0) * q(1) - p(1) * q(0));
    double den = 1.0 + o.dot(p) + p.dot(q) + q.dot(o);
    total += std::abs(2.0 * std::atan2(std::abs(triple), den));
  }
  return total;
}

double cone_measure(const Cone& cone) {
  const int sdim = swept_dim(cone);
  if (sdim == 2) return cone.theta_hi - cone.theta_lo;
  if (sdim == 3) return solid_angle(cone);
  return 0.0;
}

}  // namespace

DirectionalMap map_from_sweep(const SweepResult& sw) {
  DirectionalMap map;
  map.tau = sw.tau;
  map.entries.reserve(sw.cones.size());
  double lam_sup = 0.0, cn_sup = 0.0;
  for (std::size_t i = 0; i < sw.cones.size(); ++i) {
    const Cone& cone = sw.cones[i];
    DirectionalMapEntry e;
    e.cone = static_cast<int>(i);
    e.direction = cone.u_rep;
    e.measure = cone_measure(cone);
    double inv = 1.0 / min_t_dot_u(cone);  // sup of 1/t'u over the cone
    e.lambda_norm = cone.lambda0 * inv;    // sups before normalization
    e.cnorm_norm = inv;
    lam_sup = std::max(lam_sup, e.lambda_norm);
    cn_sup = std::max(cn_sup, e.cnorm_norm);
    map.total_measure += e.measure;
    map.entries.push_back(std::move(e));
  }
  if (lam_sup <= 0.0 || cn_sup <= 0.0)
    throw NumericError("directional_map: degenerate scale suprema");
  for (auto& e : map.entries) {
    e.lambda_norm /= lam_sup;
    e.cnorm_norm /= cn_sup;
  }
  map.lambda_sup = lam_sup;
  map.cnorm_sup = cn_sup;
  return map;
}

DirectionalMap directional_map(const Matrix& data, double tau) {
  return map_from_sweep(sweep(data, tau));
}

double map_discrepancy(const DirectionalMap& map, const Discrepancy& delta) {
  if (map.total_measure <= 0.0)
    throw InvalidInput("map_discrepancy: map carries no angular measure");
  Discrepancy d = delta;
  if (!d) d = [](double x, double y) { return (x - y) * (x - y); };
  double acc = 0.0;
  for (const auto& e : map.entries) acc += e.measure * d(e.lambda_norm, 1.0);
  return acc / map.total_measure;
}

double T_statistic(const Matrix& data, const std::vector<double>& tau_grid,
                   const std::vector<double>& weight, const Discrepancy& delta) {
  if (data.rows() != 2 && data.rows() != 3)
    throw InvalidInput("T_statistic: angular measure needs k in {2, 3}");
  if (tau_grid.empty()) throw InvalidInput("T_statistic: empty tau grid");
  if (!weight.empty() && weight.size() != tau_grid.size())
    throw InvalidInput("T_statistic: weight length must match the tau grid");

  double wsum = 0.0;
  for (std::size_t j = 0; j < tau_grid.size(); ++j) {
    double w = weight.empty() ? 1.0 : weight[j];
    if (w < 0.0) throw InvalidInput("T_statistic: negative weight");
    wsum += w;
  }
  if (wsum <= 0.0) throw InvalidInput("T_statistic: weights sum to zero");

  double acc = 0.0;
  for (std::size_t j = 0; j < tau_grid.size(); ++j) {
    double w = weight.empty() ? 1.0 : weight[j];
    if (w == 0.0) continue;
    acc += w * map_discrepancy(directional_map(data, tau_grid[j]), delta);
  }
  return acc / wsum;
}

std::vector<PolarSample> polar_profile(const SweepResult& sw, int per_cone) {
  if (per_cone < 1) throw InvalidInput("polar_profile: per_cone must be >= 1");
  for (const Cone& cone : sw.cones)
    if (swept_dim(cone) != 2 || cone.subspace.size() != 0)
      throw InvalidInput("polar_profile: needs a full-circle sweep");

  DirectionalMap map = map_from_sweep(sw);
  std::vector<PolarSample> out;
  out.reserve(sw.cones.size() * static_cast<std::size_t>(per_cone));
  for (const Cone& cone : sw.cones) {
    double span = cone.theta_hi - cone.theta_lo;
    for (int i = 0; i < per_cone; ++i) {
      // inclusive endpoints: the scale suprema sit on the extreme rays
      double theta = per_cone == 1 ? cone.theta_lo + 0.5 * span
                                   : cone.theta_lo + span * i / (per_cone - 1);
      Vector u(2);
      u << std::cos(theta), std::sin(theta);
      double inv = 1.0 / cone.t.dot(u);
      PolarSample s;
      s.angle = std::fmod(theta + kTwoPi, kTwoPi);
      s.lambda_norm = cone.lambda0 * inv / map.lambda_sup;
      s.cnorm_norm = inv / map.cnorm_sup;
      out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PolarSample& a, const PolarSample& b) {
              return a.angle < b.angle;
            });
  return out;
}

}  // namespace dirq
