#include "dirq/fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dirq {

namespace {

DirectionalQuantileFit fit_lp(const QuantileLP& lp, const SolveOptions& opts) {
  const double tau = lp.tau;
  const Direction& u = lp.u;
  auto [primal, dual] = solve(lp, opts);
  auto rep = verify_certificate(lp, primal, dual);
  if (!rep.xi_in_box || !rep.sandwich_ok)
    throw NumericError("fit: solver output failed its optimality certificate");

  DirectionalQuantileFit f(tau, u, lp.gamma);
  f.a = primal.a;
  f.b = primal.b;
  f.c = primal.c;
  f.lambda = dual.lambda;
  f.mu = dual.mu;
  f.basis = primal.basis;
  f.N = primal.N;
  f.P = primal.P;
  f.Z0 = primal.Z0;
  f.nonunique = primal.nonunique;
  return f;
}

}  // namespace

DirectionalQuantileFit fit(const Matrix& data, double tau, const Direction& u,
                           const SolveOptions& opts) {
  return fit_lp(QuantileLP(data, u, tau), opts);
}

DirectionalQuantileFit fit(const Matrix& data, double tau, const Direction& u,
                           const Matrix& gamma, const SolveOptions& opts) {
  return fit_lp(QuantileLP(data, u, tau, gamma), opts);
}

std::pair<Halfspace, Halfspace> halfspaces(const DirectionalQuantileFit& f) {
  Halfspace lower{Hyperplane{f.c, f.a}, Side::LowerOpen};
  Halfspace upper{Hyperplane{f.c, f.a}, Side::UpperClosed};
  return {lower, upper};
}

Hyperplane km_projection_quantile(const Matrix& data, double tau,
                                  const Vector& u) {
  if (data.cols() < 1) throw InvalidInput("km_projection_quantile: no data");
  if (!(tau > 0.0 && tau < 1.0))
    throw InvalidInput("km_projection_quantile: tau must be in (0,1)");
  Direction d(u);
  const int n = static_cast<int>(data.cols());
  std::vector<double> proj(n);
  for (int i = 0; i < n; ++i) proj[i] = d.u.dot(data.col(i));
  std::sort(proj.begin(), proj.end());
  // lower-semicontinuous inverse: smallest value with F(value) >= tau
  int idx = static_cast<int>(std::ceil(n * tau - 1e-12));
  idx = std::clamp(idx, 1, n);
  return Hyperplane{d.u, proj[idx - 1]};
}

DirectionalQuantileFit population_fit(const DensityModel& model, double tau,
                                      const Direction& u) {
  const int k = model.dim();
  if (u.dim() != k) throw InvalidInput("population_fit: dimension mismatch");
  if (!(tau > 0.0 && tau < 1.0))
    throw InvalidInput("population_fit: tau must be in (0,1)");
  Matrix gamma = make_orthobasis(u);
  Vector mean = model.mean();

  // initial intercept: bisect the projection mass at b = 0
  double slo = 0.0, shi = 0.0;
  for (int j = 0; j < k; ++j) {
    slo += std::min(u.u(j) * model.box_lo()(j), u.u(j) * model.box_hi()(j));
    shi += std::max(u.u(j) * model.box_lo()(j), u.u(j) * model.box_hi()(j));
  }
  double a = 0.0;
  {
    double lo = slo, hi = shi;
    for (int it = 0; it < 80; ++it) {
      a = 0.5 * (lo + hi);
      if (lower_halfspace_moments(model, u.u, a).mass < tau) lo = a;
      else hi = a;
    }
  }
  Vector b = Vector::Zero(k - 1);

  const double gtol = 1e-9;
  Vector c = u.u;
  HalfspaceMoments mom = lower_halfspace_moments(model, c, a);
  auto grad = [&](const HalfspaceMoments& m) {
    Vector g(k);
    g(0) = m.mass - tau;
    if (k > 1) g.tail(k - 1) = gamma.transpose() * (m.m1 - tau * mean);
    return g;
  };
  Vector G = grad(mom);

  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    if (G.lpNorm<Eigen::Infinity>() < gtol) {
      converged = true;
      break;
    }
    HyperplaneMoments hp = hyperplane_moments(model, u.u, gamma, a, b);
    Matrix H(k, k);
    H(0, 0) = hp.m0;
    if (k > 1) {
      H.row(0).tail(k - 1) = hp.m1.transpose();
      H.col(0).tail(k - 1) = hp.m1;
      H.bottomRightCorner(k - 1, k - 1) = hp.m2;
    }
    Eigen::JacobiSVD<Matrix> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    double smin = svd.singularValues()(k - 1), smax = svd.singularValues()(0);
    if (smin < 1e-10 * std::max(1.0, smax)) {
      std::ostringstream msg;
      msg << "population_fit: singular Hessian (condition "
          << (smin > 0 ? smax / smin : 1e300)
          << "); the quantile direction is degenerate at tau=" << tau;
      throw DegeneracyError(msg.str());
    }
    Vector delta = svd.solve(G);

    double alpha = 1.0;
    bool stepped = false;
    for (int half = 0; half < 40; ++half) {
      double a2 = a - alpha * delta(0);
      Vector b2 = b - alpha * delta.tail(k - 1);
      Vector c2 = u.u - gamma * b2;
      HalfspaceMoments m2 = lower_halfspace_moments(model, c2, a2);
      Vector G2 = grad(m2);
      if (G2.norm() < G.norm() * (1.0 - 0.25 * alpha) + 1e-14) {
        a = a2;
        b = b2;
        c = c2;
        mom = m2;
        G = G2;
        stepped = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!stepped)
      throw NumericError("population_fit: Newton stalled, gradient norm " +
                         std::to_string(G.norm()));
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "population_fit: no convergence; residuals " << G.transpose();
    throw NumericError(msg.str());
  }

  DirectionalQuantileFit f(tau, u, gamma);
  f.a = a;
  f.b = b;
  f.c = c;
  f.lambda = tau * (c.dot(mean) - a) - (c.dot(mom.m1) - a * mom.mass);

  // the mass centers of the two halfspaces and the overall mean must be
  // collinear along u, with gap lambda/(tau(1-tau))
  Vector upper_center = (mean - mom.m1) / (1.0 - tau);
  Vector lower_center = mom.m1 / tau;
  Vector gap = upper_center - lower_center -
               f.lambda / (tau * (1.0 - tau)) * u.u;
  if (gap.lpNorm<Eigen::Infinity>() > 1e-6)
    throw NumericError("population_fit: mass-center collinearity check failed");
  return f;
}

}  // namespace dirq
