#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dirq/fit.hpp"
#include "dirq/models.hpp"

namespace dirq {

struct AsymptoticCov {
  Matrix H_tau;        // k x k Hessian of the (a,b) objective
  Matrix H_tau_c;      // (k+1) x (k+1) constrained-parameterization Hessian
  Matrix V_tau;        // k x k score covariance
  Matrix V_tau_c;      // (k+1) x (k+1)
  Matrix sandwich_ab;  // H^-1 V H^-1
  Matrix sandwich_ac;  // P G V^c G P
  double lambda_var = 0.0;
};

/// (k+1) x k block-diagonal matrix with blocks 1 and gamma.
Matrix J_u(const Matrix& gamma);

/// Population Hessians for both parameterizations, assembled from the
/// hyperplane moments so that J' H^c J = H holds by construction.
std::pair<Matrix, Matrix> hessian(const DensityModel& model,
                                  const DirectionalQuantileFit& pop);

/// Score covariances. The top-left entry of V^c is tau(1-tau) exactly;
/// the rest comes from indicator-weighted halfspace moments.
std::pair<Matrix, Matrix> score_cov(const DensityModel& model,
                                    const DirectionalQuantileFit& pop);

/// Moore-Penrose pseudoinverse of the rank-k constrained Hessian:
/// G = J (J' H^c J)^{-1} J'.
Matrix pseudo_inverse_Hc(const Matrix& H_tau_c, const Direction& u);

/// Asymptotic covariance of the coefficient estimates. Unconstrained:
/// H^{-1} V H^{-1} with (H, V) = (H_tau, V_tau). Constrained: P G V^c G P
/// with (H, V) = (H_tau_c, V_tau_c).
Matrix sandwich(const Matrix& H, const Matrix& V, bool constrained,
                const Direction& u);

/// lambda_tau and the asymptotic variance of sqrt(n)(lambda^(n) - lambda).
std::pair<double, double> lambda_asymptotics(const DensityModel& model,
                                             const DirectionalQuantileFit& pop);

/// Everything at once.
AsymptoticCov asymptotic_cov(const DensityModel& model,
                             const DirectionalQuantileFit& pop);

struct ValidationReport {
  double tau = 0.0;
  std::vector<double> u;
  int n = 0;
  int reps = 0;
  double coverage_a = 0.0;        // 95% sandwich interval coverage for a
  std::vector<int> bahadur_n;     // n grid for the remainder check
  std::vector<double> bahadur_median;  // remainder norms, should shrink
  std::vector<double> err_median;      // median ||theta_hat - theta||
  bool bahadur_decreasing = false;

  std::string to_json() const;
};

/// Seeded Monte Carlo check of Theorem-level behavior: interval coverage at
/// the requested n, Bahadur remainder and consistency across an n grid.
ValidationReport monte_carlo_validate(const DensityModel& model, double tau,
                                      const Direction& u, int n, int reps,
                                      std::uint64_t seed);

}  // namespace dirq
