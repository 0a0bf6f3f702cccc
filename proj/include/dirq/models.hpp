#pragma once

#include <cstdint>
#include <vector>

#include "dirq/types.hpp"

namespace dirq {

struct GaussComponent {
  double weight = 1.0;
  Vector mean;
  Matrix cov;
};

/// Analytic test densities with seeded samplers and the per-axis partial
/// moments the population solvers integrate against.
class DensityModel {
 public:
  enum class Kind {
    ProductUniform,
    ProductGaussian,
    ProductExponential,  // per-axis exponential shifted to mean zero
    GaussianMixture,
  };

  static DensityModel product_uniform(Vector lo, Vector hi);
  static DensityModel product_gaussian(Vector mean, Vector sigma);
  static DensityModel product_centered_exponential(Vector rate);
  static DensityModel gaussian_mixture(std::vector<GaussComponent> comps);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_product() const { return kind_ != Kind::GaussianMixture; }

  double density(const Vector& z) const;
  /// k x n sample matrix, deterministic per seed.
  Matrix sample(int n, std::uint64_t seed) const;

  /// Truncation box for quadrature: exact support when bounded, 8 sigma
  /// per axis otherwise.
  const Vector& box_lo() const { return box_lo_; }
  const Vector& box_hi() const { return box_hi_; }

  Vector mean() const;
  Matrix second_moment() const;  // E[ZZ']

  // Per-axis primitives (product kinds only; throws otherwise):
  double axis_density(int j, double t) const;
  double axis_cdf(int j, double t) const;
  double axis_partial_mean(int j, double t) const;    // E[Z_j I[Z_j <= t]]
  double axis_partial_second(int j, double t) const;  // E[Z_j^2 I[Z_j <= t]]
  double axis_mean(int j) const;
  double axis_second(int j) const;

  const std::vector<GaussComponent>& components() const { return comps_; }

 private:
  DensityModel() = default;

  Kind kind_ = Kind::ProductUniform;
  int dim_ = 0;
  Vector lo_, hi_;       // uniform
  Vector mu_, sigma_;    // gaussian
  Vector rate_;          // exponential
  std::vector<GaussComponent> comps_;
  std::vector<Matrix> chol_;      // cached Cholesky factors (mixture)
  std::vector<Matrix> cov_inv_;   // cached inverses (mixture)
  std::vector<double> norm_;      // cached normalizing constants (mixture)
  Vector box_lo_, box_hi_;
};

/// First and second moments of Z restricted to the open lower halfspace
/// {c'z < a}: closed form for gaussian mixtures, pivot-axis reduction plus
/// adaptive quadrature for product models.
struct HalfspaceMoments {
  double mass = 0.0;  // P[c'Z < a]
  Vector m1;          // E[Z I]
  Matrix m2;          // E[ZZ' I]
};
HalfspaceMoments lower_halfspace_moments(const DensityModel& model,
                                         const Vector& c, double a);

/// Moments of (1, x)'(1, x) weighted by f((a + b'x)u + Gamma x) over
/// x in R^{k-1}: the Hessian integrand of the population problem.
struct HyperplaneMoments {
  double m0 = 0.0;
  Vector m1;  // length k-1
  Matrix m2;  // (k-1) x (k-1)
};
HyperplaneMoments hyperplane_moments(const DensityModel& model, const Vector& u,
                                     const Matrix& gamma, double a,
                                     const Vector& b);

}  // namespace dirq
