#include "dirq/models.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "dirq/geometry.hpp"

namespace dirq {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }
double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// --- Gauss-Legendre nodes on [-1,1] by Newton iteration -------------------

struct GlRule {
  std::vector<double> x, w;
};

GlRule gauss_legendre(int n) {
  GlRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GlRule& gl64() {
  static const GlRule r = gauss_legendre(64);
  return r;
}
const GlRule& gl128() {
  static const GlRule r = gauss_legendre(128);
  return r;
}

// --- adaptive Simpson on vector-valued integrands -------------------------

using VecFn = std::function<Vector(double)>;

Vector simp(const Vector& fa, const Vector& fm, const Vector& fb, double h) {
  return (h / 6.0) * (fa + 4.0 * fm + fb);
}

void adasimp_rec(const VecFn& f, double a, double b, const Vector& fa,
                 const Vector& fm, const Vector& fb, const Vector& whole,
                 double tol, int depth, Vector& acc) {
  double m = 0.5 * (a + b);
  Vector fl = f(0.5 * (a + m)), fr = f(0.5 * (m + b));
  Vector left = simp(fa, fl, fm, m - a);
  Vector right = simp(fm, fr, fb, b - m);
  Vector delta = left + right - whole;
  if (depth <= 0 || delta.lpNorm<Eigen::Infinity>() < 15.0 * tol) {
    acc += left + right + delta / 15.0;
    return;
  }
  adasimp_rec(f, a, m, fa, fl, fm, left, tol * 0.5, depth - 1, acc);
  adasimp_rec(f, m, b, fm, fr, fb, right, tol * 0.5, depth - 1, acc);
}

Vector adaptive_simpson(const VecFn& f, double a, double b, double tol,
                        int depth = 28) {
  Vector fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  Vector whole = simp(fa, fm, fb, b - a);
  Vector acc = Vector::Zero(fa.size());
  adasimp_rec(f, a, b, fa, fm, fb, whole, tol, depth, acc);
  return acc;
}

}  // namespace

// --- constructors ----------------------------------------------------------

DensityModel DensityModel::product_uniform(Vector lo, Vector hi) {
  if (lo.size() != hi.size() || lo.size() < 1)
    throw InvalidInput("product_uniform: bad bounds");
  for (int j = 0; j < lo.size(); ++j)
    if (!(lo(j) < hi(j))) throw InvalidInput("product_uniform: lo >= hi");
  DensityModel m;
  m.kind_ = Kind::ProductUniform;
  m.dim_ = static_cast<int>(lo.size());
  m.lo_ = std::move(lo);
  m.hi_ = std::move(hi);
  m.box_lo_ = m.lo_;
  m.box_hi_ = m.hi_;
  return m;
}

DensityModel DensityModel::product_gaussian(Vector mean, Vector sigma) {
  if (mean.size() != sigma.size() || mean.size() < 1)
    throw InvalidInput("product_gaussian: bad parameters");
  for (int j = 0; j < sigma.size(); ++j)
    if (!(sigma(j) > 0)) throw InvalidInput("product_gaussian: sigma <= 0");
  DensityModel m;
  m.kind_ = Kind::ProductGaussian;
  m.dim_ = static_cast<int>(mean.size());
  m.mu_ = std::move(mean);
  m.sigma_ = std::move(sigma);
  m.box_lo_ = m.mu_ - 8.0 * m.sigma_;
  m.box_hi_ = m.mu_ + 8.0 * m.sigma_;
  return m;
}

DensityModel DensityModel::product_centered_exponential(Vector rate) {
  if (rate.size() < 1) throw InvalidInput("product_centered_exponential: empty");
  for (int j = 0; j < rate.size(); ++j)
    if (!(rate(j) > 0)) throw InvalidInput("product_centered_exponential: rate <= 0");
  DensityModel m;
  m.kind_ = Kind::ProductExponential;
  m.dim_ = static_cast<int>(rate.size());
  m.rate_ = std::move(rate);
  m.box_lo_ = -m.rate_.cwiseInverse();
  m.box_hi_ = 30.0 * m.rate_.cwiseInverse() + m.box_lo_;
  return m;
}

DensityModel DensityModel::gaussian_mixture(std::vector<GaussComponent> comps) {
  if (comps.empty()) throw InvalidInput("gaussian_mixture: no components");
  DensityModel m;
  m.kind_ = Kind::GaussianMixture;
  m.dim_ = static_cast<int>(comps[0].mean.size());
  double wsum = 0.0;
  m.box_lo_ = Vector::Constant(m.dim_, 1e300);
  m.box_hi_ = Vector::Constant(m.dim_, -1e300);
  for (auto& c : comps) {
    if (c.mean.size() != m.dim_ || c.cov.rows() != m.dim_ || c.cov.cols() != m.dim_)
      throw InvalidInput("gaussian_mixture: shape mismatch");
    if (!(c.weight > 0)) throw InvalidInput("gaussian_mixture: weight <= 0");
    wsum += c.weight;
    Eigen::LLT<Matrix> llt(c.cov);
    if (llt.info() != Eigen::Success)
      throw InvalidInput("gaussian_mixture: covariance not positive definite");
    m.chol_.push_back(llt.matrixL());
    m.cov_inv_.push_back(llt.solve(Matrix::Identity(m.dim_, m.dim_)));
    double logdet = 0.0;
    for (int j = 0; j < m.dim_; ++j) logdet += 2.0 * std::log(m.chol_.back()(j, j));
    m.norm_.push_back(std::pow(2.0 * M_PI, -0.5 * m.dim_) * std::exp(-0.5 * logdet));
    for (int j = 0; j < m.dim_; ++j) {
      double s = std::sqrt(c.cov(j, j));
      m.box_lo_(j) = std::min(m.box_lo_(j), c.mean(j) - 8.0 * s);
      m.box_hi_(j) = std::max(m.box_hi_(j), c.mean(j) + 8.0 * s);
    }
  }
  for (auto& c : comps) c.weight /= wsum;
  m.comps_ = std::move(comps);
  return m;
}

// --- pointwise density, sampling, raw moments ------------------------------

double DensityModel::axis_density(int j, double t) const {
  switch (kind_) {
    case Kind::ProductUniform:
      return (t >= lo_(j) && t <= hi_(j)) ? 1.0 / (hi_(j) - lo_(j)) : 0.0;
    case Kind::ProductGaussian:
      return norm_pdf((t - mu_(j)) / sigma_(j)) / sigma_(j);
    case Kind::ProductExponential: {
      double l = rate_(j), y = t + 1.0 / l;
      return y >= 0 ? l * std::exp(-l * y) : 0.0;
    }
    default:
      throw InvalidInput("axis_density: not a product model");
  }
}

double DensityModel::axis_cdf(int j, double t) const {
  switch (kind_) {
    case Kind::ProductUniform:
      if (t <= lo_(j)) return 0.0;
      if (t >= hi_(j)) return 1.0;
      return (t - lo_(j)) / (hi_(j) - lo_(j));
    case Kind::ProductGaussian:
      return norm_cdf((t - mu_(j)) / sigma_(j));
    case Kind::ProductExponential: {
      double l = rate_(j), y = t + 1.0 / l;
      return y >= 0 ? 1.0 - std::exp(-l * y) : 0.0;
    }
    default:
      throw InvalidInput("axis_cdf: not a product model");
  }
}

double DensityModel::axis_partial_mean(int j, double t) const {
  switch (kind_) {
    case Kind::ProductUniform: {
      if (t <= lo_(j)) return 0.0;
      double tt = std::min(t, hi_(j));
      return (tt * tt - lo_(j) * lo_(j)) / (2.0 * (hi_(j) - lo_(j)));
    }
    case Kind::ProductGaussian: {
      double al = (t - mu_(j)) / sigma_(j);
      return mu_(j) * norm_cdf(al) - sigma_(j) * norm_pdf(al);
    }
    case Kind::ProductExponential: {
      double l = rate_(j), y = t + 1.0 / l;
      if (y <= 0) return 0.0;
      return -y * std::exp(-l * y);
    }
    default:
      throw InvalidInput("axis_partial_mean: not a product model");
  }
}

double DensityModel::axis_partial_second(int j, double t) const {
  switch (kind_) {
    case Kind::ProductUniform: {
      if (t <= lo_(j)) return 0.0;
      double tt = std::min(t, hi_(j));
      return (tt * tt * tt - lo_(j) * lo_(j) * lo_(j)) / (3.0 * (hi_(j) - lo_(j)));
    }
    case Kind::ProductGaussian: {
      double al = (t - mu_(j)) / sigma_(j);
      return (mu_(j) * mu_(j) + sigma_(j) * sigma_(j)) * norm_cdf(al) -
             sigma_(j) * (t + mu_(j)) * norm_pdf(al);
    }
    case Kind::ProductExponential: {
      double l = rate_(j), y = t + 1.0 / l;
      if (y <= 0) return 0.0;
      double e = std::exp(-l * y);
      double ey2 = 2.0 / (l * l) - e * (y * y + 2.0 * y / l + 2.0 / (l * l));
      double ey1 = 1.0 / l - e * (y + 1.0 / l);
      double f = 1.0 - e;
      return ey2 - (2.0 / l) * ey1 + f / (l * l);
    }
    default:
      throw InvalidInput("axis_partial_second: not a product model");
  }
}

double DensityModel::axis_mean(int j) const {
  switch (kind_) {
    case Kind::ProductUniform:
      return 0.5 * (lo_(j) + hi_(j));
    case Kind::ProductGaussian:
      return mu_(j);
    case Kind::ProductExponential:
      return 0.0;
    default:
      throw InvalidInput("axis_mean: not a product model");
  }
}

double DensityModel::axis_second(int j) const {
  switch (kind_) {
    case Kind::ProductUniform: {
      double l = lo_(j), h = hi_(j);
      return (h * h * h - l * l * l) / (3.0 * (h - l));
    }
    case Kind::ProductGaussian:
      return mu_(j) * mu_(j) + sigma_(j) * sigma_(j);
    case Kind::ProductExponential:
      return 1.0 / (rate_(j) * rate_(j));
    default:
      throw InvalidInput("axis_second: not a product model");
  }
}

double DensityModel::density(const Vector& z) const {
  if (z.size() != dim_) throw InvalidInput("density: dimension mismatch");
  if (kind_ == Kind::GaussianMixture) {
    double acc = 0.0;
    for (std::size_t c = 0; c < comps_.size(); ++c) {
      Vector d = z - comps_[c].mean;
      acc += comps_[c].weight * norm_[c] * std::exp(-0.5 * d.dot(cov_inv_[c] * d));
    }
    return acc;
  }
  double acc = 1.0;
  for (int j = 0; j < dim_; ++j) acc *= axis_density(j, z(j));
  return acc;
}

Matrix DensityModel::sample(int n, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  Matrix Z(dim_, n);
  if (kind_ == Kind::GaussianMixture) {
    std::vector<double> w;
    for (const auto& c : comps_) w.push_back(c.weight);
    std::discrete_distribution<int> pick(w.begin(), w.end());
    std::normal_distribution<double> gauss;
    for (int i = 0; i < n; ++i) {
      int c = pick(rng);
      Vector e(dim_);
      for (int j = 0; j < dim_; ++j) e(j) = gauss(rng);
      Z.col(i) = comps_[c].mean + chol_[c] * e;
    }
    return Z;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss;
  std::exponential_distribution<double> expo;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim_; ++j) {
      switch (kind_) {
        case Kind::ProductUniform:
          Z(j, i) = lo_(j) + (hi_(j) - lo_(j)) * unif(rng);
          break;
        case Kind::ProductGaussian:
          Z(j, i) = mu_(j) + sigma_(j) * gauss(rng);
          break;
        case Kind::ProductExponential:
          Z(j, i) = expo(rng) / rate_(j) - 1.0 / rate_(j);
          break;
        default:
          break;
      }
    }
  return Z;
}

Vector DensityModel::mean() const {
  if (kind_ == Kind::GaussianMixture) {
    Vector m = Vector::Zero(dim_);
    for (const auto& c : comps_) m += c.weight * c.mean;
    return m;
  }
  Vector m(dim_);
  for (int j = 0; j < dim_; ++j) m(j) = axis_mean(j);
  return m;
}

Matrix DensityModel::second_moment() const {
  if (kind_ == Kind::GaussianMixture) {
    Matrix s = Matrix::Zero(dim_, dim_);
    for (const auto& c : comps_)
      s += c.weight * (c.cov + c.mean * c.mean.transpose());
    return s;
  }
  Vector m = mean();
  Matrix s = m * m.transpose();
  for (int j = 0; j < dim_; ++j) s(j, j) = axis_second(j);
  return s;
}

// --- lower halfspace moments ----------------------------------------------

namespace {

HalfspaceMoments gaussian_lower_moments(const std::vector<GaussComponent>& comps,
                                        const Vector& c, double a) {
  const int k = static_cast<int>(c.size());
  HalfspaceMoments out;
  out.m1 = Vector::Zero(k);
  out.m2 = Matrix::Zero(k, k);
  for (const auto& comp : comps) {
    double s2 = c.dot(comp.cov * c);
    double s = std::sqrt(std::max(s2, 1e-300));
    double al = (a - c.dot(comp.mean)) / s;
    double Phi = norm_cdf(al), phi = norm_pdf(al);
    Vector g = comp.cov * c / s;
    const Vector& mu = comp.mean;
    out.mass += comp.weight * Phi;
    out.m1 += comp.weight * (mu * Phi - g * phi);
    out.m2 += comp.weight *
              (Phi * (comp.cov + mu * mu.transpose()) -
               phi * (mu * g.transpose() + g * mu.transpose()) -
               al * phi * (g * g.transpose()));
  }
  return out;
}

}  // namespace

HalfspaceMoments lower_halfspace_moments(const DensityModel& model,
                                         const Vector& c, double a) {
  const int k = model.dim();
  if (c.size() != k) throw InvalidInput("lower_halfspace_moments: dim mismatch");

  if (model.kind() == DensityModel::Kind::GaussianMixture)
    return gaussian_lower_moments(model.components(), c, a);
  if (model.kind() == DensityModel::Kind::ProductGaussian) {
    GaussComponent comp;
    comp.weight = 1.0;
    comp.mean = model.mean();
    comp.cov = Matrix::Zero(k, k);
    for (int j = 0; j < k; ++j) {
      double s = std::sqrt(model.axis_second(j) - comp.mean(j) * comp.mean(j));
      comp.cov(j, j) = s * s;
    }
    return gaussian_lower_moments({comp}, c, a);
  }

  // product model: closed form along the pivot axis, adaptive quadrature
  // over the rest
  int p = 0;
  c.cwiseAbs().maxCoeff(&p);
  if (std::abs(c(p)) < 1e-14)
    throw InvalidInput("lower_halfspace_moments: zero normal");
  std::vector<int> outer;
  for (int j = 0; j < k; ++j)
    if (j != p) outer.push_back(j);

  // flat layout: [mass, m1(k), m2(k*k)]
  const int m = 1 + k + k * k;
  std::vector<double> z(k, 0.0);

  std::function<Vector(std::size_t)> level = [&](std::size_t lvl) -> Vector {
    if (lvl == outer.size()) {
      double rest = 0.0;
      for (int j : outer) rest += c(j) * z[j];
      double t = (a - rest) / c(p);
      double F, M1, S2;
      if (c(p) > 0) {
        F = model.axis_cdf(p, t);
        M1 = model.axis_partial_mean(p, t);
        S2 = model.axis_partial_second(p, t);
      } else {
        F = 1.0 - model.axis_cdf(p, t);
        M1 = model.axis_mean(p) - model.axis_partial_mean(p, t);
        S2 = model.axis_second(p) - model.axis_partial_second(p, t);
      }
      Vector v = Vector::Zero(m);
      v(0) = F;
      for (int j = 0; j < k; ++j) v(1 + j) = (j == p) ? M1 : z[j] * F;
      for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s) {
          double val;
          if (r == p && s == p) val = S2;
          else if (r == p) val = z[s] * M1;
          else if (s == p) val = z[r] * M1;
          else val = z[r] * z[s] * F;
          v(1 + k + r * k + s) = val;
        }
      return v;
    }
    int axis = outer[lvl];
    double tol = (lvl == 0) ? 1e-11 : 1e-12;
    return adaptive_simpson(
        [&](double x) -> Vector {
          z[axis] = x;
          return model.axis_density(axis, x) * level(lvl + 1);
        },
        model.box_lo()(axis), model.box_hi()(axis), tol);
  };

  Vector flat = level(0);
  HalfspaceMoments out;
  out.mass = flat(0);
  out.m1 = flat.segment(1, k);
  out.m2 = Matrix(k, k);
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s) out.m2(r, s) = flat(1 + k + r * k + s);
  return out;
}

// --- hyperplane moments ---------------------------------------------------

namespace {

HyperplaneMoments gaussian_hyperplane_moments(
    const std::vector<GaussComponent>& comps, const Vector& u,
    const Matrix& gamma, double a, const Vector& b) {
  const int k = static_cast<int>(u.size());
  HyperplaneMoments out;
  out.m1 = Vector::Zero(k - 1);
  out.m2 = Matrix::Zero(std::max(k - 1, 0), std::max(k - 1, 0));
  Matrix A = u * b.transpose() + gamma;  // k x (k-1)
  for (const auto& comp : comps) {
    Eigen::LLT<Matrix> llt(comp.cov);
    Matrix inv = llt.solve(Matrix::Identity(k, k));
    double logdet = 0.0;
    {
      Matrix L = llt.matrixL();
      for (int j = 0; j < k; ++j) logdet += 2.0 * std::log(L(j, j));
    }
    Vector m0 = a * u - comp.mean;
    if (k == 1) {
      double val = comp.weight * std::pow(2 * M_PI, -0.5) *
                   std::exp(-0.5 * logdet - 0.5 * m0.dot(inv * m0));
      out.m0 += val;
      continue;
    }
    Matrix B = A.transpose() * inv * A;
    Eigen::LLT<Matrix> lltB(B);
    Vector rhs = A.transpose() * inv * m0;
    Vector xbar = -lltB.solve(rhs);
    double logdetB = 0.0;
    {
      Matrix LB = lltB.matrixL();
      for (int j = 0; j < k - 1; ++j) logdetB += 2.0 * std::log(LB(j, j));
    }
    double quad = m0.dot(inv * m0) + rhs.dot(xbar);  // = m0'S^-1m0 - xbar'B xbar
    double c0 = comp.weight * std::pow(2 * M_PI, -0.5) *
                std::exp(-0.5 * (logdet + logdetB) - 0.5 * quad);
    Matrix Binv = lltB.solve(Matrix::Identity(k - 1, k - 1));
    out.m0 += c0;
    out.m1 += c0 * xbar;
    out.m2 += c0 * (Binv + xbar * xbar.transpose());
  }
  return out;
}

// x-interval on which the affine line a*u + x*A stays inside the box
bool clip_line_to_box(const Vector& base, const Vector& A, const Vector& lo,
                      const Vector& hi, double& x0, double& x1) {
  x0 = -1e300;
  x1 = 1e300;
  for (int j = 0; j < base.size(); ++j) {
    if (std::abs(A(j)) < 1e-14) {
      if (base(j) < lo(j) - 1e-12 || base(j) > hi(j) + 1e-12) return false;
      continue;
    }
    double t0 = (lo(j) - base(j)) / A(j), t1 = (hi(j) - base(j)) / A(j);
    if (t0 > t1) std::swap(t0, t1);
    x0 = std::max(x0, t0);
    x1 = std::min(x1, t1);
  }
  return x0 < x1;
}

}  // namespace

HyperplaneMoments hyperplane_moments(const DensityModel& model, const Vector& u,
                                     const Matrix& gamma, double a,
                                     const Vector& b) {
  const int k = model.dim();
  if (u.size() != k || gamma.rows() != k || gamma.cols() != k - 1 ||
      b.size() != k - 1)
    throw InvalidInput("hyperplane_moments: shape mismatch");

  if (model.kind() == DensityModel::Kind::GaussianMixture)
    return gaussian_hyperplane_moments(model.components(), u, gamma, a, b);
  if (model.kind() == DensityModel::Kind::ProductGaussian) {
    GaussComponent comp;
    comp.weight = 1.0;
    comp.mean = model.mean();
    comp.cov = Matrix::Zero(k, k);
    for (int j = 0; j < k; ++j)
      comp.cov(j, j) = model.axis_second(j) - comp.mean(j) * comp.mean(j);
    return gaussian_hyperplane_moments({comp}, u, gamma, a, b);
  }

  HyperplaneMoments out;
  out.m1 = Vector::Zero(std::max(k - 1, 0));
  out.m2 = Matrix::Zero(std::max(k - 1, 0), std::max(k - 1, 0));

  if (k == 1) {
    out.m0 = model.density(a * u);
    return out;
  }

  Matrix A = u * b.transpose() + gamma;  // k x (k-1)
  Vector base = a * u;

  if (k == 2) {
    double x0, x1;
    if (!clip_line_to_box(base, A.col(0), model.box_lo(), model.box_hi(), x0, x1))
      return out;
    auto eval = [&](const GlRule& rule) {
      Vector acc = Vector::Zero(3);
      for (std::size_t q = 0; q < rule.x.size(); ++q) {
        double x = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * rule.x[q];
        double w = 0.5 * (x1 - x0) * rule.w[q];
        double f = model.density(base + x * A.col(0));
        acc(0) += w * f;
        acc(1) += w * f * x;
        acc(2) += w * f * x * x;
      }
      return acc;
    };
    Vector coarse = eval(gl64()), fine = eval(gl128());
    if ((coarse - fine).lpNorm<Eigen::Infinity>() > 1e-7)
      throw NumericError("hyperplane_moments: quadrature did not converge");
    out.m0 = fine(0);
    out.m1(0) = fine(1);
    out.m2(0, 0) = fine(2);
    return out;
  }

  if (k == 3) {
    // clip the x-plane to the box: 6 halfplanes lo <= base + A x <= hi
    std::vector<Halfspace> cuts;
    for (int j = 0; j < 3; ++j) {
      Vector n = A.row(j).transpose();
      if (n.norm() < 1e-13) {
        if (base(j) < model.box_lo()(j) - 1e-12 ||
            base(j) > model.box_hi()(j) + 1e-12)
          return out;
        continue;
      }
      cuts.push_back({Hyperplane{n, model.box_lo()(j) - base(j)}, Side::UpperClosed});
      cuts.push_back({Hyperplane{-n, base(j) - model.box_hi()(j)}, Side::UpperClosed});
    }
    ConvexPolytope poly = intersect_halfspaces(cuts);
    if (poly.empty || poly.degenerate || poly.vertices.size() < 3) return out;
    auto verts = poly.ordered_vertices_ccw();
    Vector cen = Vector::Zero(2);
    for (const auto& v : verts) cen += v;
    cen /= static_cast<double>(verts.size());

    auto tri_quad = [&](const Vector& v0, const Vector& v1, const Vector& v2,
                        int order) {
      GlRule rule = gauss_legendre(order);
      double det = std::abs((v1(0) - v0(0)) * (v2(1) - v0(1)) -
                            (v1(1) - v0(1)) * (v2(0) - v0(0)));
      Vector acc = Vector::Zero(6);  // m0, m1x, m1y, mxx, mxy, myy
      for (std::size_t qi = 0; qi < rule.x.size(); ++qi)
        for (std::size_t qj = 0; qj < rule.x.size(); ++qj) {
          double s = 0.5 * (rule.x[qi] + 1.0);  // [0,1]
          double t = 0.5 * (rule.x[qj] + 1.0);
          Vector x = (1.0 - s) * v0 + s * ((1.0 - t) * v1 + t * v2);
          double w = 0.25 * rule.w[qi] * rule.w[qj] * det * s;
          double f = model.density(base + A * x);
          acc(0) += w * f;
          acc(1) += w * f * x(0);
          acc(2) += w * f * x(1);
          acc(3) += w * f * x(0) * x(0);
          acc(4) += w * f * x(0) * x(1);
          acc(5) += w * f * x(1) * x(1);
        }
      return acc;
    };

    Vector coarse = Vector::Zero(6), fine = Vector::Zero(6);
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const Vector& v1 = verts[i];
      const Vector& v2 = verts[(i + 1) % verts.size()];
      coarse += tri_quad(cen, v1, v2, 16);
      fine += tri_quad(cen, v1, v2, 24);
    }
    if ((coarse - fine).lpNorm<Eigen::Infinity>() > 1e-7)
      throw NumericError("hyperplane_moments: quadrature did not converge");
    out.m0 = fine(0);
    out.m1 << fine(1), fine(2);
    out.m2 << fine(3), fine(4), fine(4), fine(5);
    return out;
  }

  throw InvalidInput("hyperplane_moments: product models support k <= 3");
}

}  // namespace dirq
