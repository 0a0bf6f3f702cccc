#include "dirq/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace dirq {

Matrix J_u(const Matrix& gamma) {
  const int k = static_cast<int>(gamma.rows());
  Matrix J = Matrix::Zero(k + 1, k);
  J(0, 0) = 1.0;
  J.bottomRightCorner(k, k - 1) = gamma;
  return J;
}

std::pair<Matrix, Matrix> hessian(const DensityModel& model,
                                  const DirectionalQuantileFit& pop) {
  const int k = model.dim();
  HyperplaneMoments hp =
      hyperplane_moments(model, pop.u.u, pop.gamma, pop.a, pop.b);
  Matrix H(k, k);
  H(0, 0) = hp.m0;
  if (k > 1) {
    H.row(0).tail(k - 1) = hp.m1.transpose();
    H.col(0).tail(k - 1) = hp.m1;
    H.bottomRightCorner(k - 1, k - 1) = hp.m2;
  }
  Matrix J = J_u(pop.gamma);
  Matrix Hc = J * H * J.transpose();
  return {H, Hc};
}

std::pair<Matrix, Matrix> score_cov(const DensityModel& model,
                                    const DirectionalQuantileFit& pop) {
  const int k = model.dim();
  const double tau = pop.tau;
  HalfspaceMoments mom = lower_halfspace_moments(model, pop.c, pop.a);
  Vector mean = model.mean();
  Matrix second = model.second_moment();

  // scores xi^c = -(tau - I[lower]) (1, Z')'; mean (0, lambda u')',
  // second moment tau^2 E + (1-2tau) E[ . I[lower]]
  Matrix Vc(k + 1, k + 1);
  Vc(0, 0) = tau * (1.0 - tau);
  Vector cross = tau * tau * mean + (1.0 - 2.0 * tau) * mom.m1;
  Vc.row(0).tail(k) = cross.transpose();
  Vc.col(0).tail(k) = cross;
  Vector score_mean = pop.lambda * pop.u.u;
  Vc.bottomRightCorner(k, k) = tau * tau * second +
                               (1.0 - 2.0 * tau) * mom.m2 -
                               score_mean * score_mean.transpose();
  Matrix J = J_u(pop.gamma);
  Matrix V = J.transpose() * Vc * J;
  return {V, Vc};
}

Matrix pseudo_inverse_Hc(const Matrix& H_tau_c, const Direction& u) {
  const int k = u.dim();
  if (H_tau_c.rows() != k + 1 || H_tau_c.cols() != k + 1)
    throw InvalidInput("pseudo_inverse_Hc: shape mismatch");
  Matrix J = J_u(make_orthobasis(u));
  Matrix inner = J.transpose() * H_tau_c * J;
  Eigen::FullPivLU<Matrix> lu(inner);
  if (!lu.isInvertible())
    throw NumericError("pseudo_inverse_Hc: inner matrix is singular");
  return J * lu.inverse() * J.transpose();
}

Matrix sandwich(const Matrix& H, const Matrix& V, bool constrained,
                const Direction& u) {
  if (!constrained) {
    Eigen::FullPivLU<Matrix> lu(H);
    if (!lu.isInvertible()) throw NumericError("sandwich: singular Hessian");
    Matrix Hi = lu.inverse();
    return Hi * V * Hi;
  }
  const int k = u.dim();
  Matrix G = pseudo_inverse_Hc(H, u);
  Vector pdiag = -Vector::Ones(k + 1);
  pdiag(0) = 1.0;
  Matrix P = pdiag.asDiagonal();
  return P * G * V * G * P;
}

std::pair<double, double> lambda_asymptotics(const DensityModel& model,
                                             const DirectionalQuantileFit& pop) {
  const double tau = pop.tau, a = pop.a;
  const Vector& c = pop.c;
  HalfspaceMoments mom = lower_halfspace_moments(model, c, a);
  Vector mean = model.mean();
  Matrix second = model.second_moment();
  double lambda = tau * (c.dot(mean) - a) - (c.dot(mom.m1) - a * mom.mass);
  double e2_all = c.dot(second * c) - 2.0 * a * c.dot(mean) + a * a;
  double e2_low = c.dot(mom.m2 * c) - 2.0 * a * c.dot(mom.m1) + a * a * mom.mass;
  double rho2 = tau * tau * e2_all + (1.0 - 2.0 * tau) * e2_low;
  return {lambda, rho2 - lambda * lambda};
}

AsymptoticCov asymptotic_cov(const DensityModel& model,
                             const DirectionalQuantileFit& pop) {
  AsymptoticCov out;
  std::tie(out.H_tau, out.H_tau_c) = hessian(model, pop);
  std::tie(out.V_tau, out.V_tau_c) = score_cov(model, pop);
  out.sandwich_ab = sandwich(out.H_tau, out.V_tau, false, pop.u);
  out.sandwich_ac = sandwich(out.H_tau_c, out.V_tau_c, true, pop.u);
  out.lambda_var = lambda_asymptotics(model, pop).second;
  return out;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// avoid integer n*tau, which the solver rejects as nonunique
int adjust_n(int n, double tau) {
  while (std::abs(n * tau - std::round(n * tau)) < 1e-9) ++n;
  return n;
}

}  // namespace

ValidationReport monte_carlo_validate(const DensityModel& model, double tau,
                                      const Direction& u, int n, int reps,
                                      std::uint64_t seed) {
  const int k = model.dim();
  DirectionalQuantileFit pop = population_fit(model, tau, u);
  AsymptoticCov acov = asymptotic_cov(model, pop);
  Eigen::FullPivLU<Matrix> Hlu(acov.H_tau);
  Matrix Hinv = Hlu.inverse();
  Matrix J = J_u(pop.gamma);

  ValidationReport rep;
  rep.tau = tau;
  for (int j = 0; j < k; ++j) rep.u.push_back(u.u(j));
  rep.n = adjust_n(n, tau);
  rep.reps = reps;

  double se_a = std::sqrt(acov.sandwich_ab(0, 0) / rep.n);
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    Matrix Z = model.sample(rep.n, seed + 1000003ULL * (r + 1));
    DirectionalQuantileFit f = fit(Z, tau, u);
    if (std::abs(f.a - pop.a) <= 1.959963984540054 * se_a) ++covered;
  }
  rep.coverage_a = static_cast<double>(covered) / reps;

  // Bahadur remainder and consistency across an n grid
  rep.bahadur_n = {adjust_n(500, tau), adjust_n(2000, tau), adjust_n(8000, tau)};
  const int breps = std::min(reps, 200);
  for (int ni : rep.bahadur_n) {
    std::vector<double> rem, err;
    for (int r = 0; r < breps; ++r) {
      Matrix Z = model.sample(ni, seed ^ (7777ULL * ni) ^ (13ULL * (r + 1)));
      DirectionalQuantileFit f = fit(Z, tau, u);
      Vector theta_hat(k), theta(k);
      theta_hat(0) = f.a;
      theta(0) = pop.a;
      if (k > 1) {
        theta_hat.tail(k - 1) = f.b;
        theta.tail(k - 1) = pop.b;
      }
      // score sum at the population coefficients
      Vector score = Vector::Zero(k + 1);
      for (int i = 0; i < ni; ++i) {
        double r0 = pop.c.dot(Z.col(i)) - pop.a;
        double w = -(tau - (r0 < 0 ? 1.0 : 0.0));
        score(0) += w;
        score.tail(k) += w * Z.col(i);
      }
      Vector bahadur = std::sqrt(static_cast<double>(ni)) * (theta_hat - theta) +
                       Hinv * (J.transpose() * score) / std::sqrt(static_cast<double>(ni));
      rem.push_back(bahadur.norm());
      err.push_back((theta_hat - theta).norm());
    }
    rep.bahadur_median.push_back(median(rem));
    rep.err_median.push_back(median(err));
  }
  rep.bahadur_decreasing = true;
  for (std::size_t i = 1; i < rep.bahadur_median.size(); ++i)
    if (rep.bahadur_median[i] >= rep.bahadur_median[i - 1])
      rep.bahadur_decreasing = false;
  return rep;
}

std::string ValidationReport::to_json() const {
  nlohmann::json j;
  j["tau"] = tau;
  j["u"] = u;
  j["n"] = n;
  j["reps"] = reps;
  j["coverage_a"] = coverage_a;
  j["bahadur_n"] = bahadur_n;
  j["bahadur_median"] = bahadur_median;
  j["err_median"] = err_median;
  j["bahadur_decreasing"] = bahadur_decreasing;
  return j.dump(2);
}

}  // namespace dirq
