#include "dirq/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "dirq/lp.hpp"

namespace dirq {

namespace {

constexpr double kFacetEps = 1e-7;

std::string dir_string(const Vector& u) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u(i);
  os << ")";
  return os.str();
}

// Restricted sweeps parameterize directions as u = E s with E orthonormal;
// an empty E stands for the identity (full sphere).
Vector embed(const Matrix& E, const Vector& s) {
  return E.size() ? Vector(E * s) : s;
}

Vector project(const Matrix& E, const Vector& g) {
  return E.size() ? Vector(E.transpose() * g) : g;
}

/// Assemble the cone data of one optimal basis. u_ref orients the normal and
/// must be a direction at which the basis is optimal.
Cone build_cone(const Matrix& Z, double tau, std::vector<int> basis,
                const Vector& u_ref) {
  const int k = static_cast<int>(Z.rows());
  const int n = static_cast<int>(Z.cols());
  std::sort(basis.begin(), basis.end());

  Cone cone;
  cone.tau = tau;
  cone.basis = basis;

  // unit normal of the hyperplane spanned by the basis points
  Matrix D(k - 1, k);
  for (int j = 1; j < k; ++j)
    D.row(j - 1) = (Z.col(basis[j]) - Z.col(basis[0])).transpose();
  Eigen::FullPivLU<Matrix> lu(D);
  lu.setThreshold(1e-10);
  if (lu.dimensionOfKernel() != 1)
    throw NumericError("sweep: basis observations are affinely dependent");
  Vector t = lu.kernel().col(0);
  t.normalize();
  if (t.dot(u_ref) < 0) t = -t;
  if (t.dot(u_ref) <= 0)
    throw NumericError("sweep: direction lies in the basis hyperplane");
  cone.t = t;

  double a0 = 0.0;
  for (int j = 0; j < k; ++j) a0 += t.dot(Z.col(basis[j]));
  a0 /= k;
  cone.a0 = a0;

  // residual signs off the basis are constant over the cone
  const double scale = std::max(1.0, Z.cwiseAbs().maxCoeff());
  cone.res_sign.assign(n, 0);
  double s0 = 0.0;
  Vector S = Vector::Zero(k);
  double loss = 0.0;
  std::vector<bool> on_basis(n, false);
  for (int j : basis) on_basis[j] = true;
  for (int i = 0; i < n; ++i) {
    if (on_basis[i]) continue;
    double r = t.dot(Z.col(i)) - a0;
    // guard only against exact ties: random clouds routinely carry triples
    // within 1e-9 of collinear whose residual signs are still reliable
    if (std::abs(r) < 2e-12 * scale)
      throw DegeneracyError("sweep: extra observation on the basis hyperplane near direction " +
                            dir_string(u_ref));
    cone.res_sign[i] = r < 0 ? -1 : 1;
    if (r < 0) ++cone.N; else ++cone.P;
    double mu = (r < 0 ? 1.0 - tau : -tau);
    s0 -= mu;
    S -= mu * Z.col(i);
    loss += r * (tau - (r < 0 ? 1.0 : 0.0));
  }
  cone.lambda0 = loss / n;

  // Recover the basis score forms v_j with mu_j(u) * t'u linear in u: solve
  // the stationarity system at k probe directions u_m with t'u_m = 1 and
  // interpolate the linear form.
  Matrix gamma_t = make_orthobasis(t);
  Matrix U(k, k);
  U.col(0) = t;
  for (int m = 1; m < k; ++m) U.col(m) = t + 0.4 * gamma_t.col(m - 1);

  Matrix B(k + 1, k + 1);
  for (int j = 0; j < k; ++j) {
    B(0, j) = 1.0;
    B.block(1, j, k, 1) = Z.col(basis[j]);
  }
  B(0, k) = 0.0;
  Vector rhs(k + 1);
  rhs(0) = s0;
  rhs.tail(k) = S;

  Matrix Mt(k, k);  // Mt(m, j) = mu_j at probe m
  for (int m = 0; m < k; ++m) {
    B.block(1, k, k, 1) = U.col(m);
    Eigen::FullPivLU<Matrix> blu(B);
    if (!blu.isInvertible())
      throw NumericError("sweep: singular stationarity system");
    Vector x = blu.solve(rhs);
    for (int j = 0; j < k; ++j) Mt(m, j) = x(j);
  }
  cone.v = U.transpose().partialPivLu().solve(Mt);

  // facet normals from the score box [-tau, 1-tau]
  cone.normals.clear();
  for (int j = 0; j < k; ++j) {
    cone.normals.push_back(cone.v.col(j) + tau * t);
    cone.normals.push_back((1.0 - tau) * t - cone.v.col(j));
  }
  cone.neighbor.assign(cone.normals.size(), -1);
  cone.u_rep = u_ref;
  return cone;
}

Vector circle_dir(double theta) {
  Vector u(2);
  u << std::cos(theta), std::sin(theta);
  return u;
}

/// Counter-clockwise feasible arc (lo, hi) of the cone around theta_in in the
/// swept plane, plus the facet indices binding at each end.
void angular_interval(Cone& cone, const Matrix& E, double theta_in,
                      int* lo_idx, int* hi_idx) {
  double lo = theta_in - 2.0 * M_PI, hi = theta_in + 2.0 * M_PI;
  *lo_idx = *hi_idx = -1;
  for (std::size_t m = 0; m < cone.normals.size(); ++m) {
    Vector g = project(E, cone.normals[m]);
    double norm = g.norm();
    if (norm < 1e-12) continue;  // vacuous bound in the swept plane
    double psi = std::atan2(g(1), g(0));
    // g's(theta) >= 0 over theta in [psi - pi/2, psi + pi/2]
    double up = psi + M_PI_2;
    while (up <= theta_in - 1e-12) up += 2.0 * M_PI;
    while (up > theta_in + 2.0 * M_PI - 1e-12) up -= 2.0 * M_PI;
    if (up < hi) { hi = up; *hi_idx = static_cast<int>(m); }
    double dn = psi - M_PI_2;
    while (dn >= theta_in + 1e-12) dn -= 2.0 * M_PI;
    while (dn < theta_in - 2.0 * M_PI + 1e-12) dn += 2.0 * M_PI;
    if (dn > lo) { lo = dn; *lo_idx = static_cast<int>(m); }
  }
  cone.theta_lo = lo;
  cone.theta_hi = hi;
}

int default_cap(int n, int sdim) {
  return sdim == 2 ? 2 * n * (n - 1) + 16 : 20000;
}

SweepResult sweep_circle(const Matrix& Z, double tau, const SweepOptions& opts,
                         const Matrix& E) {
  SweepResult out;
  out.tau = tau;
  const int cap = opts.max_cones > 0 ? opts.max_cones
                                     : default_cap(static_cast<int>(Z.cols()), 2);

  double theta0 = 0.12345678901;
  if (opts.start_direction.size() > 0) {
    Vector s0 = opts.start_direction.size() == 2 && E.size() == 0
                    ? opts.start_direction
                    : project(E, opts.start_direction);
    if (s0.size() != 2 || s0.norm() < 1e-9)
      throw InvalidInput("sweep: start direction outside the swept plane");
    theta0 = std::atan2(s0(1), s0(0));
  }

  SolveOptions so;
  auto f = fit(Z, tau, Direction(embed(E, circle_dir(theta0))), so);
  Cone first = build_cone(Z, tau, f.basis, embed(E, circle_dir(theta0)));
  first.subspace = E;
  int lo_idx, hi_idx;
  angular_interval(first, E, theta0, &lo_idx, &hi_idx);
  std::vector<int> lo_facets{lo_idx}, hi_facets{hi_idx};
  first.u_rep = embed(E, circle_dir(0.5 * (first.theta_lo + first.theta_hi)));
  out.cones.push_back(first);

  const double stop = first.theta_lo + 2.0 * M_PI;
  double frontier = first.theta_hi;
  while (frontier < stop - 1e-9) {
    if (static_cast<int>(out.cones.size()) >= cap)
      throw NumericError("sweep: cone cap exceeded after " +
                         std::to_string(out.cones.size()) +
                         " cones; partial decomposition");
    double eps = kFacetEps;
    double theta = frontier + eps;
    so.start_basis = out.cones.back().basis;
    Cone next;
    for (int attempt = 0;; ++attempt) {
      auto g = fit(Z, tau, Direction(embed(E, circle_dir(theta))), so);
      next = build_cone(Z, tau, g.basis, embed(E, circle_dir(theta)));
      angular_interval(next, E, theta, &lo_idx, &hi_idx);
      if (next.basis == out.cones.back().basis) {
        // numerical shyness of the previous interval: push further out
        if (next.theta_hi > frontier + 1e-12) {
          out.cones.back().theta_hi = next.theta_hi;
          hi_facets.back() = hi_idx;
          frontier = next.theta_hi;
          theta = frontier + eps;
          continue;
        }
        eps *= 10.0;
        theta = frontier + eps;
        if (eps > 1e-3)
          throw DegeneracyError("sweep: unresolved facet tie near direction " +
                                dir_string(embed(E, circle_dir(frontier))));
        continue;
      }
      if (next.theta_lo > frontier + 1e-9 && attempt < 60) {
        // jumped over a sliver cone: probe the gap
        theta = 0.5 * (frontier + next.theta_lo);
        continue;
      }
      break;
    }
    next.subspace = E;
    next.u_rep = embed(E, circle_dir(0.5 * (next.theta_lo + next.theta_hi)));
    lo_facets.push_back(lo_idx);
    hi_facets.push_back(hi_idx);
    out.cones.push_back(next);
    frontier = next.theta_hi;
  }

  // counter-clockwise neighbour links, wrapping around
  const int nc = static_cast<int>(out.cones.size());
  for (int i = 0; i < nc; ++i) {
    if (hi_facets[i] >= 0) out.cones[i].neighbor[hi_facets[i]] = (i + 1) % nc;
    if (lo_facets[i] >= 0) out.cones[i].neighbor[lo_facets[i]] = (i + nc - 1) % nc;
  }
  return out;
}

/// A swept direction deep inside the cone: maximize the smallest facet margin.
Vector chebyshev_direction(const Cone& cone, const Matrix& E,
                           const Vector& fallback) {
  const int d = E.size() ? static_cast<int>(E.cols())
                         : static_cast<int>(cone.t.size());
  std::vector<Vector> rows;
  for (const Vector& g : cone.normals) {
    Vector gs = project(E, g);
    double norm = gs.norm();
    if (norm < 1e-12) continue;
    rows.push_back(gs / norm);
  }
  Matrix A(rows.size() + 1, d + 1);
  Vector b = Vector::Zero(rows.size() + 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    A.row(r).head(d) = -rows[r].transpose();
    A(r, d) = 1.0;
  }
  A.row(rows.size()).setZero();
  A(rows.size(), d) = 1.0;
  b(rows.size()) = 1.0;
  Vector obj = Vector::Zero(d + 1);
  obj(d) = 1.0;
  LpResult res = lp_maximize(obj, A, b, 1.0);
  if (res.status != LpResult::Status::Optimal || res.x(d) <= 1e-9 ||
      res.x.head(d).norm() < 1e-9)
    return fallback;
  return embed(E, Vector(res.x.head(d).normalized()));
}

/// Relative-interior swept direction of facet m, or empty when the facet is
/// redundant for the swept sphere.
Vector facet_interior(const Cone& cone, const Matrix& E, std::size_t m) {
  Vector gm = project(E, cone.normals[m]);
  if (gm.norm() < 1e-12) return Vector();
  gm.normalize();
  const int sdim = static_cast<int>(gm.size());
  Matrix Q = make_orthobasis(gm);  // sdim x (sdim-1), basis of the facet plane
  std::vector<Vector> rows;
  for (std::size_t l = 0; l < cone.normals.size(); ++l) {
    if (l == m) continue;
    Vector g = project(E, cone.normals[l]);
    double norm = g.norm();
    if (norm < 1e-12) continue;
    Vector gl = g / norm;
    if ((gl - gm).norm() < 1e-9) continue;  // duplicate of the facet itself
    rows.push_back(gl);
  }
  // variables (w, delta): maximize delta s.t. (g'Q)w >= delta, |w| <= 1
  const int d = sdim - 1;
  Matrix A(rows.size() + 2 * d + 1, d + 1);
  Vector b(rows.size() + 2 * d + 1);
  A.setZero();
  b.setZero();
  std::size_t r = 0;
  for (; r < rows.size(); ++r) {
    A.row(r).head(d) = -(Q.transpose() * rows[r]).transpose();
    A(r, d) = 1.0;
  }
  for (int j = 0; j < d; ++j) {
    A(r, j) = 1.0;  b(r) = 1.0;  ++r;
    A(r, j) = -1.0; b(r) = 1.0;  ++r;
  }
  A(r, d) = 1.0;
  b(r) = 1.0;
  Vector obj = Vector::Zero(d + 1);
  obj(d) = 1.0;
  LpResult res = lp_maximize(obj, A, b, 10.0);
  if (res.status != LpResult::Status::Optimal || res.x(d) <= kFacetEps)
    return Vector();  // facet carries no full-dimensional piece of boundary
  Vector s = Q * res.x.head(d);
  if (s.norm() < 1e-9) return Vector();
  return embed(E, Vector(s.normalized()));
}

SweepResult sweep_bfs(const Matrix& Z, double tau, const SweepOptions& opts,
                      const Matrix& E) {
  SweepResult out;
  out.tau = tau;
  const int k = static_cast<int>(Z.rows());
  const int sdim = E.size() ? static_cast<int>(E.cols()) : k;
  const int cap = opts.max_cones > 0
                      ? opts.max_cones
                      : default_cap(static_cast<int>(Z.cols()), sdim);

  Vector u0;
  if (opts.start_direction.size() == k) {
    u0 = opts.start_direction.normalized();
    if (E.size() && (embed(E, project(E, u0)) - u0).norm() > 1e-9)
      throw InvalidInput("sweep: start direction outside the swept subspace");
  } else {
    std::mt19937_64 rng(0x5733'9a11);
    std::normal_distribution<double> gauss;
    Vector s(sdim);
    for (int j = 0; j < sdim; ++j) s(j) = gauss(rng);
    u0 = embed(E, Vector(s.normalized()));
  }

  std::map<std::vector<int>, int> index;
  std::deque<int> queue;
  SolveOptions so;
  auto f = fit(Z, tau, Direction(u0), so);
  Cone c0 = build_cone(Z, tau, f.basis, u0);
  c0.subspace = E;
  c0.u_rep = chebyshev_direction(c0, E, u0);
  index[c0.basis] = 0;
  out.cones.push_back(c0);
  queue.push_back(0);

  while (!queue.empty()) {
    int i = queue.front();
    queue.pop_front();
    const std::size_t nf = out.cones[i].normals.size();
    for (std::size_t m = 0; m < nf; ++m) {
      if (out.cones[i].neighbor[m] >= 0) continue;
      Vector uf = facet_interior(out.cones[i], E, m);
      if (uf.size() == 0) continue;  // redundant facet
      Vector gm = embed(E, Vector(project(E, out.cones[i].normals[m]).normalized()));

      std::vector<int> found;
      for (double eps = kFacetEps; eps <= 1e-3; eps *= 10.0) {
        Vector un = (uf - eps * gm).normalized();
        so.start_basis = out.cones[i].basis;
        auto g = fit(Z, tau, Direction(un), so);
        std::vector<int> bs = g.basis;
        std::sort(bs.begin(), bs.end());
        if (bs != out.cones[i].basis) {
          auto it = index.find(bs);
          int j;
          if (it == index.end()) {
            if (static_cast<int>(out.cones.size()) >= cap)
              throw NumericError("sweep: cone cap exceeded after " +
                                 std::to_string(out.cones.size()) +
                                 " cones; partial decomposition");
            Cone cj = build_cone(Z, tau, bs, un);
            cj.subspace = E;
            cj.u_rep = chebyshev_direction(cj, E, un);
            j = static_cast<int>(out.cones.size());
            index[bs] = j;
            out.cones.push_back(cj);
            queue.push_back(j);
          } else {
            j = it->second;
          }
          found.push_back(j);
          break;
        }
      }
      if (found.empty())
        throw DegeneracyError("sweep: unresolved facet tie near direction " +
                              dir_string(uf));
      out.cones[i].neighbor[m] = found.front();
    }
  }
  return out;
}

void collect_hyperplanes(SweepResult& out) {
  for (std::size_t i = 0; i < out.cones.size(); ++i) {
    const Cone& c = out.cones[i];
    bool matched = false;
    for (SweepHyperplane& h : out.hyperplanes) {
      if ((h.plane.c - c.t).norm() + std::abs(h.plane.a - c.a0) < 1e-8) {
        h.cones.push_back(static_cast<int>(i));
        matched = true;
        break;
      }
    }
    if (!matched) {
      SweepHyperplane h;
      h.plane = Hyperplane{c.t, c.a0};
      h.cutoff = c.N;
      h.cones = {static_cast<int>(i)};
      out.hyperplanes.push_back(h);
    }
  }
}

}  // namespace

double Cone::min_slack(const Vector& u) const {
  double slack = 1e300;
  for (const Vector& g : normals) {
    double norm = g.norm();
    if (norm < 1e-12) continue;
    slack = std::min(slack, g.dot(u) / norm);
  }
  return slack;
}

bool Cone::contains(const Vector& u, double tol) const {
  return min_slack(u) >= -tol;
}

const Cone* SweepResult::locate(const Vector& u, double tol) const {
  const Cone* best = nullptr;
  double best_slack = -tol;
  for (const Cone& c : cones) {
    double s = c.min_slack(u);
    if (s >= best_slack) {
      best_slack = s;
      best = &c;
    }
  }
  return best;
}

SweepResult sweep(const Matrix& data, double tau, const SweepOptions& opts) {
  const int k = static_cast<int>(data.rows());
  if (k < 2) throw InvalidInput("sweep: needs at least two coordinates");
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidInput("sweep: tau outside (0,1)");

  Matrix E = opts.subspace;
  int sdim = k;
  if (E.size()) {
    if (static_cast<int>(E.rows()) != k || E.cols() < 2 || E.cols() > k)
      throw InvalidInput("sweep: subspace must be k x m with 2 <= m <= k");
    if ((E.transpose() * E - Matrix::Identity(E.cols(), E.cols())).norm() > 1e-9)
      throw InvalidInput("sweep: subspace columns must be orthonormal");
    sdim = static_cast<int>(E.cols());
    if (sdim == k) E = Matrix();  // full sphere after all
  }

  SweepResult out = sdim == 2 ? sweep_circle(data, tau, opts, E)
                              : sweep_bfs(data, tau, opts, E);
  collect_hyperplanes(out);
  return out;
}

DirectionalQuantileFit evaluate_in_cone(const Cone& cone, const Direction& u) {
  const int k = static_cast<int>(cone.t.size());
  if (u.dim() != k) throw InvalidInput("evaluate_in_cone: dimension mismatch");
  double tu = cone.t.dot(u.u);
  if (tu <= 0.0 || cone.min_slack(u.u) <= 1e-9)
    throw InvalidInput("evaluate_in_cone: direction is not strictly inside the cone");

  Matrix gamma = make_orthobasis(u);
  DirectionalQuantileFit f(cone.tau, u, gamma);
  f.c = cone.t / tu;
  f.a = cone.a0 / tu;
  f.b = -gamma.transpose() * f.c;
  f.lambda = cone.lambda0 / tu;
  f.basis = cone.basis;
  f.N = cone.N;
  f.P = cone.P;
  f.Z0 = k;

  const int n = static_cast<int>(cone.res_sign.size());
  f.mu.resize(n);
  for (int i = 0; i < n; ++i)
    f.mu(i) = cone.res_sign[i] < 0 ? 1.0 - cone.tau
            : cone.res_sign[i] > 0 ? -cone.tau
                                   : 0.0;
  for (int j = 0; j < k; ++j)
    f.mu(cone.basis[j]) = cone.v.col(j).dot(u.u) / tu;
  return f;
}

std::vector<Vector> extreme_rays(const Cone& cone) {
  const Matrix& E = cone.subspace;
  const int sdim = E.size() ? static_cast<int>(E.cols())
                            : static_cast<int>(cone.t.size());
  std::vector<Vector> rays;
  if (sdim == 2) {
    rays.push_back(embed(E, circle_dir(cone.theta_lo)));
    rays.push_back(embed(E, circle_dir(cone.theta_hi)));
    return rays;
  }
  std::vector<Vector> gs;
  for (const Vector& g : cone.normals) {
    Vector gp = project(E, g);
    double norm = gp.norm();
    if (norm < 1e-12) continue;
    Vector gn = gp / norm;
    bool dup = false;
    for (const Vector& h : gs)
      if ((h - gn).norm() < 1e-9) { dup = true; break; }
    if (!dup) gs.push_back(gn);
  }
  // rays sit on sdim-1 active facets: scan the facet subsets
  const int m = static_cast<int>(gs.size());
  std::vector<int> pick(sdim - 1);
  std::function<void(int, int)> scan = [&](int start, int depth) {
    if (depth == sdim - 1) {
      Matrix A(sdim - 1, sdim);
      for (int j = 0; j < sdim - 1; ++j) A.row(j) = gs[pick[j]].transpose();
      Eigen::FullPivLU<Matrix> lu(A);
      lu.setThreshold(1e-9);
      if (lu.dimensionOfKernel() != 1) return;
      Vector r = lu.kernel().col(0).normalized();
      for (double s : {1.0, -1.0}) {
        Vector cand = embed(E, Vector(s * r));
        if (cone.min_slack(cand) < -1e-7) continue;
        bool dup = false;
        for (const Vector& prev : rays)
          if ((prev - cand).norm() < 1e-6) { dup = true; break; }
        if (!dup) rays.push_back(cand);
      }
      return;
    }
    for (int i = start; i < m; ++i) {
      pick[depth] = i;
      scan(i + 1, depth + 1);
    }
  };
  scan(0, 0);
  return rays;
}

PiecewiseStatistic piecewise_statistic(const SweepResult& sw,
                                       const ConeFunctional& g1,
                                       const ConeFunctional& g2) {
  PiecewiseStatistic out;
  for (const Cone& c : sw.cones) {
    double tu = c.t.dot(c.u_rep);
    Vector cu = c.t / tu;
    double a = c.a0 / tu, lambda = c.lambda0 / tu;
    double den = g2(lambda, a, cu);
    if (std::abs(den) < 1e-14) {
      out.value.push_back(std::numeric_limits<double>::quiet_NaN());
      out.defined.push_back(false);
    } else {
      out.value.push_back(g1(lambda, a, cu) / den);
      out.defined.push_back(true);
    }
  }
  return out;
}

}  // namespace dirq
