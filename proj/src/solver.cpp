#include "dirq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "dirq/lp.hpp"

namespace dirq {
namespace {

constexpr double kResTol = 1e-9;

void validate_gamma(const Matrix& gamma, const Direction& u) {
  const int k = u.dim();
  if (gamma.rows() != k || gamma.cols() != k - 1)
    throw InvalidInput("QuantileLP: gamma has wrong shape");
  if ((gamma.transpose() * gamma - Matrix::Identity(k - 1, k - 1)).norm() > 1e-8 ||
      (gamma.transpose() * u.u).norm() > 1e-8)
    throw InvalidInput("QuantileLP: gamma is not an orthonormal complement of u");
}

// Design row x_i = (1, (gamma'Z_i)')' and response y_i = u'Z_i.
struct Design {
  Matrix X;  // n x k
  Vector y;  // n
  double scale = 1.0;
};

Design build_design(const QuantileLP& lp) {
  Design d;
  const int n = lp.n(), k = lp.k();
  d.X.resize(n, k);
  d.X.col(0).setOnes();
  if (k > 1) d.X.rightCols(k - 1) = lp.Z.transpose() * lp.gamma;
  d.y = lp.Z.transpose() * lp.u.u;
  d.scale = std::max(1.0, d.y.lpNorm<Eigen::Infinity>());
  return d;
}

// Greedy invertible basis with observations whose responses sit near the
// tau-quantile rank, so the simplex starts close to the optimum.
std::vector<int> initial_basis(const Design& d, double tau) {
  const int n = static_cast<int>(d.X.rows());
  const int k = static_cast<int>(d.X.cols());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return d.y(i) < d.y(j); });
  double target = tau * (n - 1);
  std::vector<int> by_rank(n);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::sort(by_rank.begin(), by_rank.end(), [&](int a, int b) {
    return std::abs(a - target) < std::abs(b - target);
  });

  std::vector<int> h;
  Matrix B(k, k);
  for (int pos : by_rank) {
    int idx = order[pos];
    B.row(static_cast<int>(h.size())) = d.X.row(idx);
    Eigen::FullPivLU<Matrix> lu(B.topRows(static_cast<int>(h.size()) + 1));
    if (lu.rank() == static_cast<int>(h.size()) + 1) {
      h.push_back(idx);
      if (static_cast<int>(h.size()) == k) return h;
    }
  }
  throw NumericError("solve: design matrix is rank-deficient");
}

struct BasisState {
  std::vector<int> h;
  Eigen::FullPivLU<Matrix> lu;  // of X(h)
  Vector beta;
  Vector r;  // residuals, exactly zero on h
  Vector xi;
};

void refresh(BasisState& st, const Design& d) {
  const int k = static_cast<int>(d.X.cols());
  Matrix Xh(k, k);
  Vector yh(k);
  for (int j = 0; j < k; ++j) {
    Xh.row(j) = d.X.row(st.h[j]);
    yh(j) = d.y(st.h[j]);
  }
  st.lu.compute(Xh);
  if (st.lu.rank() < k)
    throw NumericError("solve: singular basis (data not in general position?)");
  st.beta = st.lu.solve(yh);
  st.r = d.y - d.X * st.beta;
  for (int j : st.h) st.r(j) = 0.0;
}

void compute_xi(BasisState& st, const Design& d, double tau, double tol) {
  const int k = static_cast<int>(d.X.cols());
  Vector rhs = Vector::Zero(k);
  std::vector<bool> basic(d.X.rows(), false);
  for (int j : st.h) basic[j] = true;
  for (int i = 0; i < static_cast<int>(d.X.rows()); ++i) {
    if (basic[i]) continue;
    double w = tau - (st.r(i) < -tol ? 1.0 : 0.0);
    rhs += w * d.X.row(i).transpose();
  }
  st.xi = st.lu.transpose().solve(rhs);
}

// Degenerate-vertex optimality: a nonbasic observation sitting on the basis
// hyperplane may carry any score in [-tau, 1-tau]. The vertex is optimal iff
// weights s in [0,1]^m exist with xi - D s inside the box, D.col(m) the
// basis-transposed solve of the observation's design row. Returns the
// repaired weights via a small margin-maximizing LP.
std::optional<Vector> repair_degenerate_scores(const Matrix& D, double tau,
                                               const Vector& xi) {
  const int m = static_cast<int>(D.cols());
  const int k = static_cast<int>(D.rows());
  Matrix A(2 * m + 2 * k + 1, m + 1);
  Vector b(2 * m + 2 * k + 1);
  int row = 0;
  for (int j = 0; j < m; ++j) {
    A.row(row).setZero(); A(row, j) = -1.0; A(row, m) = 1.0; b(row++) = 0.0;
    A.row(row).setZero(); A(row, j) = 1.0;  A(row, m) = 1.0; b(row++) = 1.0;
  }
  for (int j = 0; j < k; ++j) {
    A.row(row).head(m) = D.row(j);  A(row, m) = 1.0; b(row++) = xi(j) + tau;
    A.row(row).head(m) = -D.row(j); A(row, m) = 1.0; b(row++) = (1.0 - tau) - xi(j);
  }
  A.row(row).setZero(); A(row, m) = 1.0; b(row++) = 1.0;
  Vector obj = Vector::Zero(m + 1);
  obj(m) = 1.0;
  LpResult res = lp_maximize(obj, A, b, 2.0);
  if (res.status != LpResult::Status::Optimal || res.x(m) < -1e-12)
    return std::nullopt;
  Vector s = res.x.head(m).cwiseMax(0.0).cwiseMin(1.0);
  Vector fixed = xi - D * s;
  for (int j = 0; j < k; ++j)
    if (fixed(j) < -tau - 1e-9 || fixed(j) > (1.0 - tau) + 1e-9)
      return std::nullopt;
  return s;
}

}  // namespace

QuantileLP::QuantileLP(Matrix Z_, Direction u_, double tau_)
    : QuantileLP(std::move(Z_), u_, tau_, make_orthobasis(u_)) {}

QuantileLP::QuantileLP(Matrix Z_, Direction u_, double tau_, Matrix gamma_)
    : Z(std::move(Z_)), u(std::move(u_)), tau(tau_), gamma(std::move(gamma_)) {
  if (!Z.allFinite()) throw InvalidInput("QuantileLP: non-finite data");
  if (Z.rows() != u.dim()) throw InvalidInput("QuantileLP: dimension mismatch");
  if (Z.cols() <= Z.rows()) throw InvalidInput("QuantileLP: need n > k");
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidInput("QuantileLP: tau must be in (0,1)");
  validate_gamma(gamma, u);
}

std::pair<PrimalSolution, DualSolution> solve(const QuantileLP& lp,
                                              const SolveOptions& opts) {
  const int n = lp.n(), k = lp.k();
  const double tau = lp.tau;

  double ntau = tau * n;
  bool integer_ntau = std::abs(ntau - std::round(ntau)) < 1e-9;
  if (integer_ntau && !opts.allow_degenerate)
    throw DegeneracyError(
        "solve: n*tau is an integer, the optimum is nonunique; pass "
        "allow-degenerate to accept one optimal vertex");

  QuantileLP work = lp;
  if (opts.jitter) {
    std::mt19937_64 rng(opts.jitter_seed);
    std::normal_distribution<double> gauss(0.0, 1e-9);
    for (Eigen::Index i = 0; i < work.Z.size(); ++i)
      work.Z.data()[i] += gauss(rng);
  }

  Design d = build_design(work);
  const double tol = kResTol * d.scale;

  BasisState st;
  if (!opts.start_basis.empty()) {
    if (static_cast<int>(opts.start_basis.size()) != k)
      throw InvalidInput("solve: start basis must have k observations");
    st.h = opts.start_basis;
  } else {
    st.h = initial_basis(d, tau);
  }
  refresh(st, d);

  const long cap = std::max(1000L, static_cast<long>(opts.max_iter_factor) * n);
  long degenerate_pivots = 0;
  bool bland = false;
  std::vector<std::pair<int, double>> frac;  // on-hyperplane scores, if any

  std::set<std::vector<int>> visited;  // bases already held (anti-cycling)

  for (long iter = 0;; ++iter) {
    if (iter > cap) {
      std::ostringstream msg;
      msg << "solve: iteration cap exceeded; basis";
      for (int j : st.h) msg << ' ' << j;
      throw DegeneracyError(msg.str());
    }
    compute_xi(st, d, tau, tol);

    // violated basis slots, worst first (lowest observation under Bland)
    std::vector<std::pair<double, int>> viol;
    for (int j = 0; j < k; ++j) {
      double v = std::max(st.xi(j) - (1.0 - tau), -tau - st.xi(j));
      if (v > 1e-9) viol.emplace_back(bland ? -st.h[j] : v, j);
    }
    if (viol.empty()) break;  // optimal
    std::sort(viol.rbegin(), viol.rend());

    // ties on the basis hyperplane: try fractional scores before pivoting
    {
      std::vector<int> on;
      std::vector<bool> is_basic(n, false);
      for (int j : st.h) is_basic[j] = true;
      for (int i = 0; i < n; ++i)
        if (!is_basic[i] && std::abs(st.r(i)) <= tol) on.push_back(i);
      if (!on.empty() && static_cast<int>(on.size()) + 1 <= 6) {
        Matrix D(k, static_cast<int>(on.size()));
        for (std::size_t m = 0; m < on.size(); ++m)
          D.col(static_cast<int>(m)) =
              st.lu.transpose().solve(d.X.row(on[m]).transpose());
        if (auto s = repair_degenerate_scores(D, tau, st.xi)) {
          st.xi -= D * *s;
          for (std::size_t m = 0; m < on.size(); ++m)
            frac.emplace_back(on[m], (*s)(m));
          break;  // optimal with fractional on-hyperplane scores
        }
      }
    }

    {
      std::vector<int> cur = st.h;
      std::sort(cur.begin(), cur.end());
      visited.insert(std::move(cur));
    }

    std::vector<bool> basic(n, false);
    for (int j : st.h) basic[j] = true;

    // pivot on the first violated slot whose exchange reaches a new basis;
    // revisits happen only at degenerate vertices where steps carry no
    // numeric progress, so they are skipped rather than looped through
    bool pivoted = false, saw_candidate = false;
    for (const auto& [key, slot] : viol) {
      (void)key;
      double hi = st.xi(slot) - (1.0 - tau);
      double lo = -tau - st.xi(slot);
      double sigma = hi > lo ? 1.0 : -1.0;

      // descent direction in coefficient space
      Vector ej = Vector::Zero(k);
      ej(slot) = sigma;
      Vector dir = st.lu.solve(ej);
      Vector g = d.X * dir;

      double slope = (sigma > 0 ? (1.0 - tau) : tau) - sigma * st.xi(slot);

      struct Cross {
        double t;
        double jump;
        int obs;
      };
      std::vector<Cross> crossings;
      for (int i = 0; i < n; ++i) {
        if (basic[i]) continue;
        double gi = g(i), ri = st.r(i);
        if (std::abs(gi) < 1e-13) continue;
        bool zero = std::abs(ri) <= tol;
        if (zero) {
          if (gi > 0) crossings.push_back({0.0, gi, i});
        } else if ((ri > 0 && gi > 0) || (ri < 0 && gi < 0)) {
          crossings.push_back({ri / gi, std::abs(gi), i});
        }
      }
      std::sort(crossings.begin(), crossings.end(),
                [&](const Cross& a, const Cross& b) {
                  if (a.t != b.t) return a.t < b.t;
                  return bland ? a.obs < b.obs : a.jump > b.jump;
                });

      int enter = -1;
      double step = 0.0;
      for (const Cross& c : crossings) {
        slope += c.jump;
        if (slope >= -1e-12) {
          enter = c.obs;
          step = c.t;
          break;
        }
      }
      if (enter < 0) continue;  // unbounded along this slot, try another
      saw_candidate = true;

      std::vector<int> next = st.h;
      next[slot] = enter;
      std::sort(next.begin(), next.end());
      if (visited.count(next)) continue;

      if (step <= tol / std::max(1.0, g.lpNorm<Eigen::Infinity>())) {
        if (++degenerate_pivots > 3L * n) bland = true;
      }
      st.h[slot] = enter;
      refresh(st, d);
      pivoted = true;
      break;
    }
    if (!pivoted) {
      if (saw_candidate)
        throw DegeneracyError(
            "solve: pivot cycle at a degenerate vertex (collinear "
            "observations); pass jitter to break ties");
      throw NumericError("solve: unbounded descent direction (degenerate data)");
    }
  }

  // assemble primal
  PrimalSolution primal;
  primal.a = st.beta(0);
  primal.b = st.beta.tail(k - 1);
  primal.c = lp.u.u - lp.gamma * primal.b;
  primal.basis = st.h;
  std::sort(primal.basis.begin(), primal.basis.end());
  for (int i = 0; i < n; ++i) {
    if (st.r(i) < -tol) ++primal.N;
    else if (st.r(i) > tol) ++primal.P;
    else ++primal.Z0;
  }

  // assemble dual: nonbasic scores from residual signs, basic from xi
  DualSolution dual;
  dual.mu = Vector::Zero(n);
  std::vector<bool> basic(n, false);
  for (int j : st.h) basic[j] = true;
  for (int i = 0; i < n; ++i)
    if (!basic[i]) dual.mu(i) = (st.r(i) < -tol ? 1.0 : 0.0) - tau;
  for (int j = 0; j < k; ++j) dual.mu(st.h[j]) = st.xi(j);
  for (const auto& [obs, s] : frac) dual.mu(obs) = s - tau;

  double objective = 0.0;
  for (int i = 0; i < n; ++i)
    objective += st.r(i) * (tau - (st.r(i) < -tol ? 1.0 : 0.0));
  dual.lambda_D = -dual.mu.dot(d.y);
  dual.lambda = dual.lambda_D / n;
  if (std::abs(dual.lambda_D - objective) > 1e-9 * std::max(1.0, std::abs(objective)))
    throw NumericError("solve: duality gap exceeds tolerance");

  double margin = 1e300;
  for (int j = 0; j < k; ++j)
    margin = std::min({margin, st.xi(j) + tau, (1.0 - tau) - st.xi(j)});
  primal.nonunique = integer_ntau || margin <= 1e-9;
  return {primal, dual};
}

CertificateReport verify_certificate(const QuantileLP& lp,
                                     const PrimalSolution& primal,
                                     const DualSolution& dual) {
  const int n = lp.n(), k = lp.k();
  const double tau = lp.tau;
  Vector r = lp.Z.transpose() * primal.c - Vector::Constant(n, primal.a);
  const double tol = kResTol * std::max(1.0, r.lpNorm<Eigen::Infinity>());

  CertificateReport rep;
  int N = 0, Z0 = 0;
  for (int i = 0; i < n; ++i) {
    if (r(i) < -tol) ++N;
    else if (r(i) <= tol) ++Z0;
  }
  rep.sandwich_ok = (N <= tau * n + 1e-9) && (tau * n <= N + Z0 + 1e-9);

  // componentwise mass balance, shifted by lambda along u
  Vector mid = tau * lp.Z.rowwise().mean();
  Vector lo = Vector::Zero(k), hi = Vector::Zero(k);
  for (int i = 0; i < n; ++i) {
    if (r(i) < -tol) mid -= lp.Z.col(i) / n;
    else if (std::abs(r(i)) <= tol) {
      lo -= lp.Z.col(i).cwiseMin(0.0) / n;   // accumulate Z^-
      hi += lp.Z.col(i).cwiseMax(0.0) / n;   // accumulate Z^+
    }
  }
  mid -= dual.lambda * lp.u.u;
  rep.mass_balance_ok = true;
  for (int j = 0; j < k; ++j)
    if (mid(j) < -lo(j) - 1e-8 || mid(j) > hi(j) + 1e-8) rep.mass_balance_ok = false;

  if (static_cast<int>(primal.basis.size()) != k)
    throw NumericError("verify_certificate: basis size mismatch");
  Matrix Xh(k, k);
  for (int j = 0; j < k; ++j) {
    Xh(j, 0) = 1.0;
    if (k > 1)
      Xh.row(j).tail(k - 1) = (lp.gamma.transpose() * lp.Z.col(primal.basis[j])).transpose();
  }
  Eigen::FullPivLU<Matrix> lu(Xh);
  if (lu.rank() < k) throw NumericError("verify_certificate: basis does not span");

  std::vector<bool> basic(n, false);
  for (int j : primal.basis) basic[j] = true;
  Vector rhs = Vector::Zero(k);
  for (int i = 0; i < n; ++i) {
    if (basic[i]) continue;
    Vector x(k);
    x(0) = 1.0;
    if (k > 1) x.tail(k - 1) = lp.gamma.transpose() * lp.Z.col(i);
    rhs += (tau - (r(i) < -tol ? 1.0 : 0.0)) * x;
  }
  rep.xi = lu.transpose().solve(rhs);

  double margin = 1e300;
  for (int j = 0; j < k; ++j)
    margin = std::min({margin, rep.xi(j) + tau, (1.0 - tau) - rep.xi(j)});
  if (margin < -1e-9) {
    // allow fractional scores for nonbasic observations on the hyperplane
    std::vector<int> on;
    for (int i = 0; i < n; ++i)
      if (!basic[i] && std::abs(r(i)) <= tol) on.push_back(i);
    if (!on.empty() && static_cast<int>(on.size()) + 1 <= 6) {
      Matrix D(k, static_cast<int>(on.size()));
      for (std::size_t m = 0; m < on.size(); ++m) {
        Vector x(k);
        x(0) = 1.0;
        if (k > 1) x.tail(k - 1) = lp.gamma.transpose() * lp.Z.col(on[m]);
        D.col(static_cast<int>(m)) = lu.transpose().solve(x);
      }
      if (auto s = repair_degenerate_scores(D, tau, rep.xi)) {
        rep.xi -= D * *s;
        margin = 1e300;
        for (int j = 0; j < k; ++j)
          margin = std::min({margin, rep.xi(j) + tau, (1.0 - tau) - rep.xi(j)});
      }
    }
  }
  rep.xi_in_box = margin >= -1e-9;
  rep.strict = margin > 1e-9;

  double obj = 0.0;
  for (int i = 0; i < n; ++i) obj += r(i) * (tau - (r(i) < -tol ? 1.0 : 0.0));
  rep.lambda_resid = std::abs(dual.lambda - obj / n);
  rep.pass = rep.sandwich_ok && rep.mass_balance_ok && rep.xi_in_box &&
             rep.lambda_resid <= 1e-10 * std::max(1.0, std::abs(obj));
  return rep;
}

}  // namespace dirq
