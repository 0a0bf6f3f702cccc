#include "dirq/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

namespace dirq {
namespace {

constexpr double kTol = 1e-9;

struct Problem {
  Vector obj;
  std::vector<Vector> rows;
  std::vector<double> rhs;
  double box;
};

// Returns the optimum over the constraints in `order[0..count)`, or nullopt
// if infeasible.
std::optional<Vector> solve_rec(const Problem& p, std::mt19937_64& rng) {
  const int d = static_cast<int>(p.obj.size());
  if (d == 1) {
    double lo = -p.box, hi = p.box;
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
      double a = p.rows[i](0), b = p.rhs[i];
      if (std::abs(a) < kTol) {
        if (b < -kTol) return std::nullopt;
        continue;
      }
      if (a > 0) hi = std::min(hi, b / a);
      else lo = std::max(lo, b / a);
    }
    if (lo > hi + kTol) return std::nullopt;
    hi = std::max(hi, lo);
    double x;
    if (p.obj(0) > kTol) x = hi;
    else if (p.obj(0) < -kTol) x = lo;
    else x = std::clamp(0.0, lo, hi);
    Vector v(1);
    v(0) = x;
    return v;
  }

  std::vector<int> order(p.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  Vector x(d);
  for (int j = 0; j < d; ++j) {
    if (p.obj(j) > kTol) x(j) = p.box;
    else if (p.obj(j) < -kTol) x(j) = -p.box;
    else x(j) = 0.0;
  }

  for (std::size_t step = 0; step < order.size(); ++step) {
    const Vector& a = p.rows[order[step]];
    const double b = p.rhs[order[step]];
    double scale = std::max(1.0, a.lpNorm<Eigen::Infinity>()) *
                   std::max(1.0, x.lpNorm<Eigen::Infinity>());
    if (a.dot(x) <= b + kTol * scale) continue;

    // Optimum of the first `step` constraints lies on a'x = b; eliminate the
    // variable with the largest coefficient and recurse in dimension d-1.
    int piv = 0;
    a.cwiseAbs().maxCoeff(&piv);
    if (std::abs(a(piv)) < kTol) return std::nullopt;

    auto reduce_row = [&](const Vector& r, double rb) {
      // substitute x_piv = (b - sum_{l != piv} a_l x_l) / a_piv
      Vector out(d - 1);
      double coef = r(piv) / a(piv);
      int idx = 0;
      for (int l = 0; l < d; ++l) {
        if (l == piv) continue;
        out(idx++) = r(l) - coef * a(l);
      }
      return std::make_pair(out, rb - coef * b);
    };

    Problem sub;
    sub.box = p.box;
    auto [robj, unused] = reduce_row(p.obj, 0.0);
    (void)unused;
    sub.obj = robj;
    for (std::size_t i = 0; i < step; ++i) {
      auto [rr, rb] = reduce_row(p.rows[order[i]], p.rhs[order[i]]);
      sub.rows.push_back(rr);
      sub.rhs.push_back(rb);
    }
    // Box constraints on the eliminated variable become general constraints.
    Vector epiv = Vector::Zero(d);
    epiv(piv) = 1.0;
    for (double sgn : {1.0, -1.0}) {
      auto [rr, rb] = reduce_row(sgn * epiv, p.box);
      sub.rows.push_back(rr);
      sub.rhs.push_back(rb);
    }

    auto subx = solve_rec(sub, rng);
    if (!subx) return std::nullopt;
    double acc = b;
    int idx = 0;
    for (int l = 0; l < d; ++l) {
      if (l == piv) continue;
      x(l) = (*subx)(idx++);
      acc -= a(l) * x(l);
    }
    x(piv) = acc / a(piv);
  }
  return x;
}

}  // namespace

LpResult lp_maximize(const Vector& obj, const Matrix& A, const Vector& b,
                     double box, std::uint64_t seed) {
  Problem p;
  p.obj = obj;
  p.box = box;
  p.rows.reserve(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    p.rows.push_back(A.row(i).transpose());
    p.rhs.push_back(b(i));
  }
  std::mt19937_64 rng(seed);
  LpResult res;
  auto x = solve_rec(p, rng);
  if (!x) {
    res.status = LpResult::Status::Infeasible;
    return res;
  }
  res.status = LpResult::Status::Optimal;
  res.x = *x;
  res.hit_box = (x->cwiseAbs().maxCoeff() > box * (1.0 - 1e-6));
  return res;
}

}  // namespace dirq
