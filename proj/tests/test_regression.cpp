#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dirq/regression.hpp"

using namespace dirq;

namespace {

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Matrix cloud(int k, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Matrix Z(k, n);
  for (int i = 0; i < k * n; ++i) Z.data()[i] = gauss(rng);
  return Z;
}

// rows: (x, y1, y2) with y = (x, x) + scale(x) * noise
Matrix slope_model(int n, bool heteroscedastic, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 4.0);
  std::normal_distribution<double> gauss;
  Matrix D(3, n);
  for (int i = 0; i < n; ++i) {
    double x = unif(rng);
    double s = heteroscedastic ? std::sqrt(x) : 1.0;
    D(0, i) = x;
    D(1, i) = x + s * gauss(rng);
    D(2, i) = x + s * gauss(rng);
  }
  return D;
}

double check_loss(const Vector& r, double tau) {
  double s = 0.0;
  for (int i = 0; i < r.size(); ++i)
    s += r(i) * (tau - (r(i) < 0 ? 1.0 : 0.0));
  return s;
}

// set Hausdorff distance between two convex polygons
double polygon_hausdorff(const ConvexPolytope& A, const std::vector<Vector>& bv) {
  ConvexPolytope B;
  B.vertices = bv;
  auto dist_to = [](const Vector& p, const ConvexPolytope& P) {
    auto vs = P.ordered_vertices_ccw();
    double worst_side = 1e300, best = 1e300;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const Vector& a = vs[i];
      Vector d = vs[(i + 1) % vs.size()] - a;
      double t = std::clamp(d.squaredNorm() > 0 ? (p - a).dot(d) / d.squaredNorm() : 0.0, 0.0, 1.0);
      best = std::min(best, (p - (a + t * d)).norm());
      double cross = d(0) * (p(1) - a(1)) - d(1) * (p(0) - a(0));
      worst_side = std::min(worst_side, cross);
    }
    return worst_side >= 0 ? 0.0 : best;  // inside when left of every ccw edge
  };
  double h = 0.0;
  for (const Vector& v : A.vertices) h = std::max(h, dist_to(v, B));
  for (const Vector& v : bv) h = std::max(h, dist_to(v, A));
  return h;
}

double diameter(const ConvexPolytope& P) {
  double d = 0.0;
  for (const Vector& a : P.vertices)
    for (const Vector& b : P.vertices) d = std::max(d, (a - b).norm());
  return d;
}

}  // namespace

TEST_CASE("no regressors reduces to the location case") {
  Matrix Z = cloud(2, 41, 13);
  RegressionSpec spec;
  spec.responses = {0, 1};
  double tau = 0.22;
  for (auto u : {vec2(0, 1), vec2(0.6, -0.8), vec2(-1, 0)}) {
    auto rf = fit_regression(Z, spec, tau, Direction(u));
    auto lf = fit(Z, tau, Direction(u));
    CHECK(rf.a == doctest::Approx(lf.a).epsilon(1e-10));
    CHECK((rf.c - lf.c).norm() < 1e-10);
    CHECK(rf.lambda == doctest::Approx(lf.lambda).epsilon(1e-10));
    CHECK(rf.b_w.size() == 0);
  }

  RegressionTubeCut cut = regression_cut(Z, spec, tau, Vector());
  DepthRegion reg = region(Z, tau);
  CHECK(hausdorff_vertex_distance(cut.polytope, reg.polytope) < 1e-8);
}

TEST_CASE("single response gives the classical regression quantile") {
  Matrix D(2, 9);
  D << 0.1, 0.9, 1.7, 2.2, 2.8, 3.1, 3.9, 4.4, 4.8,
       1.2, 0.3, 2.9, 1.1, 3.8, 2.0, 4.6, 2.7, 5.9;
  RegressionSpec spec;
  spec.regressors = {0};
  spec.responses = {1};
  double tau = 0.3;
  Vector um(1);
  um << 1;
  auto rf = fit_regression(D, spec, tau, Direction(um));

  // exhaustive oracle over all two-point interpolants
  double best = 1e300;
  for (int i = 0; i < 9; ++i)
    for (int j = i + 1; j < 9; ++j) {
      double slope = (D(1, j) - D(1, i)) / (D(0, j) - D(0, i));
      double icept = D(1, i) - slope * D(0, i);
      Vector r = (D.row(1) - slope * D.row(0)).transpose() -
                 icept * Vector::Ones(9);
      best = std::min(best, check_loss(r, tau));
    }
  Vector res = (D.row(1) - rf.b_w(0) * D.row(0)).transpose() -
               rf.a * Vector::Ones(9);
  CHECK(check_loss(res, tau) == doctest::Approx(best).epsilon(1e-10));
  CHECK(rf.N <= 9 * tau);
  CHECK(rf.N + rf.Z0 >= 9 * tau);

  // downward direction pairs with the upper quantile
  Vector dn(1);
  dn << -1;
  auto lo = fit_regression(D, spec, 1.0 - tau, Direction(dn));
  auto hi = fit_regression(D, spec, tau, Direction(um));
  CHECK((lo.c + hi.c).norm() < 1e-9);
  CHECK(lo.a == doctest::Approx(-hi.a).epsilon(1e-9));
}

TEST_CASE("homoscedastic slope model recovers the unit slope") {
  Matrix D = slope_model(500, false, 2025);
  RegressionSpec spec;
  spec.regressors = {0};
  spec.responses = {1, 2};
  SolveOptions opts;
  opts.allow_degenerate = true;  // n*tau = 100 exactly
  auto rf = fit_regression(D, spec, 0.2, Direction(vec2(0, 1)), opts);
  REQUIRE(rf.b_w.size() == 1);
  REQUIRE(rf.b_y.size() == 1);
  CHECK(std::abs(rf.b_w(0) - 1.0) < 0.15);
  CHECK(std::abs(rf.b_y(0)) < 0.15);
}

TEST_CASE("homoscedastic cuts translate along the regression line") {
  Matrix D = slope_model(1999, false, 77);
  RegressionSpec spec;
  spec.regressors = {0};
  spec.responses = {1, 2};
  Matrix Z = assemble_zspace(D, spec);
  SweepOptions so;
  so.subspace = Matrix::Zero(3, 2);
  so.subspace(1, 0) = so.subspace(2, 1) = 1.0;
  auto sw = sweep(Z, 0.2, so);

  Vector w1(1), w3(1);
  w1 << 1.0;
  w3 << 3.0;
  RegressionTubeCut c1 = cut_from_sweep(sw, spec, w1);
  RegressionTubeCut c3 = cut_from_sweep(sw, spec, w3);
  REQUIRE(!c1.polytope.empty);
  REQUIRE(!c3.polytope.empty);
  CHECK(!c1.polytope.unbounded);
  CHECK(!c3.polytope.unbounded);

  std::vector<Vector> shifted;
  for (const Vector& v : c1.polytope.vertices) shifted.push_back(v + vec2(2, 2));
  CHECK(polygon_hausdorff(c3.polytope, shifted) < 0.1);
}

TEST_CASE("heteroscedastic cuts widen with the regressor") {
  Matrix D = slope_model(499, true, 78);
  RegressionSpec spec;
  spec.regressors = {0};
  spec.responses = {1, 2};
  Vector w1(1), w3(1);
  w1 << 1.0;
  w3 << 3.0;
  RegressionTubeCut c1 = regression_cut(D, spec, 0.2, w1);
  RegressionTubeCut c3 = regression_cut(D, spec, 0.2, w3);
  REQUIRE(!c1.polytope.empty);
  REQUIRE(!c3.polytope.empty);
  CHECK(diameter(c3.polytope) > diameter(c1.polytope));
}

TEST_CASE("regressor order does not matter") {
  Matrix D(4, 60);
  D.topRows(2) = cloud(2, 60, 5);
  D.bottomRows(2) = cloud(2, 60, 6) + 0.5 * D.topRows(2);
  RegressionSpec a, b;
  a.regressors = {0, 1};
  b.regressors = {1, 0};
  a.responses = b.responses = {2, 3};
  double tau = 0.27;
  Direction uy(vec2(0.8, 0.6));
  auto fa = fit_regression(D, a, tau, uy);
  auto fb = fit_regression(D, b, tau, uy);
  CHECK(fa.a == doctest::Approx(fb.a).epsilon(1e-9));
  CHECK(fa.c(0) == doctest::Approx(fb.c(1)).epsilon(1e-9));
  CHECK(fa.c(1) == doctest::Approx(fb.c(0)).epsilon(1e-9));
  CHECK((fa.c.tail(2) - fb.c.tail(2)).norm() < 1e-9);
}

TEST_CASE("response transformations map fitted hyperplanes") {
  Matrix D = slope_model(120, false, 91);
  RegressionSpec spec;
  spec.regressors = {0};
  spec.responses = {1, 2};
  double tau = 0.31;

  Matrix A(2, 2);
  A << 1.2, 0.4, -0.3, 0.9;
  Vector Bw(2), d(2);
  Bw << 0.7, -0.5;
  d << 1.0, -2.0;

  Matrix D2 = D;
  for (int i = 0; i < D.cols(); ++i)
    D2.block(1, i, 2, 1) = A * D.block(1, i, 2, 1) + Bw * D(0, i) + d;

  // embedded affine map M z + delta with block lower-triangular M
  Matrix M = Matrix::Identity(3, 3);
  M.block(1, 1, 2, 2) = A;
  M.block(1, 0, 2, 1) = Bw;
  Vector delta = Vector::Zero(3);
  delta.tail(2) = d;

  for (auto uy : {vec2(0, 1), vec2(-0.6, 0.8)}) {
    auto f1 = fit_regression(D, spec, tau, Direction(uy));
    auto f2 = fit_regression(D2, spec, tau, Direction(A * uy));
    Vector c_img = M.transpose().inverse() * f1.c;
    double a_img = f1.a + c_img.dot(delta);
    Vector c2 = f2.c / f2.c.norm();
    Vector ci = c_img / c_img.norm();
    if (c2.dot(ci) < 0) { c2 = -c2; }
    CHECK((c2 - ci).norm() < 1e-8);
    CHECK(f2.a / f2.c.norm() ==
          doctest::Approx(a_img / c_img.norm()).epsilon(1e-8));
  }
}

TEST_CASE("crossing detector fires exactly on containment failures") {
  // location case: depth regions are nested, never crossing
  Matrix Z = cloud(2, 41, 17);
  RegressionSpec loc;
  loc.responses = {0, 1};
  std::vector<RegressionTubeCut> cuts;
  for (double tau : {0.13, 0.23, 0.33})
    cuts.push_back(regression_cut(Z, loc, tau, Vector()));
  auto rep = detect_crossing(cuts);
  CHECK(!rep.crossing);
  CHECK(rep.pairs.empty());

  // tiny heteroscedastic sample: just verify the detector equals the
  // pairwise containment audit, whatever it says
  Matrix D = slope_model(12, true, 3);
  RegressionSpec spec;
  spec.regressors = {0};
  spec.responses = {1, 2};
  Vector w(1);
  w << 2.0;
  std::vector<RegressionTubeCut> rcuts;
  for (double tau : {0.13, 0.21, 0.3})
    rcuts.push_back(regression_cut(D, spec, tau, w));
  auto rrep = detect_crossing(rcuts);
  bool expect = false;
  for (const auto& hi : rcuts)
    for (const auto& lo : rcuts) {
      if (hi.tau <= lo.tau) continue;
      bool nested = hi.polytope.empty ||
                    (!lo.polytope.empty &&
                     polytope_contains(lo.polytope, hi.polytope, 1e-7));
      if (!nested) expect = true;
    }
  CHECK(rrep.crossing == expect);

  CHECK_THROWS_AS((void)detect_crossing({rcuts[0]}), InvalidInput);
}

TEST_CASE("malformed specs are rejected") {
  Matrix D = cloud(3, 30, 1);
  RegressionSpec dup;
  dup.regressors = {0};
  dup.responses = {0, 1};
  CHECK_THROWS_AS((void)assemble_zspace(D, dup), InvalidInput);

  RegressionSpec oob;
  oob.responses = {0, 7};
  CHECK_THROWS_AS((void)assemble_zspace(D, oob), InvalidInput);

  // constant regressor duplicates the intercept
  Matrix flat = D;
  flat.row(0).setConstant(2.0);
  RegressionSpec spec;
  spec.regressors = {0};
  spec.responses = {1, 2};
  CHECK_THROWS_AS((void)fit_regression(flat, spec, 0.21, Direction(vec2(0, 1))),
                  NumericError);
}
