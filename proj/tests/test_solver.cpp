#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dirq/solver.hpp"

using namespace dirq;

namespace {

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Matrix s3() {
  Matrix Z(2, 3);
  Z << 0, 1, 0, 0, 0, 1;
  return Z;
}

Matrix sq4() {
  Matrix Z(2, 4);
  Z << -0.5, 0.5, -0.5, 0.5, -0.5, -0.5, 0.5, 0.5;
  return Z;
}

double check_loss(double r, double tau) { return r * (tau - (r < 0 ? 1.0 : 0.0)); }

// Exhaustive minimum of the empirical check loss over all k-observation bases.
double oracle_objective(const Matrix& Z, const Vector& u, double tau) {
  const int k = static_cast<int>(Z.rows());
  const int n = static_cast<int>(Z.cols());
  Matrix gamma = make_orthobasis(u);
  Matrix X(n, k);
  X.col(0).setOnes();
  if (k > 1) X.rightCols(k - 1) = Z.transpose() * gamma;
  Vector y = Z.transpose() * u;

  double best = 1e300;
  std::vector<int> h(k);
  // enumerate k-subsets
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    Matrix Xh(k, k);
    Vector yh(k);
    for (int j = 0; j < k; ++j) {
      Xh.row(j) = X.row(idx[j]);
      yh(j) = y(idx[j]);
    }
    Eigen::FullPivLU<Matrix> lu(Xh);
    if (lu.rank() == k) {
      Vector beta = lu.solve(yh);
      Vector r = y - X * beta;
      double obj = 0.0;
      for (int i = 0; i < n; ++i) obj += check_loss(r(i), tau);
      best = std::min(best, obj);
    }
    int j = k - 1;
    while (j >= 0 && idx[j] == n - k + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (int l = j + 1; l < k; ++l) idx[l] = idx[l - 1] + 1;
  }
  return best;
}

Matrix gaussian_cloud(int k, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Matrix Z(k, n);
  for (int i = 0; i < k * n; ++i) Z.data()[i] = gauss(rng);
  return Z;
}

}  // namespace

TEST_CASE("three-point fit lands on the flat edge") {
  QuantileLP lp(s3(), Direction(vec2(0, 1)), 0.3);
  auto [primal, dual] = solve(lp);
  CHECK(primal.a == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(primal.c(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(primal.c(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dual.lambda == doctest::Approx(0.1));
  CHECK(dual.lambda_D == doctest::Approx(0.3));
  REQUIRE(dual.mu.size() == 3);
  CHECK(dual.mu(0) == doctest::Approx(0.3));
  CHECK(dual.mu(1) == doctest::Approx(0.0));
  CHECK(dual.mu(2) == doctest::Approx(-0.3));
  CHECK(primal.N == 0);
  CHECK(primal.P == 1);
  CHECK(primal.Z0 == 2);
  CHECK(primal.basis == std::vector<int>{0, 1});
  CHECK_FALSE(primal.nonunique);

  auto rep = verify_certificate(lp, primal, dual);
  CHECK(rep.pass);
  CHECK(rep.strict);
  CHECK(rep.xi(0) == doctest::Approx(0.3));
  CHECK(rep.xi(1) == doctest::Approx(0.0));
}

TEST_CASE("univariate reduction gives the classical quantile") {
  Matrix Z(1, 5);
  Z << 1, 2, 3, 4, 5;
  Vector up(1), um(1);
  up << 1;
  um << -1;
  {
    QuantileLP lp(Z, Direction(up), 0.3);
    auto [primal, dual] = solve(lp);
    CHECK(primal.a == doctest::Approx(2.0));
    CHECK(primal.N == 1);
    CHECK(primal.N + primal.Z0 >= 2);
    CHECK(verify_certificate(lp, primal, dual).pass);
  }
  {
    // pointing left: hyperplane sits at the 0.7-quantile from the left
    QuantileLP lp(Z, Direction(um), 0.3);
    auto [primal, dual] = solve(lp);
    CHECK(primal.a == doctest::Approx(-4.0));
    CHECK(verify_certificate(lp, primal, dual).pass);
  }
}

TEST_CASE("square corners cut off nothing at small tau") {
  QuantileLP lp(sq4(), Direction(vec2(0, 1)), 0.2);
  auto [primal, dual] = solve(lp);
  CHECK(primal.a == doctest::Approx(-0.5));
  CHECK(primal.c(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(primal.c(1) == doctest::Approx(1.0));
  CHECK(primal.N == 0);
  CHECK(verify_certificate(lp, primal, dual).pass);
}

TEST_CASE("objective matches the exhaustive basis oracle") {
  for (int k : {2, 3}) {
    Matrix Z = gaussian_cloud(k, 9 + k, 42 + k);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss;
    for (double tau : {0.17, 0.31, 0.46}) {
      Vector u(k);
      for (int j = 0; j < k; ++j) u(j) = gauss(rng);
      QuantileLP lp(Z, Direction(u), tau);
      auto [primal, dual] = solve(lp);
      double obj = 0.0;
      Vector r = Z.transpose() * primal.c - Vector::Constant(lp.n(), primal.a);
      for (int i = 0; i < lp.n(); ++i) obj += check_loss(r(i), tau);
      CHECK(obj == doctest::Approx(oracle_objective(Z, lp.u.u, tau)).epsilon(1e-10));
      CHECK(obj == doctest::Approx(dual.lambda_D).epsilon(1e-10));
    }
  }
}

TEST_CASE("dual scores have the sign structure of the residuals") {
  Matrix Z = gaussian_cloud(2, 101, 7);
  for (double tau : {0.103, 0.257, 0.499, 0.761}) {
    QuantileLP lp(Z, Direction(vec2(0.6, -0.8)), tau);
    auto [primal, dual] = solve(lp);
    Vector r = Z.transpose() * primal.c - Vector::Constant(lp.n(), primal.a);
    CHECK(std::abs(dual.mu.sum()) < 1e-9);
    CHECK((dual.lambda_D * lp.u.u + Z * dual.mu).norm() < 1e-8);
    for (int i = 0; i < lp.n(); ++i) {
      CHECK(dual.mu(i) >= -tau - 1e-12);
      CHECK(dual.mu(i) <= 1 - tau + 1e-12);
      if (r(i) > 1e-9) CHECK(dual.mu(i) == doctest::Approx(-tau));
      if (r(i) < -1e-9) CHECK(dual.mu(i) == doctest::Approx(1 - tau));
    }
    CHECK(dual.lambda >= 0.0);
    CHECK(lp.u.u.dot(primal.c) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("solution does not depend on the choice of orthobasis") {
  Matrix Z = gaussian_cloud(3, 40, 3);
  Vector u(3);
  u << 0.2, -0.7, 0.4;
  Direction du(u);
  Matrix gamma = make_orthobasis(du);
  double th = 0.83;
  Matrix R(2, 2);
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  Matrix gamma2 = gamma * R;

  QuantileLP lp1(Z, du, 0.27);
  QuantileLP lp2(Z, du, 0.27, gamma2);
  auto [p1, d1] = solve(lp1);
  auto [p2, d2] = solve(lp2);
  CHECK(std::abs(p1.a - p2.a) < 1e-9);
  CHECK((p1.c - p2.c).norm() < 1e-9);
  CHECK(std::abs(d1.lambda - d2.lambda) < 1e-9);
}

TEST_CASE("integer n*tau is rejected unless explicitly allowed") {
  Matrix Z = gaussian_cloud(2, 10, 19);
  QuantileLP lp(Z, Direction(vec2(1, 0)), 0.3);  // n*tau = 3
  CHECK_THROWS_AS((void)solve(lp), DegeneracyError);
  SolveOptions opts;
  opts.allow_degenerate = true;
  auto [primal, dual] = solve(lp, opts);
  CHECK(primal.nonunique);
  CHECK(verify_certificate(lp, primal, dual).xi_in_box);
}

TEST_CASE("ties on a grid need jitter") {
  // 5x5 lattice: many collinear triples
  Matrix Z(2, 25);
  int col = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) Z.col(col++) = vec2(i, j);
  QuantileLP lp(Z, Direction(vec2(1, 1)), 0.273);
  SolveOptions opts;
  opts.jitter = true;
  opts.jitter_seed = 11;
  auto [primal, dual] = solve(lp, opts);
  CHECK(verify_certificate(lp, primal, dual).sandwich_ok);
  CHECK(primal.N <= 0.273 * 25);
  CHECK(primal.N + primal.Z0 >= 0.273 * 25);
}

TEST_CASE("certificate rejects a shifted hyperplane") {
  QuantileLP lp(s3(), Direction(vec2(0, 1)), 0.3);
  auto [primal, dual] = solve(lp);
  PrimalSolution bad = primal;
  bad.a += 0.1;
  auto rep = verify_certificate(lp, bad, dual);
  CHECK_FALSE(rep.sandwich_ok);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("warm starts reach the same optimum") {
  Matrix Z = gaussian_cloud(2, 60, 31);
  QuantileLP lp(Z, Direction(vec2(0.3, 1.0)), 0.41);
  auto [p1, d1] = solve(lp);
  SolveOptions opts;
  opts.start_basis = {7, 51};  // arbitrary invertible pair
  auto [p2, d2] = solve(lp, opts);
  CHECK(std::abs(p1.a - p2.a) < 1e-9);
  CHECK((p1.c - p2.c).norm() < 1e-9);
}

TEST_CASE("input validation") {
  Matrix Z = gaussian_cloud(2, 10, 1);
  CHECK_THROWS_AS(QuantileLP(Z, Direction(vec2(1, 0)), 0.0), InvalidInput);
  CHECK_THROWS_AS(QuantileLP(Z, Direction(vec2(1, 0)), 1.0), InvalidInput);
  Matrix tiny = gaussian_cloud(2, 2, 1);
  CHECK_THROWS_AS(QuantileLP(tiny, Direction(vec2(1, 0)), 0.25), InvalidInput);
  Matrix bad = Z;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(QuantileLP(bad, Direction(vec2(1, 0)), 0.25), InvalidInput);
}
