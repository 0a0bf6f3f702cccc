#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dirq/depth.hpp"

using namespace dirq;

namespace {

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Matrix sq4() {
  Matrix Z(2, 4);
  Z << -0.5, 0.5, -0.5, 0.5, -0.5, -0.5, 0.5, 0.5;
  return Z;
}

Matrix cloud(int k, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Matrix Z(k, n);
  for (int i = 0; i < k * n; ++i) Z.data()[i] = gauss(rng);
  return Z;
}

std::vector<Vector> corners() {
  return {vec2(-0.5, -0.5), vec2(0.5, -0.5), vec2(-0.5, 0.5), vec2(0.5, 0.5)};
}

}  // namespace

TEST_CASE("square region at tau 0.2 is the square itself") {
  DepthRegion r = region(sq4(), 0.2);
  REQUIRE(!r.polytope.empty);
  CHECK(r.level == 1);
  CHECK(hausdorff_vertex_distance(r.polytope.vertices, corners()) < 1e-9);
  CHECK(r.polytope.area() == doctest::Approx(1.0).epsilon(1e-9));

  DepthRegion deep = region(sq4(), 0.9);
  CHECK(deep.polytope.empty);
}

TEST_CASE("region agrees with the enumeration oracle across levels") {
  // Theorem-style equality: for tau in ((l-1)/n, l/n) the tau-region is the
  // depth region at level l whenever the latter is full-dimensional.
  Matrix Z = cloud(2, 20, 11);
  for (int l : {2, 4, 6}) {
    double tau = (l - 0.5) / 20.0;
    DepthRegion qr = region(Z, tau);
    DepthRegion oracle = brute_force_region(Z, l);
    REQUIRE(!oracle.polytope.empty);
    REQUIRE(!oracle.polytope.degenerate);
    CHECK(hausdorff_vertex_distance(qr.polytope, oracle.polytope) < 1e-8);
  }

  Matrix Z3 = cloud(3, 15, 23);
  double tau = 0.22;  // l = 4 for n = 15
  DepthRegion qr = region(Z3, tau);
  DepthRegion oracle = brute_force_region(Z3, 4);
  REQUIRE(!oracle.polytope.empty);
  CHECK(hausdorff_vertex_distance(qr.polytope, oracle.polytope) < 1e-8);
}

TEST_CASE("adjacent contours from one sweep") {
  auto sw = sweep(sq4(), 0.3);
  auto contours = extract_adjacent_contours(sw, sq4());
  REQUIRE(contours.size() == 2);
  CHECK(contours[0].level == 1);
  CHECK(hausdorff_vertex_distance(contours[0].polytope.vertices, corners()) <
        1e-9);
  CHECK(contours[1].level == 2);
  CHECK(contours[1].polytope.degenerate);
  REQUIRE(!contours[1].polytope.vertices.empty());
  for (const Vector& v : contours[1].polytope.vertices)
    CHECK(v.norm() < 1e-8);

  // n = 20, tau = 0.26: one sweep carries the level-5 and level-6 contours
  Matrix Z = cloud(2, 20, 31);
  auto sw2 = sweep(Z, 0.26);
  auto cs = extract_adjacent_contours(sw2, Z);
  REQUIRE(cs.size() == 2);
  for (int i : {0, 1}) {
    DepthRegion oracle = brute_force_region(Z, 5 + i);
    CHECK(cs[i].level == 5 + i);
    if (!oracle.polytope.empty && !oracle.polytope.degenerate)
      CHECK(hausdorff_vertex_distance(cs[i].polytope, oracle.polytope) < 1e-8);
  }

  CHECK_THROWS_AS((void)extract_adjacent_contours(sw2, Z, {3}), InvalidInput);
  CHECK_THROWS_AS((void)extract_adjacent_contours(sw2, Z, {8}), InvalidInput);
}

TEST_CASE("exact depth of hand-checked points") {
  CHECK(brute_force_depth(vec2(0, 0), sq4()) == doctest::Approx(0.5));
  CHECK(brute_force_depth(vec2(2, 2), sq4()) == doctest::Approx(0.0));
  for (int i = 0; i < 4; ++i)
    CHECK(brute_force_depth(sq4().col(i), sq4()) >= 0.25 - 1e-12);

  Matrix Z3 = cloud(3, 12, 3);
  CHECK(brute_force_depth(10.0 * Vector::Ones(3), Z3) == 0.0);
  CHECK(brute_force_depth(Z3.col(0), Z3) >= 1.0 / 12 - 1e-12);
}

TEST_CASE("depth function and depth regions tell the same story") {
  for (int k : {2, 3}) {
    Matrix Z = cloud(k, k == 2 ? 25 : 14, 40 + k);
    int n = static_cast<int>(Z.cols());
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    std::vector<DepthRegion> regions;
    int lmax = max_nonempty_level(Z);
    for (int l = 1; l <= lmax; ++l) regions.push_back(brute_force_region(Z, l));
    for (int rep = 0; rep < 25; ++rep) {
      Vector z(k);
      for (int j = 0; j < k; ++j) z(j) = 0.8 * gauss(rng);
      double d = brute_force_depth(z, Z);
      for (int l = 1; l <= lmax; ++l) {
        bool inside = !regions[l - 1].polytope.empty &&
                      regions[l - 1].polytope.contains(z, 1e-9);
        CHECK(inside == (d >= static_cast<double>(l) / n - 1e-12));
      }
    }
  }
}

TEST_CASE("oracle regions are nested and bounded by the centerpoint level") {
  Matrix Z = cloud(2, 30, 77);
  int lmax = max_nonempty_level(Z);
  CHECK(lmax >= 10);  // ceil(30 / 3)
  DepthRegion prev = brute_force_region(Z, 1);
  for (int l = 2; l <= lmax; ++l) {
    DepthRegion cur = brute_force_region(Z, l);
    if (cur.polytope.empty || cur.polytope.degenerate) break;
    CHECK(polytope_contains(prev.polytope, cur.polytope));
    prev = cur;
  }

  CHECK(max_nonempty_level(sq4()) == 2);
  Matrix tri(2, 3);
  tri << 0, 1, 0.2, 0, 0, 1;
  CHECK(max_nonempty_level(tri) == 1);
  CHECK(!brute_force_region(tri, 1).polytope.empty);
  CHECK(max_nonempty_level(cloud(2, 7, 9)) >= 3);
}

TEST_CASE("regions shrink as tau grows and transform affinely") {
  Matrix Z = cloud(2, 21, 55);
  DepthRegion shallow = region(Z, 0.12);
  DepthRegion deeper = region(Z, 0.31);
  REQUIRE(!deeper.polytope.empty);
  CHECK(polytope_contains(shallow.polytope, deeper.polytope));

  Matrix M(2, 2);
  M << 1.4, -0.3, 0.6, 0.9;
  Vector d = vec2(-2.0, 0.7);
  Matrix MZ = M * Z;
  MZ.colwise() += d;
  DepthRegion img = region(MZ, 0.31);
  std::vector<Vector> mapped;
  for (const Vector& v : deeper.polytope.vertices) mapped.push_back(M * v + d);
  CHECK(hausdorff_vertex_distance(img.polytope.vertices, mapped) < 1e-8);
}

TEST_CASE("projection-quantile envelopes contain the region") {
  auto axis_dirs = std::vector<Direction>{
      Direction(vec2(1, 0)), Direction(vec2(-1, 0)), Direction(vec2(0, 1)),
      Direction(vec2(0, -1))};
  DepthRegion exact = region(sq4(), 0.2);
  DepthRegion axis = km_envelope(sq4(), 0.2, axis_dirs);
  CHECK(hausdorff_vertex_distance(axis.polytope.vertices, corners()) < 1e-9);

  auto ring = [](int m) {
    std::vector<Direction> dirs;
    for (int i = 0; i < m; ++i) {
      double th = 2.0 * M_PI * (i + 0.37) / m;
      dirs.push_back(Direction(vec2(std::cos(th), std::sin(th))));
    }
    return dirs;
  };
  DepthRegion env64 = km_envelope(sq4(), 0.2, ring(64));
  DepthRegion env1024 = km_envelope(sq4(), 0.2, ring(1024));
  CHECK(polytope_contains(env64.polytope, exact.polytope));
  CHECK(polytope_contains(env1024.polytope, exact.polytope));
  CHECK(env64.polytope.area() >= exact.polytope.area() - 1e-12);
  CHECK(env1024.polytope.area() >= exact.polytope.area() - 1e-12);
  CHECK(env1024.polytope.area() <= env64.polytope.area() + 1e-12);

  Matrix Z = cloud(2, 33, 8);
  DepthRegion r = region(Z, 0.2);
  DepthRegion env = km_envelope(Z, 0.2, ring(48));
  CHECK(polytope_contains(env.polytope, r.polytope));
}

TEST_CASE("sampled regions approach the population region") {
  DensityModel model =
      DensityModel::product_uniform(vec2(-0.5, -0.5), vec2(0.5, 0.5));
  const double tau = 0.2;
  const int m_dirs = 360;

  // population reference: quantile halfspaces over a ring of directions
  std::vector<Halfspace> pop_hs;
  for (int i = 0; i < m_dirs; ++i) {
    double th = 2.0 * M_PI * (i + 0.51) / m_dirs;
    Direction u(vec2(std::cos(th), std::sin(th)));
    auto pf = population_fit(model, tau, u);
    pop_hs.push_back(Halfspace{Hyperplane{pf.c, pf.a}, Side::UpperClosed});
  }
  ConvexPolytope pop = intersect_halfspaces(pop_hs);
  REQUIRE(!pop.empty);

  // empirical counterpart from a large sample, sweeping the same ring with
  // warm starts
  Matrix Z = model.sample(50001, 2024);
  std::vector<Halfspace> emp_hs;
  SolveOptions so;
  for (int i = 0; i < m_dirs; ++i) {
    double th = 2.0 * M_PI * (i + 0.51) / m_dirs;
    auto f = fit(Z, tau, Direction(vec2(std::cos(th), std::sin(th))), so);
    so.start_basis = f.basis;
    emp_hs.push_back(Halfspace{f.hyperplane(), Side::UpperClosed});
  }
  ConvexPolytope emp = intersect_halfspaces(emp_hs);
  REQUIRE(!emp.empty);

  // set Hausdorff distance: vertex-to-vertex is biased upwards where one
  // polygon rounds a corner the other spans with a single edge
  auto dist_to = [](const Vector& p, const ConvexPolytope& P) {
    if (P.contains(p, 1e-12)) return 0.0;
    auto vs = P.ordered_vertices_ccw();
    double best = 1e300;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const Vector& a = vs[i];
      const Vector& b = vs[(i + 1) % vs.size()];
      Vector d = b - a;
      double t = d.squaredNorm() > 0 ? (p - a).dot(d) / d.squaredNorm() : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      best = std::min(best, (p - (a + t * d)).norm());
    }
    return best;
  };
  double h = 0.0;
  for (const Vector& v : emp.vertices) h = std::max(h, dist_to(v, pop));
  for (const Vector& v : pop.vertices) h = std::max(h, dist_to(v, emp));
  CHECK(h < 0.02);
}
