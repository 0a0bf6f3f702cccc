#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dirq/geometry.hpp"
#include "dirq/hull.hpp"
#include "dirq/lp.hpp"

using namespace dirq;

namespace {

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Vector vec3(double x, double y, double z) {
  Vector v(3);
  v << x, y, z;
  return v;
}

Halfspace hs(const Vector& c, double a) {
  return Halfspace{Hyperplane{c, a}, Side::UpperClosed};
}

bool has_vertex(const ConvexPolytope& p, const Vector& v, double tol = 1e-8) {
  return std::any_of(p.vertices.begin(), p.vertices.end(), [&](const Vector& w) {
    return (w - v).lpNorm<Eigen::Infinity>() <= tol;
  });
}

}  // namespace

TEST_CASE("direction normalizes and validates") {
  Direction d(vec2(3.0, 4.0));
  CHECK(d.u(0) == doctest::Approx(0.6));
  CHECK(d.u(1) == doctest::Approx(0.8));
  CHECK_THROWS_AS(Direction(vec2(0.0, 0.0)), InvalidInput);
  Vector bad = vec2(1.0, std::nan(""));
  CHECK_THROWS_AS((void)Direction(bad), InvalidInput);
}

TEST_CASE("orthobasis completes u to an orthonormal frame") {
  Matrix g = make_orthobasis(vec2(1.0, 0.0));
  REQUIRE(g.rows() == 2);
  REQUIRE(g.cols() == 1);
  CHECK(g(0, 0) == doctest::Approx(0.0));
  CHECK(std::abs(g(1, 0)) == doctest::Approx(1.0));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int k = 2; k <= 5; ++k) {
    for (int rep = 0; rep < 20; ++rep) {
      Vector u(k);
      for (int i = 0; i < k; ++i) u(i) = gauss(rng);
      if (u.norm() < 1e-3) continue;
      Direction d(u);
      Matrix gam = make_orthobasis(d);
      CHECK((gam.transpose() * gam - Matrix::Identity(k - 1, k - 1)).norm() < 1e-12);
      CHECK((gam.transpose() * d.u).norm() < 1e-12);
      Matrix proj = gam * gam.transpose() + d.u * d.u.transpose();
      CHECK((proj - Matrix::Identity(k, k)).norm() < 1e-12);
    }
  }
}

TEST_CASE("orthobasis is deterministic") {
  Vector u = vec3(0.3, -0.5, 0.81);
  Matrix a = make_orthobasis(u);
  Matrix b = make_orthobasis(u);
  CHECK((a - b).norm() == 0.0);
}

TEST_CASE("hyperplane normalization keeps orientation") {
  Hyperplane p{vec2(3.0, 4.0), 10.0};
  Hyperplane q = p.normalized();
  CHECK(q.c.norm() == doctest::Approx(1.0));
  CHECK(q.a == doctest::Approx(2.0));
  CHECK(q.eval(vec2(3.0, 1.0)) * p.eval(vec2(3.0, 1.0)) > 0.0);
}

TEST_CASE("axis-aligned box intersection") {
  std::vector<Halfspace> box = {
      hs(vec2(1, 0), -0.5),
      hs(vec2(-1, 0), -0.5),
      hs(vec2(0, 1), -0.5),
      hs(vec2(0, -1), -0.5),
  };
  ConvexPolytope p = intersect_halfspaces(box);
  REQUIRE_FALSE(p.empty);
  REQUIRE_FALSE(p.degenerate);
  REQUIRE_FALSE(p.unbounded);
  REQUIRE(p.vertices.size() == 4);
  for (double sx : {-0.5, 0.5})
    for (double sy : {-0.5, 0.5}) CHECK(has_vertex(p, vec2(sx, sy)));
  CHECK(p.area() == doctest::Approx(1.0));
  CHECK(p.facets.size() == 4);
  CHECK(p.contains(vec2(0.0, 0.0)));
  CHECK_FALSE(p.contains(vec2(0.51, 0.0)));
}

TEST_CASE("contradictory halfspaces give the empty set") {
  std::vector<Halfspace> in = {hs(vec2(1, 0), 1.0), hs(vec2(-1, 0), 0.0)};
  ConvexPolytope p = intersect_halfspaces(in);
  CHECK(p.empty);
  CHECK(p.vertices.empty());
}

TEST_CASE("circumscribed polygon matches the pairwise-intersection oracle") {
  const int m = 20;
  std::vector<Halfspace> in;
  for (int i = 0; i < m; ++i) {
    double th = 2.0 * M_PI * i / m + 0.1;
    in.push_back(hs(vec2(-std::cos(th), -std::sin(th)), -1.0));
  }
  ConvexPolytope p = intersect_halfspaces(in);
  REQUIRE(p.vertices.size() == static_cast<std::size_t>(m));
  CHECK(p.facets.size() == static_cast<std::size_t>(m));

  // oracle: adjacent tangent lines meet at radius 1/cos(pi/m)
  std::vector<Vector> expect;
  double r = 1.0 / std::cos(M_PI / m);
  for (int i = 0; i < m; ++i) {
    double th = 2.0 * M_PI * (i + 0.5) / m + 0.1;
    expect.push_back(vec2(r * std::cos(th), r * std::sin(th)));
  }
  CHECK(hausdorff_vertex_distance(p.vertices, expect) < 1e-9);
}

TEST_CASE("intersection is order-invariant and drops redundant halfspaces") {
  std::mt19937_64 rng(11);
  std::vector<Halfspace> in;
  for (int i = 0; i < 40; ++i) {
    double th = 2.0 * M_PI * i / 40;
    in.push_back(hs(vec2(-std::cos(th), -std::sin(th)), -1.0 - 0.3 * ((i * 7) % 5)));
  }
  ConvexPolytope base = intersect_halfspaces(in);

  std::vector<Halfspace> shuffled = in;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  ConvexPolytope perm = intersect_halfspaces(shuffled);
  CHECK(hausdorff_vertex_distance(base, perm) < 1e-9);

  std::vector<Halfspace> padded = in;
  padded.push_back(hs(vec2(1.0, 0.0), -50.0));  // far away, redundant
  ConvexPolytope pad = intersect_halfspaces(padded);
  CHECK(hausdorff_vertex_distance(base, pad) < 1e-9);
  for (const auto& f : pad.facets) CHECK(f.input_index != static_cast<int>(padded.size()) - 1);
}

TEST_CASE("lower-dimensional intersection is flagged, not silently emptied") {
  std::vector<Halfspace> in = {
      hs(vec2(1, 0), 0.0),
      hs(vec2(-1, 0), 0.0),
      hs(vec2(0, 1), -1.0),
      hs(vec2(0, -1), -1.0),
  };
  ConvexPolytope p = intersect_halfspaces(in);
  CHECK(p.degenerate);
  CHECK_FALSE(p.empty);
  REQUIRE(p.vertices.size() == 2);
  CHECK(has_vertex(p, vec2(0.0, 1.0), 1e-6));
  CHECK(has_vertex(p, vec2(0.0, -1.0), 1e-6));
}

TEST_CASE("unbounded intersection reports recession directions") {
  std::vector<Halfspace> in = {hs(vec2(0, 1), 0.0), hs(vec2(1, 0), 0.0)};
  ConvexPolytope p = intersect_halfspaces(in);
  CHECK(p.unbounded);
  CHECK_FALSE(p.empty);
  CHECK_FALSE(p.recession_dirs.empty());
  for (const auto& d : p.recession_dirs) {
    CHECK(d(0) >= -1e-9);
    CHECK(d(1) >= -1e-9);
  }
}

TEST_CASE("3d box intersection") {
  std::vector<Halfspace> in;
  for (int ax = 0; ax < 3; ++ax)
    for (double sgn : {1.0, -1.0}) {
      Vector c = Vector::Zero(3);
      c(ax) = sgn;
      in.push_back(hs(c, -0.5));
    }
  ConvexPolytope p = intersect_halfspaces(in);
  REQUIRE(p.vertices.size() == 8);
  for (double sx : {-0.5, 0.5})
    for (double sy : {-0.5, 0.5})
      for (double sz : {-0.5, 0.5}) CHECK(has_vertex(p, vec3(sx, sy, sz)));
  CHECK(p.facets.size() == 6);
}

TEST_CASE("3d circumscribed polytope vertices satisfy every input halfspace") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  std::vector<Halfspace> in;
  for (int i = 0; i < 60; ++i) {
    Vector c(3);
    for (int j = 0; j < 3; ++j) c(j) = gauss(rng);
    c /= c.norm();
    in.push_back(hs(-c, -1.0));  // tangent to the unit sphere
  }
  ConvexPolytope p = intersect_halfspaces(in);
  REQUIRE_FALSE(p.empty);
  REQUIRE_FALSE(p.unbounded);
  CHECK(p.vertices.size() >= 4);
  for (const auto& v : p.vertices) {
    CHECK(v.norm() >= 1.0 - 1e-9);  // outside the inscribed sphere
    for (const auto& h : in) CHECK(h.contains(v, 1e-8));
  }
  CHECK(p.contains(Vector::Zero(3)));
}

TEST_CASE("hausdorff distance on vertex sets") {
  std::vector<Vector> a = {vec2(0, 0), vec2(1, 0)};
  std::vector<Vector> b = {vec2(0, 0.5), vec2(1, 0)};
  CHECK(hausdorff_vertex_distance(a, b) == doctest::Approx(0.5));
  CHECK(hausdorff_vertex_distance(a, a) == 0.0);
  CHECK(std::isinf(hausdorff_vertex_distance(a, {})));
}

TEST_CASE("seidel lp solves small dense programs") {
  // max x + y  s.t.  x <= 1, y <= 2, x + y <= 2.5
  Matrix A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  Vector b(3);
  b << 1, 2, 2.5;
  Vector obj = vec2(1.0, 1.0);
  LpResult r = lp_maximize(obj, A, b);
  REQUIRE(r.status == LpResult::Status::Optimal);
  CHECK(obj.dot(r.x) == doctest::Approx(2.5));
  CHECK_FALSE(r.hit_box);

  // infeasible: x <= 0 and -x <= -1
  Matrix A2(2, 1);
  A2 << 1, -1;
  Vector b2(2);
  b2 << 0, -1;
  Vector one(1);
  one << 1.0;
  CHECK(lp_maximize(one, A2, b2).status == LpResult::Status::Infeasible);

  // unbounded objective hits the artificial box
  Matrix A3(1, 2);
  A3 << -1, 0;
  Vector b3(1);
  b3 << 0;
  LpResult r3 = lp_maximize(vec2(1, 0), A3, b3);
  REQUIRE(r3.status == LpResult::Status::Optimal);
  CHECK(r3.hit_box);
}

TEST_CASE("incremental hull recovers cube facets in 3d") {
  std::vector<Vector> pts;
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0})
      for (double sz : {-1.0, 1.0}) pts.push_back(vec3(sx, sy, sz));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-0.9, 0.9);
  for (int i = 0; i < 30; ++i) pts.push_back(vec3(unif(rng), unif(rng), unif(rng)));

  auto facets = convex_hull(pts);
  REQUIRE_FALSE(facets.empty());
  for (const auto& f : facets) {
    CHECK(std::abs(f.normal.norm() - 1.0) < 1e-12);
    // all points weakly beneath every facet
    for (const auto& p : pts) CHECK(f.normal.dot(p) <= f.offset + 1e-9);
    // interior points are never hull vertices
    for (int vi : f.verts) CHECK(vi < 8);
  }
  // every cube corner shows up on some facet
  std::vector<bool> seen(8, false);
  for (const auto& f : facets)
    for (int vi : f.verts) seen[vi] = true;
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool s) { return s; }));
}

TEST_CASE("hull in 4d keeps the cross-polytope vertices") {
  std::vector<Vector> pts;
  for (int ax = 0; ax < 4; ++ax)
    for (double sgn : {1.0, -1.0}) {
      Vector v = Vector::Zero(4);
      v(ax) = sgn;
      pts.push_back(v);
    }
  pts.push_back(Vector::Zero(4));  // interior
  auto facets = convex_hull(pts);
  REQUIRE(facets.size() == 16);
  for (const auto& f : facets)
    for (int vi : f.verts) CHECK(vi < 8);
}
