#include "dirq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "dirq/hull.hpp"
#include "dirq/lp.hpp"

namespace dirq {

Direction::Direction(Vector v) {
  if (v.size() < 1 || !v.allFinite())
    throw InvalidInput("Direction: zero or non-finite vector");
  double n = v.norm();
  if (n < 1e-14) throw InvalidInput("Direction: zero vector");
  u = v / n;
}

Matrix make_orthobasis(const Direction& dir) {
  const Vector& u = dir.u;
  const int k = static_cast<int>(u.size());
  Matrix gamma(k, k - 1);
  if (k == 1) return gamma;
  // Householder reflection H = I - 2vv'/v'v with v = u + sign(u_0) e_1 maps
  // e_1 onto -sign(u_0) u; its remaining columns complete the basis.
  double s = (u(0) >= 0.0) ? 1.0 : -1.0;
  Vector v = u;
  v(0) += s;
  double vv = v.squaredNorm();
  for (int j = 1; j < k; ++j) {
    Vector col = Vector::Zero(k);
    col(j) = 1.0;
    col -= (2.0 * v(j) / vv) * v;
    gamma.col(j - 1) = col;
  }
  return gamma;
}

Matrix make_orthobasis(const Vector& u) { return make_orthobasis(Direction(u)); }

Hyperplane Hyperplane::normalized() const {
  double n = c.norm();
  if (n < 1e-300) throw InvalidInput("Hyperplane: zero normal");
  return Hyperplane{c / n, a / n};
}

bool ConvexPolytope::contains(const Vector& z, double tol) const {
  for (const auto& f : facets)
    if (!f.halfspace.contains(z, tol)) return false;
  return true;
}

std::vector<Vector> ConvexPolytope::ordered_vertices_ccw() const {
  if (vertices.empty()) return {};
  if (vertices[0].size() != 2)
    throw InvalidInput("ordered_vertices_ccw: k=2 only");
  Vector cen = Vector::Zero(2);
  for (const auto& v : vertices) cen += v;
  cen /= static_cast<double>(vertices.size());
  std::vector<Vector> out = vertices;
  std::sort(out.begin(), out.end(), [&](const Vector& a, const Vector& b) {
    return std::atan2(a(1) - cen(1), a(0) - cen(0)) <
           std::atan2(b(1) - cen(1), b(0) - cen(0));
  });
  return out;
}

double ConvexPolytope::area() const {
  if (empty || vertices.size() < 3) return 0.0;
  auto vs = ordered_vertices_ccw();
  double acc = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const Vector& p = vs[i];
    const Vector& q = vs[(i + 1) % vs.size()];
    acc += p(0) * q(1) - q(0) * p(1);
  }
  return 0.5 * std::abs(acc);
}

namespace {

void dedup_vertices(std::vector<Vector>& verts, double tol) {
  std::vector<Vector> out;
  for (const auto& v : verts) {
    bool dup = false;
    for (const auto& w : out)
      if ((v - w).lpNorm<Eigen::Infinity>() <= tol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(v);
  }
  verts = std::move(out);
}

// Normalized halfspaces with back-references into the input list, exact
// duplicates merged (keeping the tighter one for parallel same-direction pairs
// is handled by the intersection algorithms themselves).
struct NormHs {
  Vector c;  // unit
  double a;
  int input_index;
};

std::vector<NormHs> normalize_input(const std::vector<Halfspace>& hs) {
  std::vector<NormHs> out;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (hs[i].side != Side::UpperClosed)
      throw InvalidInput("intersect_halfspaces: all halfspaces must be upper-closed");
    Hyperplane p = hs[i].plane.normalized();
    bool dup = false;
    for (const auto& q : out)
      if ((q.c - p.c).lpNorm<Eigen::Infinity>() <= kGeomTol &&
          std::abs(q.a - p.a) <= kGeomTol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back({p.c, p.a, static_cast<int>(i)});
  }
  return out;
}

// Chebyshev center: max r s.t. c_i'z - r >= a_i (unit normals).
LpResult chebyshev(const std::vector<NormHs>& hs, int k, double box) {
  Matrix A(hs.size(), k + 1);
  Vector b(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    A.row(i).head(k) = -hs[i].c.transpose();
    A(i, k) = 1.0;
    b(i) = -hs[i].a;
  }
  Vector obj = Vector::Zero(k + 1);
  obj(k) = 1.0;
  return lp_maximize(obj, A, b, box);
}

// Extreme directions of the recession cone {d : c_i'd >= 0}, probed along the
// coordinate axes. Used only for diagnostics on unbounded input.
std::vector<Vector> recession_directions(const std::vector<NormHs>& hs, int k) {
  std::vector<Vector> dirs;
  Matrix A(hs.size(), k);
  for (std::size_t i = 0; i < hs.size(); ++i) A.row(i) = -hs[i].c.transpose();
  Vector b = Vector::Zero(hs.size());
  for (int j = 0; j < k; ++j) {
    for (double sgn : {1.0, -1.0}) {
      Vector obj = Vector::Zero(k);
      obj(j) = sgn;
      LpResult r = lp_maximize(obj, A, b, 1.0);
      if (r.status == LpResult::Status::Optimal && r.x.norm() > 1e-6) {
        Vector d = r.x / r.x.norm();
        bool dup = false;
        for (const auto& e : dirs)
          if ((d - e).norm() < 1e-6) dup = true;
        if (!dup) dirs.push_back(d);
      }
    }
  }
  return dirs;
}

bool cone_is_pointed(const std::vector<NormHs>& hs, int k) {
  // recession cone trivial iff for every axis objective the LP over the cone
  // (boxed) has optimum ~0
  Matrix A(hs.size(), k);
  for (std::size_t i = 0; i < hs.size(); ++i) A.row(i) = -hs[i].c.transpose();
  Vector b = Vector::Zero(hs.size());
  for (int j = 0; j < k; ++j) {
    for (double sgn : {1.0, -1.0}) {
      Vector obj = Vector::Zero(k);
      obj(j) = sgn;
      LpResult r = lp_maximize(obj, A, b, 1.0);
      if (r.status == LpResult::Status::Optimal && obj.dot(r.x) > 1e-7) return false;
    }
  }
  return true;
}

// --- dual transform about an interior point + convex hull ------------------
//
// Each halfspace c'z >= a maps, after centering at an interior point z0, to
// the dual point -c/(c'z0 - a). Hull facets of the dual point set correspond
// to primal vertices (recovered by solving the k incident boundary planes),
// hull vertices to the non-redundant halfspaces. For k=2 the hull is a sorted
// incremental monotone chain; for k>=3 the general incremental hull.

std::vector<HullFacet> hull_2d(const std::vector<Vector>& pts) {
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (pts[a](0) != pts[b](0)) return pts[a](0) < pts[b](0);
    return pts[a](1) < pts[b](1);
  });
  auto turns_left = [&](int o, int a, int b) {
    Vector da = pts[a] - pts[o], db = pts[b] - pts[o];
    double cr = da(0) * db(1) - da(1) * db(0);
    return cr > 1e-12 * da.norm() * db.norm();
  };
  std::vector<int> h;
  for (int pass = 0; pass < 2; ++pass) {
    std::size_t base = h.size();
    auto begin = idx.begin();
    auto end = idx.end();
    for (auto it = begin; it != end; ++it) {
      int p = (pass == 0) ? *it : *(idx.rbegin() + (it - begin));
      while (h.size() >= base + 2 && !turns_left(h[h.size() - 2], h[h.size() - 1], p))
        h.pop_back();
      h.push_back(p);
    }
    h.pop_back();
  }
  if (h.size() < 3) throw NumericError("hull_2d: degenerate point set");
  std::vector<HullFacet> out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    int a = h[i], b = h[(i + 1) % h.size()];
    HullFacet f;
    f.verts = {a, b};
    Vector d = pts[b] - pts[a];
    Vector n(2);
    n << d(1), -d(0);  // outward for a CCW chain
    double nn = n.norm();
    if (nn < 1e-300) continue;
    f.normal = n / nn;
    f.offset = f.normal.dot(pts[a]);
    out.push_back(f);
  }
  return out;
}

ConvexPolytope intersect_dual(const std::vector<NormHs>& input,
                              const std::vector<Halfspace>& original,
                              const Vector& center) {
  const int k = static_cast<int>(center.size());
  std::vector<Vector> dualpts;
  dualpts.reserve(input.size());
  for (const auto& h : input) {
    double beta = h.c.dot(center) - h.a;  // > 0 by interiority
    if (beta < 1e-12) beta = 1e-12;
    dualpts.push_back(-h.c / beta);
  }
  std::vector<HullFacet> hull =
      (k == 2) ? hull_2d(dualpts) : convex_hull(dualpts, 1e-10);

  ConvexPolytope poly;
  poly.dim = k;
  std::vector<Vector> verts;
  std::vector<bool> is_facet(input.size(), false);
  for (const auto& hf : hull) {
    if (hf.offset < 1e-12) continue;  // origin must be strictly inside
    // primal vertex: solve the incident boundary planes exactly
    Matrix A(hf.verts.size(), k);
    Vector b(hf.verts.size());
    for (std::size_t r = 0; r < hf.verts.size(); ++r) {
      A.row(r) = input[hf.verts[r]].c.transpose();
      b(r) = input[hf.verts[r]].a;
    }
    Eigen::FullPivLU<Matrix> lu(A);
    Vector v;
    if (lu.rank() == k) {
      v = lu.solve(b);
    } else {
      v = center + hf.normal / hf.offset;
    }
    verts.push_back(v);
    for (int vi : hf.verts) is_facet[vi] = true;
  }
  dedup_vertices(verts, kGeomTol);
  poly.vertices = std::move(verts);
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (!is_facet[i]) continue;
    PolytopeFacet f;
    f.halfspace = original[input[i].input_index];
    f.input_index = input[i].input_index;
    poly.facets.push_back(f);
  }
  return poly;
}

// Degenerate k=2 case: feasible set lies on a line; clip it to a segment.
ConvexPolytope degenerate_2d(const std::vector<NormHs>& input,
                             const Vector& center) {
  ConvexPolytope poly;
  poly.dim = 2;
  poly.degenerate = true;
  // find an opposing tight pair to get the carrier line direction
  Vector dir;
  bool found = false;
  for (std::size_t i = 0; i < input.size() && !found; ++i) {
    if (std::abs(input[i].c.dot(center) - input[i].a) > 1e-7) continue;
    for (std::size_t j = i + 1; j < input.size() && !found; ++j) {
      if (std::abs(input[j].c.dot(center) - input[j].a) > 1e-7) continue;
      if (input[i].c.dot(input[j].c) < -1.0 + 1e-9) {
        dir = Vector(2);
        dir << -input[i].c(1), input[i].c(0);
        found = true;
      }
    }
  }
  if (!found) {
    // pointlike degeneracy (or numerically flat): report the witness point
    poly.vertices = {center};
    return poly;
  }
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& h : input) {
    double num = h.a - h.c.dot(center);
    double den = h.c.dot(dir);
    if (std::abs(den) < 1e-12) continue;
    double t = num / den;
    if (den > 0) lo = std::max(lo, t);
    else hi = std::min(hi, t);
  }
  if (lo > hi + kGeomTol) {
    poly.empty = true;
    return poly;
  }
  std::vector<Vector> verts = {center + lo * dir, center + hi * dir};
  dedup_vertices(verts, kGeomTol);
  poly.vertices = std::move(verts);
  return poly;
}

}  // namespace

ConvexPolytope intersect_halfspaces(const std::vector<Halfspace>& halfspaces) {
  if (halfspaces.empty()) throw InvalidInput("intersect_halfspaces: empty input");
  const int k = static_cast<int>(halfspaces[0].plane.c.size());
  if (k < 2 || k > 5) throw InvalidInput("intersect_halfspaces: k must be in {2,...,5}");

  auto input = normalize_input(halfspaces);
  const double box = 1e7;

  LpResult cheb = chebyshev(input, k, box);
  ConvexPolytope poly;
  poly.dim = k;
  if (cheb.status == LpResult::Status::Infeasible) {
    poly.empty = true;
    return poly;
  }
  const double radius = cheb.x(k);
  Vector center = cheb.x.head(k);
  const double rtol = 1e-9 * std::max(1.0, center.lpNorm<Eigen::Infinity>());
  if (radius < -rtol) {
    poly.empty = true;
    return poly;
  }

  if (!cone_is_pointed(input, k)) {
    poly.unbounded = true;
    poly.recession_dirs = recession_directions(input, k);
    return poly;
  }

  if (radius <= rtol) {
    if (k == 2) return degenerate_2d(input, center);
    poly.degenerate = true;
    poly.vertices = {center};
    return poly;
  }

  (void)box;
  return intersect_dual(input, halfspaces, center);
}

double hausdorff_vertex_distance(const std::vector<Vector>& a,
                                 const std::vector<Vector>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  double h = 0.0;
  auto one_sided = [&](const std::vector<Vector>& p, const std::vector<Vector>& q) {
    for (const auto& x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : q) best = std::min(best, (x - y).norm());
      h = std::max(h, best);
    }
  };
  one_sided(a, b);
  one_sided(b, a);
  return h;
}

double hausdorff_vertex_distance(const ConvexPolytope& a, const ConvexPolytope& b) {
  return hausdorff_vertex_distance(a.vertices, b.vertices);
}

bool polytope_contains(const ConvexPolytope& outer, const ConvexPolytope& inner,
                       double tol) {
  for (const auto& v : inner.vertices)
    if (!outer.contains(v, tol)) return false;
  return true;
}

}  // namespace dirq
