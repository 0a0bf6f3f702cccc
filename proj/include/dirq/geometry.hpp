#pragma once

#include <optional>
#include <vector>

#include "dirq/types.hpp"

namespace dirq {

/// A unit vector in R^k. Construction normalizes and rejects zero or
/// non-finite input.
struct Direction {
  Vector u;

  explicit Direction(Vector v);
  int dim() const { return static_cast<int>(u.size()); }
};

/// Deterministic orthonormal complement of u: a k x (k-1) matrix whose
/// columns, together with u, form an orthonormal basis of R^k. Built from
/// the Householder reflection mapping the first canonical axis onto u.
Matrix make_orthobasis(const Direction& u);
Matrix make_orthobasis(const Vector& u);

/// The hyperplane {z : c'z = a}.
struct Hyperplane {
  Vector c;
  double a = 0.0;

  double eval(const Vector& z) const { return c.dot(z) - a; }
  /// Scale so that ||c|| = 1, keeping orientation.
  Hyperplane normalized() const;
};

enum class Side {
  LowerOpen,    // {z : c'z <  a}
  UpperClosed,  // {z : c'z >= a}
};

struct Halfspace {
  Hyperplane plane;
  Side side = Side::UpperClosed;

  bool contains(const Vector& z, double tol = 0.0) const {
    double v = plane.eval(z);
    return side == Side::UpperClosed ? v >= -tol : v < tol;
  }
};

struct PolytopeFacet {
  Halfspace halfspace;  // always upper-closed
  int input_index = -1; // position in the halfspace list handed to intersect_halfspaces
  int cutoff = -1;      // observations strictly below the generating hyperplane, if known
};

/// Vertex-facet representation of an intersection of closed halfspaces.
struct ConvexPolytope {
  std::vector<Vector> vertices;
  std::vector<PolytopeFacet> facets;
  bool empty = false;
  bool degenerate = false;  // nonempty but lower-dimensional
  bool unbounded = false;
  std::vector<Vector> recession_dirs;
  int dim = 0;

  bool contains(const Vector& z, double tol = kGeomTol) const;
  /// Signed area for k=2 (vertices need not be ordered).
  double area() const;
  /// Vertices sorted counter-clockwise around the centroid (k=2 only).
  std::vector<Vector> ordered_vertices_ccw() const;
};

/// Intersect upper-closed halfspaces into a polytope. k in {2,...,5}.
/// Degenerate (lower-dimensional) intersections are flagged; unbounded
/// intersections are flagged with recession directions.
ConvexPolytope intersect_halfspaces(const std::vector<Halfspace>& halfspaces);

/// Symmetric Hausdorff distance between the vertex sets of two polytopes.
double hausdorff_vertex_distance(const ConvexPolytope& a, const ConvexPolytope& b);
double hausdorff_vertex_distance(const std::vector<Vector>& a, const std::vector<Vector>& b);

/// True if every vertex of inner satisfies every facet of outer.
bool polytope_contains(const ConvexPolytope& outer, const ConvexPolytope& inner,
                       double tol = kGeomTol);

}  // namespace dirq
