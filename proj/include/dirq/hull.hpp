#pragma once

#include <vector>

#include "dirq/types.hpp"

namespace dirq {

struct HullFacet {
  std::vector<int> verts;  // d point indices spanning the facet
  Vector normal;           // outward unit normal
  double offset = 0.0;     // normal'x <= offset for hull points
};

/// Convex hull of points in R^d, d in {2,...,5}, by incremental
/// beneath-beyond insertion with simplicial facets. Points within `tol` of a
/// facet are treated as non-extreme. Throws NumericError if no full-dimensional
/// initial simplex exists.
std::vector<HullFacet> convex_hull(const std::vector<Vector>& points,
                                   double tol = 1e-9);

}  // namespace dirq
