#include "dirq/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

namespace dirq {
namespace {

struct Facet {
  std::vector<int> verts;
  Vector normal;
  double offset = 0.0;
  std::vector<int> neigh;  // neigh[i] is across the ridge omitting verts[i]
  bool alive = true;
};

// Hyperplane through d points: unit normal + offset. Normal is the kernel of
// the (d-1) x d difference matrix.
bool facet_plane(const std::vector<Vector>& pts, const std::vector<int>& verts,
                 Vector& normal, double& offset) {
  const int d = static_cast<int>(pts[0].size());
  Matrix diff(d - 1, d);
  for (int i = 1; i < d; ++i)
    diff.row(i - 1) = (pts[verts[i]] - pts[verts[0]]).transpose();
  Eigen::JacobiSVD<Matrix> svd(diff, Eigen::ComputeFullV);
  normal = svd.matrixV().col(d - 1);
  double nn = normal.norm();
  if (nn < 1e-14) return false;
  normal /= nn;
  if (d > 1 && svd.singularValues()(d - 2) < 1e-12 * std::max(1.0, svd.singularValues()(0)))
    return false;  // points affinely dependent
  offset = normal.dot(pts[verts[0]]);
  return true;
}

std::vector<int> ridge_key(const std::vector<int>& verts, int omit) {
  std::vector<int> key;
  key.reserve(verts.size() - 1);
  for (std::size_t i = 0; i < verts.size(); ++i)
    if (static_cast<int>(i) != omit) key.push_back(verts[i]);
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace

std::vector<HullFacet> convex_hull(const std::vector<Vector>& points, double tol) {
  const int m = static_cast<int>(points.size());
  if (m == 0) throw InvalidInput("convex_hull: no points");
  const int d = static_cast<int>(points[0].size());
  if (m < d + 1) throw NumericError("convex_hull: fewer than d+1 points");

  double scale = 1.0;
  for (const auto& p : points) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
  const double eps = tol * scale;

  // Greedy affinely independent seed simplex.
  std::vector<int> seed;
  {
    int lo = 0, hi = 0;
    for (int i = 1; i < m; ++i) {
      if (points[i](0) < points[lo](0)) lo = i;
      if (points[i](0) > points[hi](0)) hi = i;
    }
    if (lo == hi) hi = (lo + 1) % m;
    seed = {lo, hi};
    Matrix basis(d, 0);
    Vector e0 = points[hi] - points[lo];
    if (e0.norm() < eps) throw NumericError("convex_hull: degenerate point set");
    basis.conservativeResize(d, 1);
    basis.col(0) = e0;
    while (static_cast<int>(seed.size()) < d + 1) {
      // farthest point from current affine span
      Eigen::HouseholderQR<Matrix> qr(basis);
      Matrix q = qr.householderQ() * Matrix::Identity(d, basis.cols());
      int best = -1;
      double bestDist = eps;
      for (int i = 0; i < m; ++i) {
        Vector r = points[i] - points[seed[0]];
        r -= q * (q.transpose() * r);
        double dist = r.norm();
        if (dist > bestDist) {
          bestDist = dist;
          best = i;
        }
      }
      if (best < 0) throw NumericError("convex_hull: point set not full-dimensional");
      seed.push_back(best);
      basis.conservativeResize(d, basis.cols() + 1);
      basis.col(basis.cols() - 1) = points[best] - points[seed[0]];
    }
  }

  Vector interior = Vector::Zero(d);
  for (int idx : seed) interior += points[idx];
  interior /= static_cast<double>(seed.size());

  std::vector<Facet> facets;
  std::map<std::vector<int>, std::pair<int, int>> ridges;  // key -> (facet, slot)
  auto link = [&](int fid) {
    Facet& f = facets[fid];
    f.neigh.assign(f.verts.size(), -1);
    for (int i = 0; i < static_cast<int>(f.verts.size()); ++i) {
      auto key = ridge_key(f.verts, i);
      auto it = ridges.find(key);
      if (it == ridges.end()) {
        ridges[key] = {fid, i};
      } else {
        f.neigh[i] = it->second.first;
        facets[it->second.first].neigh[it->second.second] = fid;
        ridges.erase(it);
      }
    }
  };
  auto add_facet = [&](std::vector<int> verts) {
    Facet f;
    f.verts = std::move(verts);
    if (!facet_plane(points, f.verts, f.normal, f.offset))
      throw NumericError("convex_hull: degenerate facet");
    if (f.normal.dot(interior) > f.offset) {
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
    facets.push_back(std::move(f));
    int fid = static_cast<int>(facets.size()) - 1;
    link(fid);
    return fid;
  };

  for (int omit = 0; omit <= d; ++omit) {
    std::vector<int> verts;
    for (int i = 0; i <= d; ++i)
      if (i != omit) verts.push_back(seed[i]);
    add_facet(verts);
  }

  std::vector<bool> used(m, false);
  for (int idx : seed) used[idx] = true;

  for (int p = 0; p < m; ++p) {
    if (used[p]) continue;
    // find one visible facet
    int start = -1;
    for (int f = 0; f < static_cast<int>(facets.size()); ++f) {
      if (!facets[f].alive) continue;
      if (facets[f].normal.dot(points[p]) > facets[f].offset + eps) {
        start = f;
        break;
      }
    }
    if (start < 0) continue;  // interior or on boundary

    // flood-fill the visible region
    std::vector<int> visible;
    std::vector<std::pair<int, int>> horizon;  // (visible facet, slot)
    std::vector<char> mark(facets.size(), 0);
    std::queue<int> bfs;
    bfs.push(start);
    mark[start] = 1;
    while (!bfs.empty()) {
      int f = bfs.front();
      bfs.pop();
      visible.push_back(f);
      for (int i = 0; i < static_cast<int>(facets[f].neigh.size()); ++i) {
        int g = facets[f].neigh[i];
        if (g < 0) continue;
        if (mark[g]) continue;
        if (facets[g].normal.dot(points[p]) > facets[g].offset + eps) {
          mark[g] = 1;
          bfs.push(g);
        } else {
          horizon.push_back({f, i});
        }
      }
    }

    // retire visible facets, unregistering their open ridges
    for (int f : visible) {
      facets[f].alive = false;
      for (int i = 0; i < static_cast<int>(facets[f].verts.size()); ++i) {
        auto key = ridge_key(facets[f].verts, i);
        auto it = ridges.find(key);
        if (it != ridges.end() && it->second.first == f) ridges.erase(it);
        int g = facets[f].neigh[i];
        if (g >= 0 && facets[g].alive) {
          // reopen the ridge on the surviving side
          for (int j = 0; j < static_cast<int>(facets[g].neigh.size()); ++j)
            if (facets[g].neigh[j] == f) {
              facets[g].neigh[j] = -1;
              ridges[ridge_key(facets[g].verts, j)] = {g, j};
            }
        }
      }
    }

    // cone the horizon ridges to p
    for (auto [f, slot] : horizon) {
      std::vector<int> verts = ridge_key(facets[f].verts, slot);
      verts.push_back(p);
      add_facet(std::move(verts));
    }
    used[p] = true;
  }

  std::vector<HullFacet> out;
  for (const Facet& f : facets) {
    if (!f.alive) continue;
    out.push_back({f.verts, f.normal, f.offset});
  }
  return out;
}

}  // namespace dirq
