#include "dirq/depth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace dirq {

namespace {

Halfspace upper(const Hyperplane& h) {
  return Halfspace{h, Side::UpperClosed};
}

/// Minimum number of the in-plane points (coordinates relative to the depth
/// point) that any closed halfspace bounded by a perturbation of the plane
/// must keep. One-dimensional section of the depth problem.
int min_kept_on_plane(const std::vector<Vector>& q) {
  if (q.empty()) return 0;
  if (q.front().size() == 1) {
    int left = 0, right = 0;
    for (const Vector& p : q) (p(0) > 0 ? right : left)++;
    return std::min(left, right);
  }
  // 2-d: minimize #{m'q > 0} over directions m. The count is constant on
  // each arc of the circular arrangement cut at the angles orthogonal to
  // some q, so one interior point per arc is exact.
  std::vector<double> bounds;
  for (const Vector& p : q) {
    double th = std::atan2(p(1), p(0));
    for (double s : {th + M_PI_2, th - M_PI_2}) {
      s = std::fmod(s, 2 * M_PI);
      if (s < 0) s += 2 * M_PI;
      bounds.push_back(s);
    }
  }
  std::sort(bounds.begin(), bounds.end());
  int best = static_cast<int>(q.size());
  const std::size_t B = bounds.size();
  for (std::size_t i = 0; i < B; ++i) {
    double hi = i + 1 < B ? bounds[i + 1] : bounds[0] + 2 * M_PI;
    double phi = 0.5 * (bounds[i] + hi);
    Vector m(2);
    m << std::cos(phi), std::sin(phi);
    int cnt = 0;
    for (const Vector& p : q)
      if (m.dot(p) > 0) ++cnt;
    best = std::min(best, cnt);
  }
  return best;
}

Vector perp2(const Vector& d) {
  Vector n(2);
  n << -d(1), d(0);
  return n;
}

Vector cross3(const Vector& a, const Vector& b) {
  Vector n(3);
  n << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2),
      a(0) * b(1) - a(1) * b(0);
  return n;
}

/// Closed-halfspace mass achievable with boundary through z and normal near n.
int candidate_mass(const Matrix& Z, const Vector& z, const Vector& n,
                   double tol) {
  const int m = static_cast<int>(Z.cols());
  int pos = 0, neg = 0, eq = 0;
  std::vector<Vector> on;
  Matrix Q = make_orthobasis(n.normalized());
  for (int i = 0; i < m; ++i) {
    Vector d = Z.col(i) - z;
    double r = n.dot(d) / n.norm();
    if (r > tol) ++pos;
    else if (r < -tol) ++neg;
    else if (d.norm() < tol) ++eq;
    else on.push_back(Q.transpose() * d);  // in-plane coordinates, k-1 dims
  }
  return std::min(pos, neg) + eq + min_kept_on_plane(on);
}

void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> pick(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      f(pick);
      return;
    }
    for (int i = start; i < n; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

DepthRegion assemble(double tau, int level,
                     const std::vector<SweepHyperplane>& gens) {
  DepthRegion out;
  out.tau = tau;
  out.level = level;
  out.generators = gens;
  if (gens.empty()) {  // no constraints: all of space
    out.polytope.unbounded = true;
    return out;
  }
  std::vector<Halfspace> hs;
  for (const auto& g : gens) hs.push_back(upper(g.plane));
  out.polytope = intersect_halfspaces(hs);
  for (auto& f : out.polytope.facets)
    if (f.input_index >= 0) f.cutoff = gens[f.input_index].cutoff;
  return out;
}

}  // namespace

DepthRegion region_from_sweep(const SweepResult& sw) {
  int n = sw.cones.empty() ? 0
                           : static_cast<int>(sw.cones.front().res_sign.size());
  return assemble(sw.tau, static_cast<int>(std::ceil(n * sw.tau)),
                  sw.hyperplanes);
}

DepthRegion region(const Matrix& data, double tau) {
  return region_from_sweep(sweep(data, tau));
}

std::vector<DepthRegion> extract_adjacent_contours(
    const SweepResult& sw, const Matrix& data,
    const std::vector<int>& levels) {
  const int k = static_cast<int>(data.rows());
  const int n = static_cast<int>(data.cols());
  const int hi = static_cast<int>(std::floor(n * sw.tau)) + 1;
  const int lo = std::max(1, hi + 1 - k);
  std::vector<int> want = levels;
  if (want.empty())
    for (int l = lo; l <= hi; ++l) want.push_back(l);
  for (int l : want)
    if (l < lo || l > hi)
      throw InvalidInput("extract_adjacent_contours: level " +
                         std::to_string(l) + " outside the guaranteed range [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");

  std::vector<DepthRegion> out;
  for (int l : want) {
    std::vector<SweepHyperplane> gens;
    for (const auto& h : sw.hyperplanes)
      if (h.cutoff <= l - 1) gens.push_back(h);
    DepthRegion r = assemble(sw.tau, l, gens);
    if (k <= 3) {
      // one sweep only typically carries every relevant hyperplane, so the
      // enumeration oracle has the final word
      DepthRegion oracle = brute_force_region(data, l);
      bool agree = r.polytope.empty == oracle.polytope.empty;
      if (agree && !r.polytope.empty)
        agree = hausdorff_vertex_distance(r.polytope, oracle.polytope) < 1e-8;
      if (!agree) {
        oracle.tau = sw.tau;
        r = oracle;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

double brute_force_depth(const Vector& point, const Matrix& data) {
  const int k = static_cast<int>(data.rows());
  const int n = static_cast<int>(data.cols());
  if (k != 2 && k != 3)
    throw InvalidInput("brute_force_depth: only 2- or 3-dimensional data");
  const double scale = std::max(1.0, data.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;

  std::vector<Vector> cands;
  if (k == 2) {
    for (int i = 0; i < n; ++i) {
      Vector d = data.col(i) - point;
      if (d.norm() > tol) cands.push_back(perp2(d));
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Vector d = data.col(i) - data.col(j);
        if (d.norm() > tol) cands.push_back(perp2(d));
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Vector c = cross3(data.col(i) - point, data.col(j) - point);
        if (c.norm() > tol) cands.push_back(c);
      }
    for_each_subset(n, 3, [&](const std::vector<int>& s) {
      Vector c = cross3(data.col(s[1]) - data.col(s[0]),
                        data.col(s[2]) - data.col(s[0]));
      if (c.norm() > tol) cands.push_back(c);
    });
  }

  int eq = 0;
  for (int i = 0; i < n; ++i)
    if ((data.col(i) - point).norm() < tol) ++eq;
  if (cands.empty()) return static_cast<double>(eq) / n;

  int best = n;
  for (const Vector& c : cands)
    best = std::min(best, candidate_mass(data, point, c, tol));
  return static_cast<double>(best) / n;
}

DepthRegion brute_force_region(const Matrix& data, int level) {
  const int k = static_cast<int>(data.rows());
  const int n = static_cast<int>(data.cols());
  if (k != 2 && k != 3)
    throw InvalidInput("brute_force_region: only 2- or 3-dimensional data");
  if (level < 1 || level > n)
    throw InvalidInput("brute_force_region: level outside [1, n]");
  const double scale = std::max(1.0, data.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;
  const int need = n - level + 1;

  std::vector<SweepHyperplane> gens;
  for_each_subset(n, k, [&](const std::vector<int>& s) {
    Vector t;
    if (k == 2) {
      t = perp2(data.col(s[1]) - data.col(s[0]));
    } else {
      t = cross3(data.col(s[1]) - data.col(s[0]),
                 data.col(s[2]) - data.col(s[0]));
    }
    if (t.norm() < tol) return;  // affinely dependent subset
    t.normalize();
    double a = t.dot(data.col(s[0]));
    int above = 0, below_closed = 0, strictly_below = 0, strictly_above = 0;
    for (int i = 0; i < n; ++i) {
      double r = t.dot(data.col(i)) - a;
      if (r >= -tol) ++above;
      if (r <= tol) ++below_closed;
      if (r < -tol) ++strictly_below;
      if (r > tol) ++strictly_above;
    }
    if (above >= need)
      gens.push_back({Hyperplane{t, a}, strictly_below, {}});
    if (below_closed >= need)
      gens.push_back({Hyperplane{-t, -a}, strictly_above, {}});
  });
  return assemble(static_cast<double>(level) / n, level, gens);
}

int max_nonempty_level(const Matrix& data) {
  const int n = static_cast<int>(data.cols());
  int lo = 1, hi = n;  // the hull (level 1) is nonempty
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (brute_force_region(data, mid).polytope.empty)
      hi = mid - 1;
    else
      lo = mid;
  }
  return lo;
}

DepthRegion km_envelope(const Matrix& data, double tau,
                        const std::vector<Direction>& directions) {
  const int n = static_cast<int>(data.cols());
  std::vector<SweepHyperplane> gens;
  for (const Direction& u : directions) {
    Hyperplane h = km_projection_quantile(data, tau, u.u);
    int below = 0;
    for (int i = 0; i < n; ++i)
      if (h.eval(data.col(i)) < -1e-12) ++below;
    gens.push_back({h, below, {}});
  }
  DepthRegion out = assemble(tau, 0, gens);
  out.level = static_cast<int>(std::ceil(n * tau));
  return out;
}

}  // namespace dirq
