#include "dirq/regression.hpp"

#include <algorithm>
#include <cmath>

namespace dirq {

namespace {

void validate_spec(const Matrix& data, const RegressionSpec& spec) {
  if (spec.m() < 1)
    throw InvalidInput("regression: at least one response row required");
  std::vector<int> all = spec.regressors;
  all.insert(all.end(), spec.responses.begin(), spec.responses.end());
  std::vector<int> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidInput("regression: regressor and response rows must be disjoint");
  for (int r : all)
    if (r < 0 || r >= data.rows())
      throw InvalidInput("regression: row index out of range");
}

void check_design_rank(const Matrix& W) {
  // intercept plus regressors must have full row rank p
  const int p1 = static_cast<int>(W.rows());
  if (p1 == 0) return;
  Matrix X(p1 + 1, W.cols());
  X.row(0).setOnes();
  X.bottomRows(p1) = W;
  Eigen::ColPivHouseholderQR<Matrix> qr(X.transpose());
  qr.setThreshold(1e-10);
  if (qr.rank() < p1 + 1)
    throw NumericError("regression: design matrix is rank deficient");
}

Matrix response_embedding(const RegressionSpec& spec) {
  const int k = spec.k(), m = spec.m(), p1 = spec.p() - 1;
  Matrix E = Matrix::Zero(k, m);
  for (int j = 0; j < m; ++j) E(p1 + j, j) = 1.0;
  return E;
}

}  // namespace

Matrix assemble_zspace(const Matrix& data, const RegressionSpec& spec) {
  validate_spec(data, spec);
  const int n = static_cast<int>(data.cols());
  Matrix Z(spec.k(), n);
  int r = 0;
  for (int i : spec.regressors) Z.row(r++) = data.row(i);
  for (int i : spec.responses) Z.row(r++) = data.row(i);
  return Z;
}

std::pair<Direction, Matrix> embed_direction(const RegressionSpec& spec,
                                             const Direction& u_y) {
  const int k = spec.k(), m = spec.m(), p1 = spec.p() - 1;
  if (u_y.dim() != m)
    throw InvalidInput("regression: direction dimension must match responses");
  Vector u = Vector::Zero(k);
  u.tail(m) = u_y.u;
  Matrix gamma = Matrix::Zero(k, k - 1);
  gamma.topLeftCorner(p1, p1) = Matrix::Identity(p1, p1);
  if (m > 1) gamma.bottomRightCorner(m, m - 1) = make_orthobasis(u_y);
  return {Direction(u), gamma};
}

RegressionFit fit_regression(const Matrix& data, const RegressionSpec& spec,
                             double tau, const Direction& u_y,
                             const SolveOptions& opts) {
  Matrix Z = assemble_zspace(data, spec);
  const int p1 = spec.p() - 1, m = spec.m();
  check_design_rank(Z.topRows(p1));
  auto [u, gamma] = embed_direction(spec, u_y);
  DirectionalQuantileFit base =
      m == 1 && p1 == 0 ? fit(Z, tau, u, opts) : fit(Z, tau, u, gamma, opts);

  RegressionFit out(tau, u_y);
  out.a = base.a;
  out.b_w = base.b.head(p1);
  out.b_y = base.b.tail(m - 1);
  out.c = base.c;
  out.lambda = base.lambda;
  out.mu = base.mu;
  out.basis = base.basis;
  out.N = base.N;
  out.P = base.P;
  out.Z0 = base.Z0;
  return out;
}

RegressionTubeCut cut_from_sweep(const SweepResult& sw,
                                 const RegressionSpec& spec, const Vector& w) {
  const int p1 = spec.p() - 1, m = spec.m();
  if (w.size() != p1)
    throw InvalidInput("regression: fixed regressor value has wrong length");

  RegressionTubeCut out;
  out.tau = sw.tau;
  out.w = w;
  std::vector<Halfspace> hs;
  for (const auto& h : sw.hyperplanes) {
    Vector ty = h.plane.c.tail(m);
    double off = h.plane.a - h.plane.c.head(p1).dot(w);
    double norm = ty.norm();
    if (norm < 1e-12) continue;  // hyperplane parallel to the response space
    SweepHyperplane sec;
    sec.plane = Hyperplane{ty / norm, off / norm};
    sec.cutoff = h.cutoff;
    sec.cones = h.cones;
    out.sections.push_back(sec);
    hs.push_back(Halfspace{sec.plane, Side::UpperClosed});
  }
  if (hs.empty())
    throw NumericError("regression: no usable halfspaces in the cut");
  out.polytope = intersect_halfspaces(hs);
  return out;
}

RegressionTubeCut regression_cut(const Matrix& data, const RegressionSpec& spec,
                                 double tau, const Vector& w) {
  if (spec.m() < 2 || spec.m() > 3)
    throw InvalidInput("regression_cut: needs two or three responses");
  Matrix Z = assemble_zspace(data, spec);
  check_design_rank(Z.topRows(spec.p() - 1));
  SweepOptions so;
  so.subspace = response_embedding(spec);
  return cut_from_sweep(sweep(Z, tau, so), spec, w);
}

CrossingReport detect_crossing(const std::vector<RegressionTubeCut>& cuts) {
  if (cuts.size() < 2)
    throw InvalidInput("detect_crossing: needs at least two cuts");
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if ((cuts[i].w - cuts[0].w).norm() > 1e-9)
      throw InvalidInput("detect_crossing: cuts taken at different regressor values");

  CrossingReport rep;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    for (std::size_t j = 0; j < cuts.size(); ++j) {
      if (cuts[i].tau <= cuts[j].tau) continue;
      bool nested = cuts[i].polytope.empty ||
                    (!cuts[j].polytope.empty &&
                     polytope_contains(cuts[j].polytope, cuts[i].polytope, 1e-7));
      if (!nested) {
        rep.crossing = true;
        rep.pairs.emplace_back(cuts[i].tau, cuts[j].tau);
      }
    }
  }
  return rep;
}

}  // namespace dirq
