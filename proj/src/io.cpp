#include "dirq/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace dirq {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  cells.push_back(cur);
  for (auto& c : cells) {
    while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.erase(c.begin());
    while (!c.empty() && (c.back() == ' ' || c.back() == '\t')) c.pop_back();
  }
  return cells;
}

double parse_cell(const std::string& cell, int line_no) {
  double v = 0.0;
  const char* b = cell.data();
  const char* e = b + cell.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v))
    throw IoError("csv: non-numeric cell '" + cell + "' in row " +
                  std::to_string(line_no));
  return v;
}

nlohmann::json jvec(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vec_of(const nlohmann::json& a) {
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

nlohmann::json jpoints(const std::vector<Vector>& pts) {
  nlohmann::json a = nlohmann::json::array();
  for (const Vector& p : pts) a.push_back(jvec(p));
  return a;
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line))
    throw IoError("csv: " + origin + " is empty");
  Dataset ds;
  ds.names = split_row(line);
  const int k = static_cast<int>(ds.names.size());

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_row(line);
    if (static_cast<int>(cells.size()) != k)
      throw IoError("csv: row " + std::to_string(line_no) + " has " +
                    std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(k));
    std::vector<double> row(k);
    for (int j = 0; j < k; ++j) row[j] = parse_cell(cells[j], line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw IoError("csv: " + origin + " has a header but no data rows");

  ds.values.resize(k, static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < k; ++j) ds.values(j, static_cast<int>(i)) = rows[i][j];
  ds.provenance = origin;
  return ds;
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("csv: cannot open " + path);
  return parse_csv(in, path);
}

void write_csv(const Dataset& ds, std::ostream& out) {
  for (int j = 0; j < ds.k(); ++j) out << (j ? "," : "") << ds.names[j];
  out << '\n';
  for (int i = 0; i < ds.n(); ++i) {
    for (int j = 0; j < ds.k(); ++j)
      out << (j ? "," : "") << fmt17(ds.values(j, i));
    out << '\n';
  }
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("csv: cannot write " + path);
  write_csv(ds, out);
  if (!out) throw IoError("csv: write failed for " + path);
}

Dataset simulate(const std::string& dist, int n, int k, std::uint64_t seed,
                 const SimulateOptions& opts) {
  const bool figure5 = dist.rfind("figure5-", 0) == 0;
  if (n < 1 || (k < 1 && !figure5))
    throw InvalidInput("simulate: need n >= 1 and k >= 1");
  Dataset ds;
  auto default_names = [&](int kk, const char* stem) {
    ds.names.clear();
    for (int j = 0; j < kk; ++j) ds.names.push_back(stem + std::to_string(j + 1));
  };

  if (dist == "uniform-box") {
    if (opts.corners) {
      if (k != 2 || n != 4)
        throw InvalidInput("simulate: the corner fixture needs n=4, k=2");
      ds.values.resize(2, 4);
      ds.values << -0.5, 0.5, -0.5, 0.5, -0.5, -0.5, 0.5, 0.5;
    } else {
      Vector lo = Vector::Constant(k, -0.5), hi = Vector::Constant(k, 0.5);
      ds.values = DensityModel::product_uniform(lo, hi).sample(n, seed);
    }
  } else if (dist == "gaussian") {
    ds.values = DensityModel::product_gaussian(Vector::Zero(k), Vector::Ones(k))
                    .sample(n, seed);
  } else if (dist == "cauchy-product") {
    std::mt19937_64 rng(seed);
    std::cauchy_distribution<double> cauchy;
    ds.values.resize(k, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) ds.values(j, i) = cauchy(rng);
  } else if (dist == "exp-centered") {
    ds.values =
        DensityModel::product_centered_exponential(Vector::Ones(k)).sample(n, seed);
  } else if (dist == "gaussian-mixture") {
    GaussComponent a, b;
    a.weight = b.weight = 0.5;
    a.mean = Vector::Zero(k);
    a.mean(0) = -1.5;
    b.mean = Vector::Zero(k);
    b.mean(0) = 1.5;
    a.cov = b.cov = Matrix::Identity(k, k);
    ds.values = DensityModel::gaussian_mixture({a, b}).sample(n, seed);
  } else if (dist == "figure5-homo" || dist == "figure5-hetero") {
    const bool hetero = dist == "figure5-hetero";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 4.0);
    std::normal_distribution<double> gauss;
    ds.values.resize(3, n);
    for (int i = 0; i < n; ++i) {
      double x2 = unif(rng);
      double s = hetero ? std::sqrt(x2) : 1.0;
      ds.values(0, i) = x2;
      ds.values(1, i) = x2 + s * gauss(rng);
      ds.values(2, i) = x2 + s * gauss(rng);
    }
    ds.names = {"x2", "y1", "y2"};
    ds.provenance = dist + " n=" + std::to_string(n) + " seed=" + std::to_string(seed);
    return ds;
  } else {
    throw InvalidInput("simulate: unknown distribution '" + dist + "'");
  }

  default_names(static_cast<int>(ds.values.rows()), "z");
  ds.provenance = dist + " n=" + std::to_string(n) + " k=" + std::to_string(k) +
                  " seed=" + std::to_string(seed) +
                  (opts.corners ? " corners" : "");
  return ds;
}

nlohmann::json to_json(const Dataset& ds) {
  nlohmann::json j;
  j["names"] = ds.names;
  j["provenance"] = ds.provenance;
  j["n"] = ds.n();
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < ds.k(); ++r) rows.push_back(jvec(ds.values.row(r).transpose()));
  j["values"] = rows;
  return j;
}

Dataset dataset_from_json(const nlohmann::json& j) {
  Dataset ds;
  ds.names = j.at("names").get<std::vector<std::string>>();
  ds.provenance = j.value("provenance", "");
  const auto& rows = j.at("values");
  const int k = static_cast<int>(rows.size());
  if (k == 0) throw IoError("dataset json: no variables");
  const int n = static_cast<int>(rows[0].size());
  ds.values.resize(k, n);
  for (int r = 0; r < k; ++r) {
    if (static_cast<int>(rows[r].size()) != n)
      throw IoError("dataset json: ragged values");
    ds.values.row(r) = vec_of(rows[r]).transpose();
  }
  if (!ds.values.allFinite()) throw IoError("dataset json: non-finite values");
  return ds;
}

nlohmann::json to_json(const DirectionalQuantileFit& f) {
  nlohmann::json j;
  j["tau"] = f.tau;
  j["u"] = jvec(f.u.u);
  j["a"] = f.a;
  j["b"] = jvec(f.b);
  j["c"] = jvec(f.c);
  j["lambda"] = f.lambda;
  j["mu"] = jvec(f.mu);
  j["basis"] = f.basis;
  return j;
}

nlohmann::json to_json(const DepthRegion& region) {
  nlohmann::json j;
  j["tau"] = region.tau;
  j["level"] = region.level;
  j["vertices"] = jpoints(region.polytope.vertices);
  nlohmann::json facets = nlohmann::json::array();
  for (const auto& f : region.polytope.facets) {
    nlohmann::json jf;
    jf["c"] = jvec(f.halfspace.plane.c);
    jf["a"] = f.halfspace.plane.a;
    jf["n_below"] = f.cutoff;
    facets.push_back(std::move(jf));
  }
  j["facets"] = facets;
  j["degenerate"] = region.polytope.degenerate;
  j["empty"] = region.polytope.empty;
  return j;
}

DepthRegion region_from_json(const nlohmann::json& j) {
  DepthRegion region;
  region.tau = j.at("tau").get<double>();
  region.level = j.at("level").get<int>();
  for (const auto& v : j.at("vertices")) region.polytope.vertices.push_back(vec_of(v));
  for (const auto& jf : j.at("facets")) {
    PolytopeFacet f;
    f.halfspace.plane.c = vec_of(jf.at("c"));
    f.halfspace.plane.a = jf.at("a").get<double>();
    f.halfspace.side = Side::UpperClosed;
    f.cutoff = jf.at("n_below").get<int>();
    region.polytope.facets.push_back(std::move(f));
  }
  region.polytope.degenerate = j.value("degenerate", false);
  region.polytope.empty = j.value("empty", false);
  if (!region.polytope.vertices.empty())
    region.polytope.dim = static_cast<int>(region.polytope.vertices[0].size());
  return region;
}

nlohmann::json to_json(const SweepResult& sw) {
  nlohmann::json j;
  j["tau"] = sw.tau;
  nlohmann::json cones = nlohmann::json::array();
  for (const Cone& c : sw.cones) {
    nlohmann::json jc;
    jc["basis"] = c.basis;
    jc["t"] = jvec(c.t);
    jc["a0"] = c.a0;
    jc["lambda0"] = c.lambda0;
    jc["u_rep"] = jvec(c.u_rep);
    if (c.theta_hi > c.theta_lo) {
      jc["theta_lo"] = c.theta_lo;
      jc["theta_hi"] = c.theta_hi;
    }
    cones.push_back(std::move(jc));
  }
  j["cones"] = cones;
  nlohmann::json planes = nlohmann::json::array();
  for (const auto& h : sw.hyperplanes) {
    nlohmann::json jh;
    jh["c"] = jvec(h.plane.c);
    jh["a"] = h.plane.a;
    jh["n_below"] = h.cutoff;
    planes.push_back(std::move(jh));
  }
  j["hyperplanes"] = planes;
  return j;
}

nlohmann::json to_json(const RegressionTubeCut& cut) {
  nlohmann::json j;
  j["tau"] = cut.tau;
  j["w"] = jvec(cut.w);
  j["vertices"] = jpoints(cut.polytope.vertices);
  j["empty"] = cut.polytope.empty;
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& h : cut.sections) {
    nlohmann::json jh;
    jh["c"] = jvec(h.plane.c);
    jh["a"] = h.plane.a;
    jh["n_below"] = h.cutoff;
    sections.push_back(std::move(jh));
  }
  j["sections"] = sections;
  return j;
}

nlohmann::json to_json(const DirectionalMap& map) {
  nlohmann::json j;
  j["tau"] = map.tau;
  j["lambda_sup"] = map.lambda_sup;
  j["cnorm_sup"] = map.cnorm_sup;
  j["total_measure"] = map.total_measure;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : map.entries) {
    nlohmann::json je;
    je["cone"] = e.cone;
    je["direction"] = jvec(e.direction);
    je["measure"] = e.measure;
    je["lambda_norm"] = e.lambda_norm;
    je["cnorm_norm"] = e.cnorm_norm;
    entries.push_back(std::move(je));
  }
  j["entries"] = entries;
  return j;
}

void write_polar_csv(const std::vector<PolarSample>& samples,
                     std::ostream& out) {
  out << "angle,lambda_norm,cnorm_norm\n";
  for (const auto& s : samples)
    out << fmt17(s.angle) << ',' << fmt17(s.lambda_norm) << ','
        << fmt17(s.cnorm_norm) << '\n';
}

std::string svg_contours(const std::vector<DepthRegion>& regions,
                         const Matrix* data) {
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  auto grow = [&](double x, double y) {
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  for (const auto& r : regions)
    for (const Vector& v : r.polytope.vertices) {
      if (v.size() != 2) throw InvalidInput("svg: contours must be planar");
      grow(v(0), v(1));
    }
  if (data) {
    if (data->rows() != 2) throw InvalidInput("svg: data must be planar");
    for (int i = 0; i < data->cols(); ++i) grow((*data)(0, i), (*data)(1, i));
  }
  if (lo_x > hi_x) grow(0.0, 0.0);
  double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-6});
  double pad = 0.05 * span;
  lo_x -= pad; lo_y -= pad; span += 2 * pad;
  const double px = 500.0;
  auto X = [&](double x) { return (x - lo_x) / span * px; };
  auto Y = [&](double y) { return px - (y - lo_y) / span * px; };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                 "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 500 500\">\n";
  if (data)
    for (int i = 0; i < data->cols(); ++i)
      out << "  <circle cx=\"" << X((*data)(0, i)) << "\" cy=\""
          << Y((*data)(1, i)) << "\" r=\"2\" fill=\"#999\"/>\n";
  int ci = 0;
  for (const auto& r : regions) {
    if (r.polytope.empty || r.polytope.vertices.empty()) continue;
    const char* col = colors[ci++ % 6];
    std::vector<Vector> ring = r.polytope.ordered_vertices_ccw();
    out << "  <polygon fill=\"none\" stroke=\"" << col
        << "\" stroke-width=\"1.5\" points=\"";
    for (const Vector& v : ring) out << X(v(0)) << ',' << Y(v(1)) << ' ';
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_polar(const std::vector<PolarSample>& samples) {
  const double cx = 250.0, cy = 250.0, scale = 200.0;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 500 500\">\n"
      << "  <circle cx=\"250\" cy=\"250\" r=\"" << scale
      << "\" fill=\"none\" stroke=\"#ccc\" stroke-dasharray=\"4 4\"/>\n";
  auto ring = [&](double PolarSample::* field, const char* col,
                  const char* dash) {
    out << "  <polygon fill=\"none\" stroke=\"" << col
        << "\" stroke-width=\"1.5\"" << dash << " points=\"";
    for (const auto& s : samples) {
      double r = scale * (s.*field);
      out << cx + r * std::cos(s.angle) << ',' << cy - r * std::sin(s.angle)
          << ' ';
    }
    out << "\"/>\n";
  };
  ring(&PolarSample::lambda_norm, "#d62728", "");
  ring(&PolarSample::cnorm_norm, "#1f77b4", " stroke-dasharray=\"6 3\"");
  out << "</svg>\n";
  return out.str();
}

}  // namespace dirq
