// Command-line front end: datasets in, fits / contours / cuts / diagnostics
// out. Exit codes: 0 ok, 2 usage, 3 numeric or degeneracy, 4 I/O.
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dirq/asymptotics.hpp"
#include "dirq/io.hpp"

using namespace dirq;

namespace {

struct Common {
  std::string data;
  std::string out;
  std::string format = "json";
  std::vector<double> taus;
  std::vector<double> dir;
  std::uint64_t seed = 0;
  bool allow_degenerate = false;
  bool jitter = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_data = true) {
  if (with_data) cmd->add_option("--data", c.data, "input CSV path")->required();
  cmd->add_option("--tau", c.taus, "quantile order(s) in (0,1)");
  cmd->add_option("--dir", c.dir, "direction as comma-separated floats")
      ->delimiter(',');
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "svg"}));
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_flag("--allow-degenerate", c.allow_degenerate,
                "accept integer n*tau optima");
  cmd->add_flag("--jitter", c.jitter, "perturb ties in degenerate data");
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw IoError("cannot write " + out);
  f << text;
  if (!f) throw IoError("write failed for " + out);
}

Vector to_vector(const std::vector<double>& v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = v[i];
  return x;
}

SolveOptions solve_opts(const Common& c) {
  SolveOptions so;
  so.allow_degenerate = c.allow_degenerate;
  so.jitter = c.jitter;
  so.jitter_seed = c.seed;
  return so;
}

double single_tau(const Common& c) {
  if (c.taus.size() != 1)
    throw InvalidInput("expected exactly one --tau");
  return c.taus[0];
}

std::vector<double> taus_or_throw(const Common& c) {
  if (c.taus.empty()) throw InvalidInput("at least one --tau is required");
  return c.taus;
}

Direction direction_or_throw(const Common& c) {
  if (c.dir.empty()) throw InvalidInput("--dir is required");
  return Direction(to_vector(c.dir));
}

RegressionSpec make_spec(const std::vector<int>& reg,
                         const std::vector<int>& resp) {
  if (resp.empty()) throw InvalidInput("--responses is required");
  RegressionSpec spec;
  spec.regressors = reg;
  spec.responses = resp;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"directional quantiles, depth contours and regression tubes"};
  app.require_subcommand(1);
  std::function<void()> run;

  // quantile: one directional fit per tau
  {
    auto* cmd = app.add_subcommand("quantile", "fit directional quantiles");
    auto c = std::make_shared<Common>();
    add_common(cmd, *c);
    cmd->callback([c, &run] {
      run = [c] {
        Dataset ds = load_csv(c->data);
        Direction u = direction_or_throw(*c);
        std::vector<DirectionalQuantileFit> fits;
        for (double tau : taus_or_throw(*c))
          fits.push_back(fit(ds.values, tau, u, solve_opts(*c)));
        if (c->format == "csv") {
          std::ostringstream out;
          out << "tau,a,lambda";
          for (int j = 0; j < ds.k(); ++j) out << ",c" << j + 1;
          out << '\n';
          out.precision(17);
          for (const auto& f : fits) {
            out << f.tau << ',' << f.a << ',' << f.lambda;
            for (int j = 0; j < ds.k(); ++j) out << ',' << f.c(j);
            out << '\n';
          }
          emit(out.str(), c->out);
        } else if (c->format == "json") {
          if (fits.size() == 1) {
            emit(to_json(fits[0]).dump(2), c->out);
          } else {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& f : fits) arr.push_back(to_json(f));
            emit(arr.dump(2), c->out);
          }
        } else {
          throw InvalidInput("quantile: svg output is not defined");
        }
      };
    });
  }

  // sweep: full cone decomposition at one tau
  {
    auto* cmd = app.add_subcommand("sweep", "decompose the direction sphere");
    auto c = std::make_shared<Common>();
    add_common(cmd, *c);
    cmd->callback([c, &run] {
      run = [c] {
        if (c->format != "json") throw InvalidInput("sweep: json output only");
        Dataset ds = load_csv(c->data);
        emit(to_json(sweep(ds.values, single_tau(*c))).dump(2), c->out);
      };
    });
  }

  // contour: depth regions
  {
    auto* cmd = app.add_subcommand("contour", "halfspace depth contours");
    auto c = std::make_shared<Common>();
    add_common(cmd, *c);
    cmd->callback([c, &run] {
      run = [c] {
        Dataset ds = load_csv(c->data);
        std::vector<DepthRegion> regions;
        for (double tau : taus_or_throw(*c))
          regions.push_back(region(ds.values, tau));
        if (c->format == "svg") {
          emit(svg_contours(regions, &ds.values), c->out);
        } else if (c->format == "csv") {
          std::ostringstream out;
          out << "tau,level";
          for (int j = 0; j < ds.k(); ++j) out << ",v" << j + 1;
          out << '\n';
          out.precision(17);
          for (const auto& r : regions)
            for (const Vector& v : r.polytope.vertices) {
              out << r.tau << ',' << r.level;
              for (int j = 0; j < ds.k(); ++j) out << ',' << v(j);
              out << '\n';
            }
          emit(out.str(), c->out);
        } else if (regions.size() == 1) {
          emit(to_json(regions[0]).dump(2), c->out);
        } else {
          nlohmann::json arr = nlohmann::json::array();
          for (const auto& r : regions) arr.push_back(to_json(r));
          emit(arr.dump(2), c->out);
        }
      };
    });
  }

  // depth: halfspace depth of one point
  {
    auto* cmd = app.add_subcommand("depth", "halfspace depth of a point");
    auto c = std::make_shared<Common>();
    add_common(cmd, *c);
    auto point = std::make_shared<std::vector<double>>();
    cmd->add_option("--point", *point, "evaluation point")
        ->delimiter(',')
        ->required();
    cmd->callback([c, point, &run] {
      run = [c, point] {
        Dataset ds = load_csv(c->data);
        double d = brute_force_depth(to_vector(*point), ds.values);
        nlohmann::json j;
        j["point"] = *point;
        j["n"] = ds.n();
        j["depth"] = d;
        emit(j.dump(2), c->out);
      };
    });
  }

  // regress: one directional regression quantile
  {
    auto* cmd = app.add_subcommand("regress", "directional regression quantile");
    auto c = std::make_shared<Common>();
    add_common(cmd, *c);
    auto reg = std::make_shared<std::vector<int>>();
    auto resp = std::make_shared<std::vector<int>>();
    cmd->add_option("--regressors", *reg, "0-based regressor rows")->delimiter(',');
    cmd->add_option("--responses", *resp, "0-based response rows")
        ->delimiter(',')
        ->required();
    cmd->callback([c, reg, resp, &run] {
      run = [c, reg, resp] {
        Dataset ds = load_csv(c->data);
        RegressionSpec spec = make_spec(*reg, *resp);
        RegressionFit f = fit_regression(ds.values, spec, single_tau(*c),
                                         direction_or_throw(*c), solve_opts(*c));
        nlohmann::json j;
        j["tau"] = f.tau;
        j["u_y"] = std::vector<double>(f.u_y.u.data(), f.u_y.u.data() + f.u_y.dim());
        j["a"] = f.a;
        j["b_w"] = std::vector<double>(f.b_w.data(), f.b_w.data() + f.b_w.size());
        j["b_y"] = std::vector<double>(f.b_y.data(), f.b_y.data() + f.b_y.size());
        j["c"] = std::vector<double>(f.c.data(), f.c.data() + f.c.size());
        j["lambda"] = f.lambda;
        j["basis"] = f.basis;
        emit(j.dump(2), c->out);
      };
    });
  }

  // cut: regression tube cross-sections at a fixed regressor value
  {
    auto* cmd = app.add_subcommand("cut", "tube cuts at a regressor value");
    auto c = std::make_shared<Common>();
    add_common(cmd, *c);
    auto reg = std::make_shared<std::vector<int>>();
    auto resp = std::make_shared<std::vector<int>>();
    auto w = std::make_shared<std::vector<double>>();
    cmd->add_option("--regressors", *reg, "0-based regressor rows")->delimiter(',');
    cmd->add_option("--responses", *resp, "0-based response rows")
        ->delimiter(',')
        ->required();
    cmd->add_option("--w", *w, "regressor value of the cut")->delimiter(',');
    cmd->callback([c, reg, resp, w, &run] {
      run = [c, reg, resp, w] {
        Dataset ds = load_csv(c->data);
        RegressionSpec spec = make_spec(*reg, *resp);
        if (static_cast<int>(w->size()) != spec.p() - 1)
          throw InvalidInput("--w must have one value per regressor");
        std::vector<RegressionTubeCut> cuts;
        for (double tau : taus_or_throw(*c))
          cuts.push_back(regression_cut(ds.values, spec, tau, to_vector(*w)));
        if (c->format == "svg") {
          std::vector<DepthRegion> regions;
          for (const auto& cut : cuts) {
            DepthRegion r;
            r.tau = cut.tau;
            r.polytope = cut.polytope;
            regions.push_back(std::move(r));
          }
          emit(svg_contours(regions), c->out);
          return;
        }
        if (c->format != "json") throw InvalidInput("cut: json or svg output");
        nlohmann::json j;
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& cut : cuts) arr.push_back(to_json(cut));
        j["cuts"] = arr;
        if (cuts.size() > 1) {
          CrossingReport rep = detect_crossing(cuts);
          j["crossing"] = rep.crossing;
          nlohmann::json pairs = nlohmann::json::array();
          for (const auto& [hi, lo] : rep.pairs)
            pairs.push_back({{"tau_hi", hi}, {"tau_lo", lo}});
          j["crossing_pairs"] = pairs;
        }
        emit(j.dump(2), c->out);
      };
    });
  }

  // symmetry: directional diagnostic maps and the T statistic
  {
    auto* cmd = app.add_subcommand("symmetry", "directional symmetry diagnostic");
    auto c = std::make_shared<Common>();
    add_common(cmd, *c);
    cmd->callback([c, &run] {
      run = [c] {
        Dataset ds = load_csv(c->data);
        std::vector<double> grid = taus_or_throw(*c);
        if (c->format == "json") {
          nlohmann::json j;
          j["T"] = T_statistic(ds.values, grid);
          nlohmann::json maps = nlohmann::json::array();
          for (double tau : grid)
            maps.push_back(to_json(directional_map(ds.values, tau)));
          j["maps"] = maps;
          emit(j.dump(2), c->out);
          return;
        }
        // polar outputs use the first tau of the grid (planar data only)
        auto samples = polar_profile(sweep(ds.values, grid[0]), 32);
        if (c->format == "csv") {
          std::ostringstream out;
          write_polar_csv(samples, out);
          emit(out.str(), c->out);
        } else {
          emit(svg_polar(samples), c->out);
        }
      };
    });
  }

  // validate: Monte Carlo check of the sandwich asymptotics
  {
    auto* cmd = app.add_subcommand("validate", "Monte Carlo asymptotics check");
    auto c = std::make_shared<Common>();
    add_common(cmd, *c, /*with_data=*/false);
    auto model = std::make_shared<std::string>("uniform-square");
    auto n = std::make_shared<int>(2000);
    auto reps = std::make_shared<int>(500);
    cmd->add_option("--model", *model, "built-in model")
        ->check(CLI::IsMember({"uniform-square", "gaussian"}));
    cmd->add_option("--n", *n, "sample size");
    cmd->add_option("--reps", *reps, "Monte Carlo replicates");
    cmd->callback([c, model, n, reps, &run] {
      run = [c, model, n, reps] {
        if (c->format != "json") throw InvalidInput("validate: json output only");
        Direction u = direction_or_throw(*c);
        DensityModel m =
            *model == "gaussian"
                ? DensityModel::product_gaussian(Vector::Zero(u.dim()),
                                                 Vector::Ones(u.dim()))
                : DensityModel::product_uniform(
                      Vector::Constant(u.dim(), -0.5),
                      Vector::Constant(u.dim(), 0.5));
        ValidationReport rep =
            monte_carlo_validate(m, single_tau(*c), u, *n, *reps, c->seed);
        emit(rep.to_json(), c->out);
      };
    });
  }

  // simulate: deterministic sample generators
  {
    auto* cmd = app.add_subcommand("simulate", "generate a sample dataset");
    auto c = std::make_shared<Common>();
    c->format = "csv";
    add_common(cmd, *c, /*with_data=*/false);
    auto dist = std::make_shared<std::string>();
    auto n = std::make_shared<int>(0);
    auto k = std::make_shared<int>(2);
    auto corners = std::make_shared<bool>(false);
    cmd->add_option("--dist", *dist, "generator name")->required();
    cmd->add_option("--n", *n, "sample size")->required();
    cmd->add_option("--k", *k, "dimension");
    cmd->add_flag("--corners", *corners, "uniform-box corner fixture");
    cmd->callback([c, dist, n, k, corners, &run] {
      run = [c, dist, n, k, corners] {
        SimulateOptions so;
        so.corners = *corners;
        Dataset ds = simulate(*dist, *n, *k, c->seed, so);
        if (c->format == "json") {
          emit(to_json(ds).dump(2), c->out);
        } else if (c->format == "csv") {
          std::ostringstream out;
          write_csv(ds, out);
          emit(out.str(), c->out);
        } else {
          throw InvalidInput("simulate: csv or json output");
        }
      };
    });
  }

  try {
    app.parse(argc, argv);
    run();
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 4;
  } catch (const Error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
