#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirq/depth.hpp"
#include "dirq/regression.hpp"
#include "dirq/symmetry.hpp"

namespace dirq {

/// A named rectangular sample: one row per variable, one column per
/// observation. All cells finite.
struct Dataset {
  std::vector<std::string> names;  // one per variable
  Matrix values;                   // k x n
  std::string provenance;

  int n() const { return static_cast<int>(values.cols()); }
  int k() const { return static_cast<int>(values.rows()); }
};

/// Parse a header-first CSV file. Throws IoError on a missing file, a
/// header-only file, a ragged row, or a non-numeric / non-finite cell,
/// naming the offending 1-based file line.
Dataset load_csv(const std::string& path);
Dataset parse_csv(std::istream& in, const std::string& origin = "<stream>");

/// Full-precision CSV emission; load_csv(write_csv(ds)) reproduces the
/// values bit-exactly.
void write_csv(const Dataset& ds, std::ostream& out);
void save_csv(const Dataset& ds, const std::string& path);

struct SimulateOptions {
  bool corners = false;  // uniform-box fixture: the four unit-square corners
};

/// Deterministic sample generators. dist is one of uniform-box, gaussian,
/// cauchy-product, exp-centered, gaussian-mixture, figure5-homo,
/// figure5-hetero. The figure5 generators emit rows (x2, y1, y2) with
/// y = (x2, x2) + noise and ignore k.
Dataset simulate(const std::string& dist, int n, int k, std::uint64_t seed,
                 const SimulateOptions& opts = {});

// JSON serialization. Doubles are written in shortest round-trip decimal
// form, so write-then-read is bit-exact.
nlohmann::json to_json(const Dataset& ds);
nlohmann::json to_json(const DirectionalQuantileFit& f);
nlohmann::json to_json(const DepthRegion& region);
nlohmann::json to_json(const SweepResult& sw);
nlohmann::json to_json(const RegressionTubeCut& cut);
nlohmann::json to_json(const DirectionalMap& map);

Dataset dataset_from_json(const nlohmann::json& j);
DepthRegion region_from_json(const nlohmann::json& j);

/// (angle, lambda_norm, cnorm_norm) rows.
void write_polar_csv(const std::vector<PolarSample>& samples,
                     std::ostream& out);

/// Overlaid planar contours (k = 2), optionally with the sample cloud.
std::string svg_contours(const std::vector<DepthRegion>& regions,
                         const Matrix* data = nullptr);

/// Polar plot of a normalized directional map (k = 2).
std::string svg_polar(const std::vector<PolarSample>& samples);

}  // namespace dirq
