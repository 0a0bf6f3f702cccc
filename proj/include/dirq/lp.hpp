#pragma once

#include <cstdint>
#include <vector>

#include "dirq/types.hpp"

namespace dirq {

/// Small dense linear programs in few variables (k <= 6) with many
/// inequality constraints, solved by Seidel's randomized incremental
/// algorithm. Used for interior-point / feasibility questions in the
/// geometric code; not for the quantile LP itself.
struct LpResult {
  enum class Status { Optimal, Infeasible } status = Status::Infeasible;
  Vector x;
  bool hit_box = false;  // optimum on the artificial bounding box
};

/// max obj'x subject to A x <= b and |x_i| <= box, solved exactly up to
/// tolerance. Deterministic for a fixed seed.
LpResult lp_maximize(const Vector& obj, const Matrix& A, const Vector& b,
                     double box = 1e7, std::uint64_t seed = 0x5eed);

}  // namespace dirq
