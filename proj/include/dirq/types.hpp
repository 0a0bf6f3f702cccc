#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace dirq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Tolerances used throughout: algebraic identities are held to kAlgTol,
// geometric vertex comparisons to kGeomTol.
inline constexpr double kAlgTol = 1e-10;
inline constexpr double kGeomTol = 1e-8;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dirq
