#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gmlab {

/// Dense matrix used for adjacency, probability and iterate matrices.
/// Symmetric matrices keep both triangles populated.
using Matrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model parameters outside the feasible bivariate Bernoulli region.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input or a failed decomposition.
class NumericError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input too large for an exhaustive routine.
class SizeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is not square");
  }
}

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace gmlab
