#pragma once

#include <Eigen/Core>
#include <string>

#include "feasproj/errors.hpp"

namespace feasproj {

/// Dense double-precision matrix with row-major storage. All library
/// operations accept and produce finite entries only; a NaN/Inf aborts the
/// current operation with a NumericError instead of propagating.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

inline std::string shape_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(where) + ": shape mismatch, " +
                         shape_string(a.rows(), a.cols()) + " vs " +
                         shape_string(b.rows(), b.cols()));
  }
}

inline void require_finite(const Matrix& m, const char* where) {
  if (!m.allFinite()) {
    throw NumericError(std::string(where) + ": non-finite matrix entry");
  }
}

}  // namespace feasproj
