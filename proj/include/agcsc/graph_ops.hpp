#pragma once

#include "agcsc/dataset.hpp"

namespace agcsc {

/// Symmetric, entrywise nonnegative n x n affinity.
class Affinity {
 public:
  /// Validates symmetry to within `tolerance` and nonnegativity.
  explicit Affinity(Matrix values, double tolerance = 0.0);

  const Matrix& values() const { return values_; }
  Eigen::Index n() const { return values_.rows(); }

 private:
  Matrix values_;
};

/// Graph convolutional operator S = (C + I) / 2. With a doubly stochastic,
/// zero-diagonal C this equals D^{-1/2} (C + I) D^{-1/2} with D = 2I.
class Gco {
 public:
  explicit Gco(Matrix values) : values_(std::move(values)) {}
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

Gco gco_from_coefficients(const Matrix& c);

/// F = S X.
Matrix aggregate_features(const Gco& s, const DataMatrix& x);

/// A = (|C| + |C'|) / 2.
Affinity affinity_from_coefficients(const Matrix& c);

/// Keeps the m largest-magnitude entries of every column (ties go to the
/// lower row index) and zeroes the rest.
Matrix threshold_m_largest(const Matrix& c, int m);

}  // namespace agcsc
