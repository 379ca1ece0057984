#include "agcsc/graph_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace agcsc {

namespace {

void require_square(const Matrix& c, const char* what) {
  if (c.rows() != c.cols()) {
    throw std::invalid_argument(
        fmt::format("{}: expected a square matrix, got {} x {}", what, c.rows(), c.cols()));
  }
}

}  // namespace

Affinity::Affinity(Matrix values, double tolerance) : values_(std::move(values)) {
  require_square(values_, "affinity");
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      const double v = values_(i, j);
      if (!(v >= 0.0)) {
        throw std::invalid_argument(
            fmt::format("affinity entry ({}, {}) = {} is negative or NaN", i, j, v));
      }
      if (std::abs(v - values_(j, i)) > tolerance) {
        throw std::invalid_argument(fmt::format(
            "affinity is not symmetric at ({}, {}): {} vs {}", i, j, v, values_(j, i)));
      }
    }
  }
}

Gco gco_from_coefficients(const Matrix& c) {
  require_square(c, "gco_from_coefficients");
  Matrix s = c;
  s.diagonal().array() += 1.0;
  return Gco(s * 0.5);
}

Matrix aggregate_features(const Gco& s, const DataMatrix& x) {
  if (s.values().cols() != x.n()) {
    throw std::invalid_argument(fmt::format("aggregate_features: operator is {} x {}, data has {} rows",
                                            s.values().rows(), s.values().cols(), x.n()));
  }
  return s.values() * x.values();
}

Affinity affinity_from_coefficients(const Matrix& c) {
  require_square(c, "affinity_from_coefficients");
  const Matrix a = c.cwiseAbs();
  // IEEE addition commutes, so (i, j) and (j, i) come out bit-identical.
  Matrix sym = (a + a.transpose()) * 0.5;
  return Affinity(std::move(sym));
}

Matrix threshold_m_largest(const Matrix& c, int m) {
  if (m < 1) throw std::invalid_argument(fmt::format("threshold m must be >= 1, got {}", m));
  const auto n = c.rows();
  if (m >= n) return c;

  Matrix out = Matrix::Zero(c.rows(), c.cols());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::partial_sort(order.begin(), order.begin() + m, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        const double va = std::abs(c(a, j));
                        const double vb = std::abs(c(b, j));
                        return va > vb || (va == vb && a < b);
                      });
    for (int q = 0; q < m; ++q) out(order[q], j) = c(order[q], j);
  }
  return out;
}

}  // namespace agcsc
