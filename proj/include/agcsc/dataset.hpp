#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace agcsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense sample matrix, one sample per row. Always nonempty and finite.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  Eigen::Index n() const { return values_.rows(); }
  Eigen::Index d() const { return values_.cols(); }

 private:
  Matrix values_;
};

/// Cluster ids in [0, k).
class LabelVector {
 public:
  LabelVector(std::vector<int> labels, int k);
  /// Infers k as max label + 1.
  static LabelVector from_ids(std::vector<int> labels);

  const std::vector<int>& labels() const { return labels_; }
  int k() const { return k_; }
  std::size_t size() const { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }

 private:
  std::vector<int> labels_;
  int k_;
};

enum class MatrixFormat { kCsv, kRawBinary };

MatrixFormat parse_matrix_format(const std::string& name);

// csv: ',' separated, '.' decimal, no header, one sample per line.
// raw-binary: u64 rows, u64 cols, then rows*cols little-endian f64, row-major.
DataMatrix load_dense_matrix(const std::filesystem::path& path, MatrixFormat format);
void save_dense_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format);

/// One integer label per line (a trailing ",..." is ignored so a single
/// column csv works too).
LabelVector load_labels(const std::filesystem::path& path);

DataMatrix normalize_pixel_range(const DataMatrix& x);

struct SyntheticSpec {
  int k = 3;
  int n_per = 30;
  int d = 20;
  int r = 3;
  double sigma = 0.0;
  std::uint64_t seed = 1;
};

/// Samples of cluster i are B_i w + sigma * noise with B_i a seeded d x r
/// orthonormal basis. Samples are ordered cluster by cluster.
std::pair<DataMatrix, LabelVector> generate_union_of_subspaces(const SyntheticSpec& spec);

}  // namespace agcsc
