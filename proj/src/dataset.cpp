#include "agcsc/dataset.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace agcsc {

namespace {

void check_finite(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) {
        throw DataError(fmt::format("non-finite value at row {}, column {}", i + 1, j + 1));
      }
    }
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  cell = trim(cell);
  double value = 0.0;
  // from_chars rejects a leading '+', which some writers emit.
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw DataError(
        fmt::format("non-numeric cell '{}' at row {}, column {}", std::string(cell), row, col));
  }
  return value;
}

DataMatrix load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));

  std::vector<double> cells;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++rows;
    std::size_t count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(parse_cell(rest.substr(0, comma), line_no, count + 1));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols == 0) {
      cols = count;
    } else if (count != cols) {
      throw DataError(fmt::format("ragged row {} in '{}': {} columns, expected {}", line_no,
                                  path.string(), count, cols));
    }
  }
  if (rows == 0) throw DataError(fmt::format("empty file '{}'", path.string()));

  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = cells[i * cols + j];
  }
  return DataMatrix(std::move(m));
}

std::uint64_t decode_u64(const std::array<unsigned char, 8>& b) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::array<unsigned char, 8> encode_u64(std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (auto& byte : b) {
    byte = static_cast<unsigned char>(v & 0xffu);
    v >>= 8;
  }
  return b;
}

DataMatrix load_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));

  std::array<unsigned char, 8> buf{};
  auto read_word = [&](const char* what) {
    if (!in.read(reinterpret_cast<char*>(buf.data()), 8)) {
      throw DataError(fmt::format("truncated raw-binary file '{}' while reading {}",
                                  path.string(), what));
    }
    return decode_u64(buf);
  };
  const auto rows = read_word("row count");
  const auto cols = read_word("column count");
  if (rows == 0 || cols == 0) {
    throw DataError(fmt::format("empty matrix in '{}' ({} x {})", path.string(), rows, cols));
  }

  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      if (!in.read(reinterpret_cast<char*>(buf.data()), 8)) {
        throw DataError(fmt::format("truncated raw-binary file '{}' at row {}, column {}",
                                    path.string(), i + 1, j + 1));
      }
      m(i, j) = std::bit_cast<double>(decode_u64(buf));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError(fmt::format("trailing bytes after {} x {} matrix in '{}'", rows, cols,
                                path.string()));
  }
  return DataMatrix(std::move(m));
}

// Gram-Schmidt is exact enough here and keeps the basis reproducible
// independent of the QR backend.
Matrix orthonormal_basis(int d, int r, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix b(d, r);
  for (int j = 0; j < r; ++j) {
    while (true) {
      for (int i = 0; i < d; ++i) b(i, j) = gauss(rng);
      for (int pass = 0; pass < 2; ++pass) {
        for (int q = 0; q < j; ++q) b.col(j) -= b.col(q).dot(b.col(j)) * b.col(q);
      }
      const double norm = b.col(j).norm();
      if (norm > 1e-8) {
        b.col(j) /= norm;
        break;
      }
    }
  }
  return b;
}

}  // namespace

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw DataError(
        fmt::format("data matrix must be nonempty, got {} x {}", values_.rows(), values_.cols()));
  }
  check_finite(values_);
}

LabelVector::LabelVector(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw DataError(fmt::format("cluster count must be positive, got {}", k_));
  if (static_cast<std::size_t>(k_) > labels_.size()) {
    throw DataError(fmt::format("cluster count {} exceeds sample count {}", k_, labels_.size()));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= k_) {
      throw DataError(fmt::format("label {} at position {} outside [0, {})", labels_[i], i, k_));
    }
  }
}

LabelVector LabelVector::from_ids(std::vector<int> labels) {
  if (labels.empty()) throw DataError("empty label vector");
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  return LabelVector(std::move(labels), k);
}

MatrixFormat parse_matrix_format(const std::string& name) {
  if (name == "csv") return MatrixFormat::kCsv;
  if (name == "bin" || name == "raw" || name == "raw-binary") return MatrixFormat::kRawBinary;
  throw DataError(fmt::format("unknown matrix format '{}' (expected csv or bin)", name));
}

DataMatrix load_dense_matrix(const std::filesystem::path& path, MatrixFormat format) {
  if (!std::filesystem::exists(path)) {
    throw DataError(fmt::format("file not found: '{}'", path.string()));
  }
  return format == MatrixFormat::kCsv ? load_csv(path) : load_raw(path);
}

void save_dense_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format) {
  if (format == MatrixFormat::kCsv) {
    std::ofstream out(path);
    if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j > 0) out << ',';
        out << fmt::format("{:.17g}", m(i, j));
      }
      out << '\n';
    }
    if (!out) throw DataError(fmt::format("write failed for '{}'", path.string()));
    return;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  auto write_word = [&](std::uint64_t v) {
    const auto b = encode_u64(v);
    out.write(reinterpret_cast<const char*>(b.data()), 8);
  };
  write_word(static_cast<std::uint64_t>(m.rows()));
  write_word(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) write_word(std::bit_cast<std::uint64_t>(m(i, j)));
  }
  if (!out) throw DataError(fmt::format("write failed for '{}'", path.string()));
}

LabelVector load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open label file '{}'", path.string()));
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto cell = trim(std::string_view(line).substr(0, line.find(',')));
    if (cell.empty()) continue;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw DataError(fmt::format("bad label '{}' at line {} of '{}'", std::string(cell), line_no,
                                  path.string()));
    }
    labels.push_back(value);
  }
  if (labels.empty()) throw DataError(fmt::format("empty label file '{}'", path.string()));
  return LabelVector::from_ids(std::move(labels));
}

DataMatrix normalize_pixel_range(const DataMatrix& x) {
  return DataMatrix(x.values() / 255.0);
}

std::pair<DataMatrix, LabelVector> generate_union_of_subspaces(const SyntheticSpec& spec) {
  if (spec.k < 1 || spec.n_per < 1) {
    throw DataError(fmt::format("need at least one sample per subspace (k={}, n_per={})", spec.k,
                                spec.n_per));
  }
  if (spec.r < 1 || spec.r >= spec.d) {
    throw DataError(
        fmt::format("subspace dimension r={} must satisfy 1 <= r < d={}", spec.r, spec.d));
  }
  if (!(spec.sigma >= 0.0)) throw DataError("noise scale sigma must be nonnegative");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int n = spec.k * spec.n_per;
  Matrix x(n, spec.d);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int c = 0; c < spec.k; ++c) {
    const Matrix basis = orthonormal_basis(spec.d, spec.r, rng);
    for (int s = 0; s < spec.n_per; ++s) {
      const int row = c * spec.n_per + s;
      Vector w(spec.r);
      for (int q = 0; q < spec.r; ++q) w(q) = gauss(rng);
      Vector sample = basis * w;
      if (spec.sigma > 0.0) {
        for (int i = 0; i < spec.d; ++i) sample(i) += spec.sigma * gauss(rng);
      }
      x.row(row) = sample.transpose();
      labels[static_cast<std::size_t>(row)] = c;
    }
  }
  return {DataMatrix(std::move(x)), LabelVector(std::move(labels), spec.k)};
}

}  // namespace agcsc
