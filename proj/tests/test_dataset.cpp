#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "agcsc/dataset.hpp"
#include "oracles.hpp"

using namespace agcsc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "agcsc_test_dataset";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_text(const std::string& name, const std::string& text) {
  const auto path = scratch(name);
  std::ofstream(path) << text;
  return path;
}

std::string error_of(const fs::path& path, MatrixFormat format) {
  try {
    load_dense_matrix(path, format);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("csv single cell") {
  const auto m = load_dense_matrix(write_text("one.csv", "0.5\n"), MatrixFormat::kCsv);
  CHECK(m.n() == 1);
  CHECK(m.d() == 1);
  CHECK(m.values()(0, 0) == 0.5);
}

TEST_CASE("raw binary round trip is bit exact") {
  std::mt19937_64 rng(11);
  const Matrix m = oracle::random_matrix(4, 3, rng, -1e3, 1e3);
  const auto path = scratch("rt.bin");
  save_dense_matrix(m, path, MatrixFormat::kRawBinary);
  const auto back = load_dense_matrix(path, MatrixFormat::kRawBinary);
  REQUIRE(back.n() == 4);
  REQUIRE(back.d() == 3);
  CHECK((back.values().array() == m.array()).all());
  // 16 bytes of dims followed by 12 doubles.
  CHECK(fs::file_size(path) == 16 + 12 * 8);
}

TEST_CASE("csv round trip through %.17g is exact") {
  std::mt19937_64 rng(5);
  const Matrix m = oracle::random_matrix(3, 5, rng);
  const auto path = scratch("rt.csv");
  save_dense_matrix(m, path, MatrixFormat::kCsv);
  CHECK((load_dense_matrix(path, MatrixFormat::kCsv).values().array() == m.array()).all());
}

TEST_CASE("ORL-shaped csv loads with every cell") {
  std::string text;
  for (int i = 0; i < 400; ++i) {
    for (int j = 0; j < 1024; ++j) {
      text += std::to_string((i * 7 + j * 3) % 256);
      text += j + 1 < 1024 ? ',' : '\n';
    }
  }
  const auto m = load_dense_matrix(write_text("orl.csv", text), MatrixFormat::kCsv);
  CHECK(m.n() == 400);
  CHECK(m.d() == 1024);
  CHECK(m.values()(399, 1023) == (399 * 7 + 1023 * 3) % 256);
}

TEST_CASE("loader errors carry locations") {
  CHECK(error_of(scratch("nope.csv"), MatrixFormat::kCsv).find("not found") != std::string::npos);
  CHECK(error_of(write_text("empty.csv", ""), MatrixFormat::kCsv).find("empty") !=
        std::string::npos);

  const auto ragged = error_of(write_text("ragged.csv", "1,2,3\n4,5\n"), MatrixFormat::kCsv);
  CHECK(ragged.find("ragged row 2") != std::string::npos);

  const auto bad = error_of(write_text("bad.csv", "1,2\n3,x\n"), MatrixFormat::kCsv);
  CHECK(bad.find("row 2, column 2") != std::string::npos);

  CHECK(error_of(write_text("nan.csv", "1,nan\n"), MatrixFormat::kCsv).find("non-finite") !=
        std::string::npos);

  // Header claims 2 x 2 but only three values follow.
  const auto path = scratch("short.bin");
  {
    std::ofstream out(path, std::ios::binary);
    const std::uint64_t dims[2] = {2, 2};
    const double vals[3] = {1, 2, 3};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(vals), sizeof vals);
  }
  CHECK(error_of(path, MatrixFormat::kRawBinary).find("row 2, column 2") != std::string::npos);
}

TEST_CASE("normalize divides by 255") {
  CHECK(normalize_pixel_range(DataMatrix(Matrix::Zero(3, 2))).values().isZero(0));
  Matrix one(1, 1);
  one << 255;
  CHECK(normalize_pixel_range(DataMatrix(one)).values()(0, 0) == 1.0);

  std::mt19937_64 rng(3);
  const DataMatrix pixels(oracle::random_matrix(20, 16, rng, 0.0, 255.0));
  const auto out = normalize_pixel_range(pixels);
  CHECK(out.values().maxCoeff() <= 1.0);
  CHECK(out.values().minCoeff() >= 0.0);
}

TEST_CASE("normalize is linear") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = oracle::random_matrix(5, 4, rng, -300, 300);
    const double a = std::uniform_real_distribution<double>(-4, 4)(rng);
    const Matrix lhs = normalize_pixel_range(DataMatrix(a * x)).values();
    const Matrix rhs = a * normalize_pixel_range(DataMatrix(x)).values();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-15 * (1 + rhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("synthetic rank one construction") {
  SyntheticSpec spec{.k = 1, .n_per = 10, .d = 6, .r = 1, .sigma = 0.0, .seed = 2};
  const auto [x, labels] = generate_union_of_subspaces(spec);
  Eigen::JacobiSVD<Matrix> svd(x.values());
  const auto s = svd.singularValues();
  CHECK(s(1) <= 1e-12 * s(0));
  CHECK(labels.k() == 1);
}

TEST_CASE("noise-free samples lie in their class subspace") {
  SyntheticSpec spec{.k = 4, .n_per = 12, .d = 10, .r = 3, .sigma = 0.0, .seed = 21};
  const auto [x, labels] = generate_union_of_subspaces(spec);
  REQUIRE(x.n() == 48);
  for (int c = 0; c < spec.k; ++c) {
    const Matrix block = x.values().middleRows(c * spec.n_per, spec.n_per);
    for (int i = 0; i < spec.n_per; ++i) CHECK(labels[c * spec.n_per + i] == c);
    // Basis from the first r samples, then project the rest.
    Eigen::HouseholderQR<Matrix> qr(block.topRows(spec.r).transpose());
    const Matrix q = qr.householderQ() * Matrix::Identity(spec.d, spec.r);
    for (int i = 0; i < spec.n_per; ++i) {
      const Vector v = block.row(i).transpose();
      CHECK((v - q * (q.transpose() * v)).norm() < 1e-10);
    }
    Eigen::JacobiSVD<Matrix> svd(block);
    CHECK(svd.singularValues()(spec.r) <= 1e-10 * svd.singularValues()(0));
  }
}

TEST_CASE("synthetic generator is deterministic") {
  SyntheticSpec spec{.k = 3, .n_per = 5, .d = 7, .r = 2, .sigma = 0.1, .seed = 77};
  const auto a = generate_union_of_subspaces(spec);
  const auto b = generate_union_of_subspaces(spec);
  CHECK((a.first.values().array() == b.first.values().array()).all());
  spec.seed = 78;
  const auto c = generate_union_of_subspaces(spec);
  CHECK_FALSE((a.first.values().array() == c.first.values().array()).all());
}

TEST_CASE("synthetic spec validation") {
  CHECK_THROWS_AS(generate_union_of_subspaces({.k = 2, .n_per = 3, .d = 4, .r = 4}), DataError);
  CHECK_THROWS_AS(generate_union_of_subspaces({.k = 2, .n_per = 0, .d = 4, .r = 1}), DataError);
  CHECK_THROWS_AS(generate_union_of_subspaces({.k = 2, .n_per = 3, .d = 4, .r = 1, .sigma = -1}),
                  DataError);
}

TEST_CASE("label vectors") {
  const auto labels = load_labels(write_text("labels.csv", "0\n1\n\n2\n1,ignored\n"));
  CHECK(labels.size() == 4);
  CHECK(labels.k() == 3);
  CHECK_THROWS_AS(LabelVector({0, 3}, 2), DataError);
  CHECK_THROWS_AS(LabelVector({0, 1}, 3), DataError);
  CHECK_THROWS_AS(load_labels(write_text("badlabels.csv", "0\nx\n")), DataError);
}
