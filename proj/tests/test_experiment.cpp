#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "agcsc/experiment.hpp"

using namespace agcsc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_count(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

ExperimentConfig small_config(const std::string& name) {
  ExperimentConfig c;
  c.source = SyntheticSpec{.k = 2, .n_per = 10, .d = 8, .r = 2, .sigma = 0.01, .seed = 4};
  c.alpha_grid = {0.01, 0.1};
  c.beta_grid = {0.001, 0.01, 0.1};
  c.m_grid = {3, 5};
  c.kmeans_restarts = 4;
  c.out_dir = fs::temp_directory_path() / "agcsc_test_experiment" / name;
  fs::remove_all(c.out_dir);
  return c;
}

}  // namespace

TEST_CASE("grid bookkeeping: one solve per (alpha, beta), one record per m") {
  auto config = small_config("count");
  const auto s = run_experiment(config);
  CHECK(s.solves == 6);
  CHECK(s.records.size() == 6 + 12);
  CHECK(s.failures == 0);
  CHECK(line_count(config.out_dir / "records.csv") == 1 + 18);

  // alpha outer, beta inner, m innermost.
  CHECK(s.records[0].alpha == 0.01);
  CHECK(s.records[0].beta == 0.001);
  CHECK_FALSE(s.records[0].m.has_value());
  CHECK(s.records[1].m == 3);
  CHECK(s.records[2].m == 5);
  CHECK(s.records[3].beta == 0.01);
  CHECK(s.records[9].alpha == 0.1);

  for (const auto& r : s.records) {
    CHECK(r.acc >= 0.0);
    CHECK(r.acc <= 1.0);
    CHECK(r.nmi >= 0.0);
    CHECK(r.nmi <= 1.0);
  }
  // TAGCSC rows reuse the solve of their AGCSC row.
  CHECK(s.records[1].iterations == s.records[0].iterations);

  REQUIRE(s.best_acc.has_value());
  CHECK(line_count(config.out_dir / "summary.csv") == 3);
  CHECK(fs::exists(config.out_dir / "manifest.json"));
  CHECK(fs::exists(config.out_dir / "timings.csv"));
}

TEST_CASE("traces have one row per iteration and end below tolerance") {
  auto config = small_config("trace");
  config.m_grid.clear();
  config.alpha_grid = {0.01};
  config.beta_grid = {0.01};
  config.save_matrices = true;
  const auto s = run_experiment(config);
  REQUIRE(s.records.size() == 1);
  const auto trace = config.out_dir / "traces" / "trace_a0_b0.csv";
  CHECK(line_count(trace) == 1 + s.records[0].iterations);

  std::ifstream in(trace);
  std::string line, last;
  std::getline(in, line);
  CHECK(line == "iter,c_minus_z_inf,c1_minus_1_inf,delta_c_fro2,delta_f_fro2,delta_z_fro2");
  while (std::getline(in, line)) last = line;
  std::stringstream row(last);
  std::string cell;
  std::getline(row, cell, ',');
  std::getline(row, cell, ',');
  CHECK(std::stod(cell) <= 1e-7);
  std::getline(row, cell, ',');
  CHECK(std::stod(cell) <= 1e-7);

  const auto c = load_dense_matrix(config.out_dir / "matrices" / "C_a0_b0.bin",
                                   MatrixFormat::kRawBinary);
  CHECK(c.n() == 20);
  CHECK(c.d() == 20);

  // Empty m grid leaves the m column blank.
  std::ifstream records(config.out_dir / "records.csv");
  std::getline(records, line);
  std::getline(records, line);
  CHECK(line.rfind("0.01,0.01,,", 0) == 0);
}

TEST_CASE("serial and parallel runs write identical records") {
  auto serial = small_config("serial");
  auto parallel = small_config("parallel");
  parallel.workers = 3;
  run_experiment(serial);
  run_experiment(parallel);
  for (const char* f : {"records.csv", "summary.csv"}) {
    CHECK(slurp(serial.out_dir / f) == slurp(parallel.out_dir / f));
  }
  CHECK(slurp(serial.out_dir / "traces" / "trace_a1_b2.csv") ==
        slurp(parallel.out_dir / "traces" / "trace_a1_b2.csv"));
}

TEST_CASE("emit_trace reports unwritable paths") {
  SolverResult r;
  r.history.resize(2);
  CHECK_THROWS(emit_trace(r, fs::path("/nonexistent_dir_agcsc/trace.csv")));
}

TEST_CASE("configuration validation") {
  auto config = small_config("invalid");
  config.alpha_grid.clear();
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
  config = small_config("invalid");
  config.k = 1;
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
  config = small_config("invalid");
  config.m_grid = {0};
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
}

TEST_CASE("data load failures surface before any solve") {
  auto config = small_config("missing");
  config.source = FileSource{.data = "/nonexistent/x.csv", .labels = "/nonexistent/y.csv"};
  CHECK_THROWS_AS(run_experiment(config), DataError);
}

TEST_CASE("file sources with normalization") {
  auto config = small_config("files");
  config.alpha_grid = {0.01};
  config.beta_grid = {0.01};
  config.m_grid.clear();
  const auto [x, labels] = generate_union_of_subspaces(
      SyntheticSpec{.k = 2, .n_per = 8, .d = 6, .r = 2, .sigma = 0.0, .seed = 3});
  fs::create_directories(config.out_dir);
  const auto data = config.out_dir / "x.bin";
  save_dense_matrix(x.values() * 255.0, data, MatrixFormat::kRawBinary);
  {
    std::ofstream out(config.out_dir / "y.csv");
    for (int l : labels.labels()) out << l << '\n';
  }
  config.source = FileSource{.data = data,
                             .labels = config.out_dir / "y.csv",
                             .format = MatrixFormat::kRawBinary,
                             .normalize = true};
  const auto s = run_experiment(config);
  CHECK(s.failures == 0);
  CHECK(s.records.size() == 1);
  CHECK(slurp(config.out_dir / "manifest.json").find("\"normalize\": true") != std::string::npos);
}

TEST_CASE("paper default grids give 64 solves") {
  const ExperimentConfig c;
  CHECK(c.alpha_grid.size() * c.beta_grid.size() == 64);
  CHECK(default_threshold_grid().front() == 4);
  CHECK(default_threshold_grid().back() == 10);
}

TEST_CASE("derived seeds depend on job, not schedule") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0, 1) != derive_seed(1, 0, 2));
  CHECK(derive_seed(1, 3) != derive_seed(2, 3));
}
