#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "agcsc/dataset.hpp"
#include "agcsc/solver.hpp"

namespace agcsc {

struct FileSource {
  std::filesystem::path data;
  std::filesystem::path labels;
  MatrixFormat format = MatrixFormat::kCsv;
  bool normalize = false;  // divide pixel values by 255
};

/// Grid values used when none are given.
std::vector<double> default_parameter_grid();
std::vector<int> default_threshold_grid();

struct ExperimentConfig {
  std::variant<SyntheticSpec, FileSource> source = SyntheticSpec{};
  int k = 0;  // 0: take it from the labels
  std::vector<double> alpha_grid = default_parameter_grid();
  std::vector<double> beta_grid = default_parameter_grid();
  std::vector<int> m_grid;  // empty: plain AGCSC only
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "agcsc_out";
  SolverConfig solver;  // alpha and beta are overridden per grid point
  int kmeans_restarts = 20;
  int workers = 1;
  bool save_matrices = false;

  void validate() const;
};

struct RunRecord {
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<int> m;
  double acc = 0.0;
  double nmi = 0.0;
  int iterations = 0;
  bool converged = false;
  double seconds = 0.0;
  std::optional<std::string> error;
};

struct ExperimentSummary {
  std::vector<RunRecord> records;  // alpha outer, beta inner, m innermost
  int solves = 0;
  int failures = 0;
  std::optional<std::size_t> best_acc;
  std::optional<std::size_t> best_nmi;
};

/// Runs every grid point on data that is already loaded. Writes
/// records.csv, summary.csv, timings.csv, manifest.json and one residual
/// trace per solve under config.out_dir.
ExperimentSummary run_experiment(const ExperimentConfig& config, const DataMatrix& x,
                                 const LabelVector& truth);

/// Loads or synthesizes the data named by config.source, then runs the grid.
ExperimentSummary run_experiment(const ExperimentConfig& config);

/// One csv row per iteration: residuals and squared iterate changes.
void emit_trace(const SolverResult& result, const std::filesystem::path& path);

/// Stream seed for one job, independent of scheduling order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t job, std::uint64_t sub = 0);

}  // namespace agcsc
