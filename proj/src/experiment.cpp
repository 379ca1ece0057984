#include "agcsc/experiment.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "agcsc/graph_ops.hpp"
#include "agcsc/metrics.hpp"
#include "agcsc/spectral.hpp"

namespace agcsc {

namespace {

namespace fs = std::filesystem;

struct JobOutput {
  std::vector<RunRecord> records;  // AGCSC row first, then one per m
  std::optional<SolverResult> result;
};

std::string format_value(double v) { return fmt::format("{:.10g}", v); }

std::string format_metric(double v) {
  return std::isfinite(v) ? fmt::format("{:.6f}", v) : std::string("nan");
}

std::string format_m(const std::optional<int>& m) { return m ? std::to_string(*m) : std::string(); }

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void write_record_row(std::ofstream& out, const RunRecord& r) {
  out << format_value(r.alpha) << ',' << format_value(r.beta) << ',' << format_m(r.m) << ','
      << format_metric(r.acc) << ',' << format_metric(r.nmi) << ',' << r.iterations << ','
      << (r.converged ? 1 : 0) << '\n';
}

LabelVector cluster_coefficients(const Matrix& c, int k, std::uint64_t seed, int restarts) {
  KMeansOptions options;
  options.restarts = restarts;
  return cluster_affinity(affinity_from_coefficients(c), k, seed, options);
}

JobOutput run_job(const ExperimentConfig& config, const DataMatrix& x, const LabelVector& truth,
                  int k, std::size_t job, double alpha, double beta) {
  JobOutput out;
  SolverConfig solver = config.solver;
  solver.alpha = alpha;
  solver.beta = beta;

  RunRecord base;
  base.alpha = alpha;
  base.beta = beta;
  const auto start = std::chrono::steady_clock::now();
  try {
    SolverResult result = solve(x, solver);
    base.iterations = result.iterations;
    base.converged = result.converged;
    const auto labels =
        cluster_coefficients(result.C, k, derive_seed(config.seed, job, 0), config.kmeans_restarts);
    base.acc = accuracy(labels, truth);
    base.nmi = nmi(labels, truth);
    base.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.records.push_back(base);

    for (std::size_t q = 0; q < config.m_grid.size(); ++q) {
      RunRecord rec = base;
      rec.m = config.m_grid[q];
      const auto t0 = std::chrono::steady_clock::now();
      const Matrix thresholded = threshold_m_largest(result.C, config.m_grid[q]);
      const auto tl = cluster_coefficients(thresholded, k, derive_seed(config.seed, job, q + 1),
                                           config.kmeans_restarts);
      rec.acc = accuracy(tl, truth);
      rec.nmi = nmi(tl, truth);
      rec.seconds =
          base.seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.records.push_back(rec);
    }
    out.result = std::move(result);
  } catch (const std::exception& e) {
    base.acc = base.nmi = std::nan("");
    base.converged = false;
    if (const auto* se = dynamic_cast<const SolverError*>(&e)) base.iterations = se->iteration();
    base.error = e.what();
    base.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.records.assign(1 + config.m_grid.size(), base);
    for (std::size_t q = 0; q < config.m_grid.size(); ++q) out.records[q + 1].m = config.m_grid[q];
  }
  return out;
}

nlohmann::json manifest(const ExperimentConfig& config, const DataMatrix& x, int k) {
  nlohmann::json j;
  if (const auto* syn = std::get_if<SyntheticSpec>(&config.source)) {
    j["source"] = {{"type", "synthetic"}, {"k", syn->k},        {"n_per", syn->n_per},
                   {"d", syn->d},         {"r", syn->r},        {"sigma", syn->sigma},
                   {"seed", syn->seed}};
  } else {
    const auto& file = std::get<FileSource>(config.source);
    j["source"] = {{"type", "file"},
                   {"data", file.data.string()},
                   {"labels", file.labels.string()},
                   {"format", file.format == MatrixFormat::kCsv ? "csv" : "bin"},
                   {"normalize", file.normalize}};
  }
  j["n"] = x.n();
  j["d"] = x.d();
  j["k"] = k;
  j["alpha_grid"] = config.alpha_grid;
  j["beta_grid"] = config.beta_grid;
  j["m_grid"] = config.m_grid;
  j["seed"] = config.seed;
  j["solver"] = {{"mu0", config.solver.mu0},
                 {"rho", config.solver.rho},
                 {"mu_max", config.solver.mu_max},
                 {"epsilon", config.solver.epsilon},
                 {"max_iter", config.solver.max_iter}};
  j["kmeans_restarts"] = config.kmeans_restarts;
  j["save_matrices"] = config.save_matrices;
  return j;
}

}  // namespace

std::vector<double> default_parameter_grid() {
  return {1e-5, 1e-4, 1e-3, 5e-3, 0.01, 0.05, 0.1, 0.5};
}

std::vector<int> default_threshold_grid() { return {4, 5, 6, 7, 8, 9, 10}; }

void ExperimentConfig::validate() const {
  if (alpha_grid.empty() || beta_grid.empty()) {
    throw std::invalid_argument("alpha and beta grids must be nonempty");
  }
  for (const double v : alpha_grid) {
    if (!(v > 0.0)) throw std::invalid_argument(fmt::format("alpha grid value {} not positive", v));
  }
  for (const double v : beta_grid) {
    if (!(v > 0.0)) throw std::invalid_argument(fmt::format("beta grid value {} not positive", v));
  }
  for (const int m : m_grid) {
    if (m < 1) throw std::invalid_argument(fmt::format("threshold m={} must be >= 1", m));
  }
  if (k != 0 && k < 2) throw std::invalid_argument(fmt::format("k={} must be at least 2", k));
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (kmeans_restarts < 1) throw std::invalid_argument("kmeans restarts must be >= 1");
  SolverConfig probe = solver;
  probe.alpha = alpha_grid.front();
  probe.beta = beta_grid.front();
  probe.validate();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t job, std::uint64_t sub) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(job), static_cast<std::uint32_t>(job >> 32),
                    static_cast<std::uint32_t>(sub)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

void emit_trace(const SolverResult& result, const fs::path& path) {
  auto out = open_output(path);
  out << "iter,c_minus_z_inf,c1_minus_1_inf,delta_c_fro2,delta_f_fro2,delta_z_fro2\n";
  for (std::size_t t = 0; t < result.history.size(); ++t) {
    const auto& h = result.history[t];
    out << fmt::format("{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}\n", t + 1, h.c_minus_z,
                       h.row_sum, h.delta_c, h.delta_f, h.delta_z);
  }
  if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

ExperimentSummary run_experiment(const ExperimentConfig& config, const DataMatrix& x,
                                 const LabelVector& truth) {
  config.validate();
  if (static_cast<Eigen::Index>(truth.size()) != x.n()) {
    throw std::invalid_argument(
        fmt::format("{} labels for {} samples", truth.size(), x.n()));
  }
  const int k = config.k != 0 ? config.k : truth.k();
  if (k < 2 || k > x.n()) {
    throw std::invalid_argument(fmt::format("k={} must lie in [2, {}]", k, x.n()));
  }

  fs::create_directories(config.out_dir / "traces");
  if (config.save_matrices) fs::create_directories(config.out_dir / "matrices");

  struct GridPoint {
    std::size_t alpha_index;
    std::size_t beta_index;
  };
  std::vector<GridPoint> grid;
  for (std::size_t a = 0; a < config.alpha_grid.size(); ++a) {
    for (std::size_t b = 0; b < config.beta_grid.size(); ++b) grid.push_back({a, b});
  }

  std::vector<JobOutput> outputs(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < grid.size(); job = next++) {
      const auto [a, b] = grid[job];
      outputs[job] = run_job(config, x, truth, k, job, config.alpha_grid[a], config.beta_grid[b]);
      const std::string stem = fmt::format("a{}_b{}", a, b);
      if (!outputs[job].result) continue;
      try {
        emit_trace(*outputs[job].result,
                   config.out_dir / "traces" / fmt::format("trace_{}.csv", stem));
        if (config.save_matrices) {
          const auto dir = config.out_dir / "matrices";
          save_dense_matrix(outputs[job].result->C, dir / fmt::format("C_{}.bin", stem),
                            MatrixFormat::kRawBinary);
          save_dense_matrix(outputs[job].result->F, dir / fmt::format("F_{}.bin", stem),
                            MatrixFormat::kRawBinary);
        }
      } catch (const std::exception& e) {
        for (auto& rec : outputs[job].records) rec.error = e.what();
      }
      outputs[job].result.reset();
    }
  };
  const int threads = std::min<int>(config.workers, static_cast<int>(grid.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  ExperimentSummary summary;
  summary.solves = static_cast<int>(grid.size());
  for (auto& out : outputs) {
    if (out.records.front().error) ++summary.failures;
    for (auto& rec : out.records) summary.records.push_back(std::move(rec));
  }
  for (std::size_t i = 0; i < summary.records.size(); ++i) {
    const auto& r = summary.records[i];
    if (r.error) continue;
    if (!summary.best_acc || r.acc > summary.records[*summary.best_acc].acc) summary.best_acc = i;
    if (!summary.best_nmi || r.nmi > summary.records[*summary.best_nmi].nmi) summary.best_nmi = i;
  }

  const char* header = "alpha,beta,m,acc,nmi,iters,converged\n";
  {
    auto out = open_output(config.out_dir / "records.csv");
    out << header;
    for (const auto& r : summary.records) write_record_row(out, r);
  }
  {
    auto out = open_output(config.out_dir / "summary.csv");
    out << "criterion," << header;
    if (summary.best_acc) {
      out << "best_acc,";
      write_record_row(out, summary.records[*summary.best_acc]);
    }
    if (summary.best_nmi) {
      out << "best_nmi,";
      write_record_row(out, summary.records[*summary.best_nmi]);
    }
  }
  {
    auto out = open_output(config.out_dir / "timings.csv");
    out << "alpha,beta,m,seconds\n";
    for (const auto& r : summary.records) {
      out << format_value(r.alpha) << ',' << format_value(r.beta) << ',' << format_m(r.m) << ','
          << fmt::format("{:.6f}", r.seconds) << '\n';
    }
  }
  if (summary.failures > 0) {
    auto out = open_output(config.out_dir / "failures.txt");
    for (std::size_t i = 0; i < summary.records.size(); ++i) {
      const auto& r = summary.records[i];
      if (r.error && !r.m) {
        out << fmt::format("alpha={} beta={}: {}\n", format_value(r.alpha), format_value(r.beta),
                           *r.error);
      }
    }
  }
  {
    auto out = open_output(config.out_dir / "manifest.json");
    out << manifest(config, x, k).dump(2) << '\n';
  }
  return summary;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (const auto* syn = std::get_if<SyntheticSpec>(&config.source)) {
    const auto [x, labels] = generate_union_of_subspaces(*syn);
    return run_experiment(config, x, labels);
  }
  const auto& file = std::get<FileSource>(config.source);
  DataMatrix x = load_dense_matrix(file.data, file.format);
  if (file.normalize) x = normalize_pixel_range(x);
  if (file.labels.empty()) throw DataError("a label file is required to score clusterings");
  const LabelVector labels = load_labels(file.labels);
  return run_experiment(config, x, labels);
}

}  // namespace agcsc
