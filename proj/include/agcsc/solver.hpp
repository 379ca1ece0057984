#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "agcsc/dataset.hpp"

namespace agcsc {

/// Hyperparameters of the adaptive graph-convolutional self-expressive model
/// and the ADMM penalty schedule. Defaults follow the reference settings.
struct SolverConfig {
  double alpha = 0.01;   // weight of ||X - C F||^2
  double beta = 0.01;    // weight of ||C - C Z||^2
  double mu0 = 1e-6;
  double rho = 1.1;
  double mu_max = 1e30;
  double epsilon = 1e-7;
  int max_iter = 500;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// Per-iteration diagnostics. The two residuals drive the stopping rule; the
/// deltas are squared Frobenius norms of the change in each primal block.
struct IterationRecord {
  double c_minus_z = 0.0;  // max |C - Z|
  double row_sum = 0.0;    // max |C 1 - 1|
  double delta_c = 0.0;
  double delta_f = 0.0;
  double delta_z = 0.0;
};

struct SolverState {
  Matrix C;       // n x n reconstruction coefficients
  Matrix F;       // n x d aggregated features
  Matrix Z;       // n x n feasible copy of C
  Matrix Gamma;   // multiplier for C = Z
  Vector Lambda;  // multiplier for C 1 = 1
  double mu = 0.0;
  int t = 0;
  std::vector<IterationRecord> history;
};

struct SolverResult {
  Matrix C;
  Matrix Z;
  Matrix F;
  bool converged = false;
  int iterations = 0;
  std::vector<IterationRecord> history;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

struct MultiplierUpdate {
  Matrix Gamma;
  Vector Lambda;
  double mu = 0.0;
};

SolverState initialize(const DataMatrix& x, const SolverConfig& config);

// Exact block minimizers of the augmented Lagrangian. Each solves an SPD
// system by Cholesky; none of them mutates the state.

/// Solves C (2XX' + 2a FF' + 2b (I-Z)(I-Z)' + mu (I + 11'))
///        = 4FX' - 2XX' + 2a XF' + mu Z + mu 11' - Gamma - Lambda 1'.
Matrix update_C(const SolverState& state, const DataMatrix& x, const SolverConfig& config);

/// Solves (a C'C + 4I) F = (2C + 2I + a C') X.
Matrix update_F(const SolverState& state, const DataMatrix& x, const SolverConfig& config);

/// Solves (2b C'C + mu I) Z = 2b C'C + Gamma + mu C. Not projected.
Matrix update_Z(const SolverState& state, const SolverConfig& config);

/// Zero the diagonal, clamp negatives, then symmetrize. Output is exactly
/// symmetric, nonnegative and zero on the diagonal.
Matrix project_Z(const Matrix& z);

/// Dual ascent with the current penalty, then mu <- min(mu_max, rho mu).
MultiplierUpdate update_multipliers(const SolverState& state, const SolverConfig& config);

/// (max |C - Z|, max |C 1 - 1|).
std::pair<double, double> residuals(const SolverState& state);

double augmented_lagrangian(const SolverState& state, const DataMatrix& x,
                            const SolverConfig& config);

enum class SolveStage { kC, kF, kZ, kProjectedZ, kMultipliers };

/// Called after each block update inside solve(). The state reflects the
/// update just made; multipliers and mu still hold their pre-iteration
/// values for every stage except kMultipliers.
using SolveObserver = std::function<void(SolveStage, const SolverState&)>;

/// ADMM loop: C, F, Z (+projection), multipliers, mu; stops when both
/// residuals are <= epsilon or after max_iter iterations. Requires n >= 2.
SolverResult solve(const DataMatrix& x, const SolverConfig& config,
                   const SolveObserver& observer = {});

}  // namespace agcsc
