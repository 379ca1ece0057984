#include "agcsc/solver.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace agcsc {

namespace {

// Cholesky of an SPD system matrix; fails loudly instead of returning garbage.
Eigen::LLT<Matrix> factorize(const Matrix& m, const char* block, int iteration) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw SolverError(fmt::format("Cholesky factorization failed in {}-update", block), iteration);
  }
  return llt;
}

// The C-update with a precomputed Gram matrix X X'.
Matrix solve_C(const SolverState& s, const Matrix& x, const Matrix& gram,
               const SolverConfig& cfg) {
  const auto n = x.rows();
  const Matrix ones = Matrix::Ones(n, n);
  const Matrix identity = Matrix::Identity(n, n);
  const Matrix i_minus_z = identity - s.Z;

  Matrix system = 2.0 * gram;
  system.noalias() += (2.0 * cfg.alpha) * (s.F * s.F.transpose());
  system.noalias() += (2.0 * cfg.beta) * (i_minus_z * i_minus_z.transpose());
  system += s.mu * (identity + ones);

  const Matrix fxt = s.F * x.transpose();
  Matrix rhs = 4.0 * fxt - 2.0 * gram + (2.0 * cfg.alpha) * fxt.transpose();
  rhs += s.mu * (s.Z + ones) - s.Gamma;
  rhs.colwise() -= s.Lambda;

  // C M = R with M symmetric  <=>  M C' = R'.
  return factorize(system, "C", s.t).solve(rhs.transpose()).transpose();
}

Matrix solve_F(const SolverState& s, const Matrix& x, const Matrix& ctc, const SolverConfig& cfg) {
  Matrix system = cfg.alpha * ctc;
  system.diagonal().array() += 4.0;
  Matrix op = 2.0 * s.C + cfg.alpha * s.C.transpose();
  op.diagonal().array() += 2.0;
  const Matrix rhs = op * x;
  return factorize(system, "F", s.t).solve(rhs);
}

Matrix solve_Z(const SolverState& s, const Matrix& ctc, const SolverConfig& cfg) {
  Matrix system = (2.0 * cfg.beta) * ctc;
  system.diagonal().array() += s.mu;
  const Matrix rhs = (2.0 * cfg.beta) * ctc + s.Gamma + s.mu * s.C;
  return factorize(system, "Z", s.t).solve(rhs);
}

}  // namespace

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (!(alpha > 0.0)) fail(fmt::format("alpha must be positive, got {}", alpha));
  if (!(beta > 0.0)) fail(fmt::format("beta must be positive, got {}", beta));
  if (!(mu0 > 0.0)) fail(fmt::format("mu0 must be positive, got {}", mu0));
  if (!(rho > 1.0)) fail(fmt::format("rho must exceed 1, got {}", rho));
  if (!(mu_max >= mu0)) fail(fmt::format("mu_max {} is below mu0 {}", mu_max, mu0));
  if (!(epsilon > 0.0)) fail(fmt::format("epsilon must be positive, got {}", epsilon));
  if (max_iter < 0) fail(fmt::format("max_iter must be nonnegative, got {}", max_iter));
}

SolverState initialize(const DataMatrix& x, const SolverConfig& config) {
  config.validate();
  const auto n = x.n();
  SolverState s;
  s.C = Matrix::Zero(n, n);
  s.F = x.values();
  s.Z = Matrix::Zero(n, n);
  s.Gamma = Matrix::Zero(n, n);
  s.Lambda = Vector::Zero(n);
  s.mu = config.mu0;
  s.t = 0;
  return s;
}

Matrix update_C(const SolverState& state, const DataMatrix& x, const SolverConfig& config) {
  const Matrix gram = x.values() * x.values().transpose();
  return solve_C(state, x.values(), gram, config);
}

Matrix update_F(const SolverState& state, const DataMatrix& x, const SolverConfig& config) {
  const Matrix ctc = state.C.transpose() * state.C;
  return solve_F(state, x.values(), ctc, config);
}

Matrix update_Z(const SolverState& state, const SolverConfig& config) {
  const Matrix ctc = state.C.transpose() * state.C;
  return solve_Z(state, ctc, config);
}

Matrix project_Z(const Matrix& z) {
  Matrix clamped = z;
  clamped.diagonal().setZero();
  clamped = clamped.cwiseMax(0.0);
  return ((clamped + clamped.transpose()) * 0.5).eval();
}

MultiplierUpdate update_multipliers(const SolverState& state, const SolverConfig& config) {
  MultiplierUpdate u;
  u.Gamma = state.Gamma + state.mu * (state.C - state.Z);
  Vector row_excess = state.C.rowwise().sum();
  row_excess.array() -= 1.0;
  u.Lambda = state.Lambda + state.mu * row_excess;
  u.mu = std::min(config.mu_max, config.rho * state.mu);
  return u;
}

std::pair<double, double> residuals(const SolverState& state) {
  const double r1 = (state.C - state.Z).cwiseAbs().maxCoeff();
  const double r2 = (state.C.rowwise().sum().array() - 1.0).abs().maxCoeff();
  return {r1, r2};
}

double augmented_lagrangian(const SolverState& state, const DataMatrix& x,
                            const SolverConfig& config) {
  const Matrix& X = x.values();
  const auto n = X.rows();
  const Matrix c_plus_i = state.C + Matrix::Identity(n, n);
  const Matrix c_minus_z = state.C - state.Z;
  Vector row_excess = state.C.rowwise().sum();
  row_excess.array() -= 1.0;

  const double fidelity = (2.0 * state.F - c_plus_i * X).squaredNorm();
  const double reconstruction = (X - state.C * state.F).squaredNorm();
  const double smoothness = (state.C - state.C * state.Z).squaredNorm();
  const double coupling = (state.Gamma.array() * c_minus_z.array()).sum();
  const double row_term = state.Lambda.dot(row_excess);
  const double penalty = 0.5 * state.mu * (c_minus_z.squaredNorm() + row_excess.squaredNorm());
  return fidelity + config.alpha * reconstruction + config.beta * smoothness + coupling +
         row_term + penalty;
}

SolverResult solve(const DataMatrix& x, const SolverConfig& config, const SolveObserver& observer) {
  if (x.n() < 2) {
    throw std::invalid_argument(
        "need at least two samples: C 1 = 1 with a zero diagonal is infeasible for n = 1");
  }
  SolverState s = initialize(x, config);
  const Matrix& X = x.values();
  const Matrix gram = X * X.transpose();
  auto notify = [&](SolveStage stage) {
    if (observer) observer(stage, s);
  };

  auto [r1, r2] = residuals(s);
  while ((r1 > config.epsilon || r2 > config.epsilon) && s.t < config.max_iter) {
    ++s.t;
    IterationRecord rec;

    Matrix next = solve_C(s, X, gram, config);
    rec.delta_c = (next - s.C).squaredNorm();
    s.C = std::move(next);
    notify(SolveStage::kC);

    const Matrix ctc = s.C.transpose() * s.C;
    next = solve_F(s, X, ctc, config);
    rec.delta_f = (next - s.F).squaredNorm();
    s.F = std::move(next);
    notify(SolveStage::kF);

    const Matrix z_prev = s.Z;
    s.Z = solve_Z(s, ctc, config);
    notify(SolveStage::kZ);
    s.Z = project_Z(s.Z);
    rec.delta_z = (s.Z - z_prev).squaredNorm();
    notify(SolveStage::kProjectedZ);

    auto dual = update_multipliers(s, config);
    s.Gamma = std::move(dual.Gamma);
    s.Lambda = std::move(dual.Lambda);
    s.mu = dual.mu;
    notify(SolveStage::kMultipliers);

    std::tie(r1, r2) = residuals(s);
    if (!std::isfinite(r1) || !std::isfinite(r2)) {
      throw SolverError("iterates became non-finite", s.t);
    }
    rec.c_minus_z = r1;
    rec.row_sum = r2;
    s.history.push_back(rec);
  }

  SolverResult result;
  result.converged = r1 <= config.epsilon && r2 <= config.epsilon;
  result.iterations = s.t;
  result.C = std::move(s.C);
  result.Z = std::move(s.Z);
  result.F = std::move(s.F);
  result.history = std::move(s.history);
  return result;
}

}  // namespace agcsc
