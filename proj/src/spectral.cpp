#include "agcsc/spectral.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace agcsc {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kZeroRow = 1e-12;

double squared_distance(const Matrix& points, Eigen::Index i, const Matrix& centroids,
                        Eigen::Index c) {
  return (points.row(i) - centroids.row(c)).squaredNorm();
}

// k-means++: each new centre is drawn with probability proportional to the
// squared distance to the nearest centre chosen so far.
Matrix seed_centroids(const Matrix& points, int k, std::mt19937_64& rng) {
  const auto n = points.rows();
  Matrix centroids(k, points.cols());
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  Eigen::Index pick = first(rng);
  for (int c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) total += nearest[i];
      if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        pick = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (nearest[i] <= 0.0) continue;
          pick = i;
          target -= nearest[i];
          if (target <= 0.0) break;
        }
      } else {
        // Every point coincides with a centre; fall back to an unused index.
        std::vector<Eigen::Index> unused;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (!chosen[i]) unused.push_back(i);
        }
        std::uniform_int_distribution<std::size_t> any(0, unused.size() - 1);
        pick = unused[any(rng)];
      }
    }
    chosen[pick] = true;
    centroids.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points, i, centroids, c));
    }
  }
  return centroids;
}

double assign(const Matrix& points, const Matrix& centroids, std::vector<int>& labels) {
  double objective = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double dist = squared_distance(points, i, centroids, c);
      if (dist < best) {
        best = dist;
        best_c = static_cast<int>(c);
      }
    }
    labels[i] = best_c;
    objective += best;
  }
  return objective;
}

// Recomputes centroids as means. An empty cluster takes the point currently
// farthest from its centre, which can only lower the objective.
void update_centroids(const Matrix& points, std::vector<int>& labels, Matrix& centroids) {
  const auto k = centroids.rows();
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  Matrix sums = Matrix::Zero(k, points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(labels[i]) += points.row(i);
    ++counts[labels[i]];
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts[c] > 0) {
      centroids.row(c) = sums.row(c) / counts[c];
      continue;
    }
    Eigen::Index far = -1;
    double far_dist = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (counts[labels[i]] <= 1) continue;
      const double dist = squared_distance(points, i, centroids, labels[i]);
      if (dist > far_dist) {
        far_dist = dist;
        far = i;
      }
    }
    if (far < 0) continue;
    --counts[labels[far]];
    labels[far] = static_cast<int>(c);
    counts[c] = 1;
    centroids.row(c) = points.row(far);
  }
}

}  // namespace

SpectralEmbedding ncuts_embedding(const Affinity& affinity, int k) {
  const Matrix& a = affinity.values();
  const auto n = a.rows();
  if (k < 1 || k > n) {
    throw std::invalid_argument(fmt::format("cluster count k={} must lie in [1, {}]", k, n));
  }
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    throw std::invalid_argument(fmt::format("affinity asymmetric by {}", asym));
  }

  Vector scale = a.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    scale(i) = 1.0 / std::sqrt(scale(i) > 0.0 ? scale(i) : 1.0);
  }
  const Matrix normalized = scale.asDiagonal() * a * scale.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(normalized);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  SpectralEmbedding out;
  out.vectors.resize(n, k);
  out.eigenvalues.resize(k);
  for (int q = 0; q < k; ++q) {
    out.vectors.col(q) = eig.eigenvectors().col(n - 1 - q);
    out.eigenvalues(q) = eig.eigenvalues()(n - 1 - q);
  }
  out.zero_rows.assign(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = out.vectors.row(i).norm();
    if (norm <= kZeroRow) {
      out.vectors.row(i).setZero();
      out.zero_rows[i] = true;
    } else {
      out.vectors.row(i) /= norm;
    }
  }
  return out;
}

KMeansResult kmeans_detailed(const Matrix& points, int k, std::uint64_t seed,
                             const KMeansOptions& options) {
  const auto n = points.rows();
  if (k < 1 || k > n) {
    throw std::invalid_argument(fmt::format("cluster count k={} must lie in [1, {}]", k, n));
  }
  if (options.restarts < 1) throw std::invalid_argument("kmeans needs at least one restart");

  KMeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < options.restarts; ++restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);

    Matrix centroids = seed_centroids(points, k, rng);
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    double objective = assign(points, centroids, labels);
    std::vector<double> trace{objective};
    for (int it = 0; it < options.max_iter; ++it) {
      update_centroids(points, labels, centroids);
      const double next = assign(points, centroids, labels);
      trace.push_back(next);
      const bool settled = objective - next <= options.tolerance * std::max(objective, 1e-300);
      objective = next;
      if (settled) break;
    }
    if (objective < best.objective) {
      best.labels = std::move(labels);
      best.centroids = std::move(centroids);
      best.objective = objective;
      best.trace = std::move(trace);
      best.best_restart = restart;
    }
  }
  return best;
}

LabelVector kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts) {
  KMeansOptions options;
  options.restarts = restarts;
  return LabelVector(kmeans_detailed(points, k, seed, options).labels, k);
}

LabelVector cluster_affinity(const Affinity& a, int k, std::uint64_t seed,
                             const KMeansOptions& options) {
  const auto embedding = ncuts_embedding(a, k);
  return LabelVector(kmeans_detailed(embedding.vectors, k, seed, options).labels, k);
}

}  // namespace agcsc
