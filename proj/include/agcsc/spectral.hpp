#pragma once

#include <cstdint>
#include <vector>

#include "agcsc/dataset.hpp"
#include "agcsc/graph_ops.hpp"

namespace agcsc {

struct SpectralEmbedding {
  Matrix vectors;      // n x k, rows normalized to unit length
  Vector eigenvalues;  // k leading eigenvalues, descending
  std::vector<bool> zero_rows;  // rows left at zero because they had no mass
};

/// Normalized-cut embedding: leading k eigenvectors of D^{-1/2} A D^{-1/2}
/// (zero degrees treated as 1), row-normalized.
SpectralEmbedding ncuts_embedding(const Affinity& a, int k);

struct KMeansOptions {
  int restarts = 20;
  int max_iter = 300;
  double tolerance = 1e-9;  // relative decrease of the objective
};

struct KMeansResult {
  std::vector<int> labels;
  Matrix centroids;
  double objective = 0.0;          // within-cluster sum of squares
  std::vector<double> trace;       // objective after each Lloyd step, best restart
  int best_restart = 0;
};

/// k-means++ seeding followed by Lloyd iterations; keeps the restart with the
/// lowest objective (earliest restart on ties). Deterministic given seed.
KMeansResult kmeans_detailed(const Matrix& points, int k, std::uint64_t seed,
                             const KMeansOptions& options = {});

LabelVector kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 20);

/// ncuts_embedding followed by kmeans on the embedding rows.
LabelVector cluster_affinity(const Affinity& a, int k, std::uint64_t seed,
                             const KMeansOptions& options = {});

}  // namespace agcsc
