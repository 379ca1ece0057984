#pragma once

#include <cstdint>
#include <vector>

#include "agcsc/dataset.hpp"

namespace agcsc {

/// counts(p, t) = number of samples with predicted id p and true id t.
class ContingencyTable {
 public:
  ContingencyTable(const LabelVector& predicted, const LabelVector& truth);

  int pred_clusters() const { return rows_; }
  int true_clusters() const { return cols_; }
  std::int64_t operator()(int p, int t) const { return counts_[p * cols_ + t]; }
  std::int64_t total() const { return total_; }

 private:
  int rows_;
  int cols_;
  std::int64_t total_;
  std::vector<std::int64_t> counts_;
};

inline constexpr int kUnmatched = -1;

/// For every predicted id, the true id it maps to under the assignment that
/// maximizes the number of matched samples, or kUnmatched when there are more
/// predicted than true clusters. Among optimal assignments the
/// lexicographically smallest mapping vector wins.
std::vector<int> optimal_label_map(const LabelVector& predicted, const LabelVector& truth);

/// Fraction of samples matched under optimal_label_map.
double accuracy(const LabelVector& predicted, const LabelVector& truth);

/// I(pred, true) / sqrt(H(pred) H(true)), natural log. When either entropy is
/// zero the result is 1 if both induce the same partition and 0 otherwise.
double nmi(const LabelVector& predicted, const LabelVector& truth);

}  // namespace agcsc
