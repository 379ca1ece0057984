#include "agcsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace agcsc {

namespace {

using Weights = std::vector<std::vector<std::int64_t>>;

struct Assignment {
  std::int64_t value = 0;
  std::vector<int> column_of_row;
};

// Maximum-weight perfect matching on a square matrix (Hungarian method with
// potentials, O(n^3)). Integer weights keep optimal values exactly comparable.
Assignment max_weight_assignment(const Weights& w) {
  const int n = static_cast<int>(w.size());
  Assignment out;
  out.column_of_row.assign(static_cast<std::size_t>(n), -1);
  if (n == 0) return out;

  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  // 1-based: u row potentials, v column potentials, p[j] row matched to column j.
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<std::int64_t> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      std::int64_t delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = -w[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (int j = 1; j <= n; ++j) {
    out.column_of_row[p[j] - 1] = j - 1;
    out.value += w[p[j] - 1][j - 1];
  }
  return out;
}

Weights submatrix(const Weights& w, const std::vector<int>& rows, const std::vector<int>& cols) {
  Weights sub(rows.size(), std::vector<std::int64_t>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) sub[r][c] = w[rows[r]][cols[c]];
  }
  return sub;
}

void check_lengths(const LabelVector& predicted, const LabelVector& truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument(fmt::format("label vectors differ in length: {} vs {}",
                                            predicted.size(), truth.size()));
  }
  if (predicted.size() == 0) throw std::invalid_argument("label vectors are empty");
}

bool same_partition(const ContingencyTable& table) {
  // Same partition iff every nonempty row and column has exactly one nonzero.
  for (int p = 0; p < table.pred_clusters(); ++p) {
    int nonzero = 0;
    for (int t = 0; t < table.true_clusters(); ++t) nonzero += table(p, t) > 0;
    if (nonzero > 1) return false;
  }
  for (int t = 0; t < table.true_clusters(); ++t) {
    int nonzero = 0;
    for (int p = 0; p < table.pred_clusters(); ++p) nonzero += table(p, t) > 0;
    if (nonzero > 1) return false;
  }
  return true;
}

}  // namespace

ContingencyTable::ContingencyTable(const LabelVector& predicted, const LabelVector& truth)
    : rows_(predicted.k()), cols_(truth.k()), total_(0) {
  check_lengths(predicted, truth);
  counts_.assign(static_cast<std::size_t>(rows_) * cols_, 0);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ++counts_[static_cast<std::size_t>(predicted[i]) * cols_ + truth[i]];
    ++total_;
  }
}

std::vector<int> optimal_label_map(const LabelVector& predicted, const LabelVector& truth) {
  const ContingencyTable table(predicted, truth);
  const int kp = table.pred_clusters();
  const int kt = table.true_clusters();
  const int size = std::max(kp, kt);

  // Pad to square; padded columns stand for "unmatched" and sort after every
  // real true id, padded rows are never reported.
  Weights w(size, std::vector<std::int64_t>(size, 0));
  for (int p = 0; p < kp; ++p) {
    for (int t = 0; t < kt; ++t) w[p][t] = table(p, t);
  }

  Assignment current = max_weight_assignment(w);
  std::vector<int> free_rows(size), free_cols(size);
  for (int i = 0; i < size; ++i) free_rows[i] = free_cols[i] = i;
  std::vector<int> mapping(size, -1);
  for (int i = 0; i < size; ++i) mapping[i] = current.column_of_row[i];
  std::int64_t remaining = current.value;

  // Fix rows in order, each to the smallest column that still admits an
  // optimal completion. The current optimum always admits mapping[p].
  for (int p = 0; p < kp; ++p) {
    free_rows.erase(std::find(free_rows.begin(), free_rows.end(), p));
    for (const int t : std::vector<int>(free_cols)) {
      if (t >= mapping[p]) break;
      std::vector<int> cols = free_cols;
      cols.erase(std::find(cols.begin(), cols.end(), t));
      const Assignment rest = max_weight_assignment(submatrix(w, free_rows, cols));
      if (w[p][t] + rest.value == remaining) {
        mapping[p] = t;
        for (std::size_t r = 0; r < free_rows.size(); ++r) {
          mapping[free_rows[r]] = cols[rest.column_of_row[r]];
        }
        break;
      }
    }
    remaining -= w[p][mapping[p]];
    free_cols.erase(std::find(free_cols.begin(), free_cols.end(), mapping[p]));
  }

  std::vector<int> result(static_cast<std::size_t>(kp));
  for (int p = 0; p < kp; ++p) result[p] = mapping[p] < kt ? mapping[p] : kUnmatched;
  return result;
}

double accuracy(const LabelVector& predicted, const LabelVector& truth) {
  check_lengths(predicted, truth);
  const auto mapping = optimal_label_map(predicted, truth);
  std::size_t matched = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    matched += mapping[predicted[i]] == truth[i];
  }
  return static_cast<double>(matched) / static_cast<double>(predicted.size());
}

double nmi(const LabelVector& predicted, const LabelVector& truth) {
  const ContingencyTable table(predicted, truth);
  if (same_partition(table)) return 1.0;
  const double n = static_cast<double>(table.total());

  std::vector<double> row_mass(table.pred_clusters(), 0.0);
  std::vector<double> col_mass(table.true_clusters(), 0.0);
  for (int p = 0; p < table.pred_clusters(); ++p) {
    for (int t = 0; t < table.true_clusters(); ++t) {
      row_mass[p] += static_cast<double>(table(p, t));
      col_mass[t] += static_cast<double>(table(p, t));
    }
  }
  auto entropy = [n](const std::vector<double>& mass) {
    double h = 0.0;
    for (const double m : mass) {
      if (m > 0.0) h -= (m / n) * std::log(m / n);
    }
    return h;
  };
  const double h_pred = entropy(row_mass);
  const double h_true = entropy(col_mass);
  if (h_pred <= 0.0 || h_true <= 0.0) return 0.0;

  double mi = 0.0;
  for (int p = 0; p < table.pred_clusters(); ++p) {
    for (int t = 0; t < table.true_clusters(); ++t) {
      const double c = static_cast<double>(table(p, t));
      if (c > 0.0) mi += (c / n) * std::log(n * c / (row_mass[p] * col_mass[t]));
    }
  }
  return std::clamp(mi / std::sqrt(h_pred * h_true), 0.0, 1.0);
}

}  // namespace agcsc
