#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "error.hpp"

namespace cortree {

/// Cross-tabulation of two labelings; rows follow `a`, columns follow `b`.
/// Labels are compacted to 0..k-1 in increasing order of their raw values.
class ContingencyTable {
 public:
  ContingencyTable(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw input_error("labelings have different lengths");
    const auto ra = compact(a, row_labels_);
    const auto rb = compact(b, col_labels_);
    cells_.assign(row_labels_.size() * col_labels_.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) ++cells_[ra[i] * col_labels_.size() + rb[i]];
    n_ = a.size();
  }

  std::size_t rows() const { return row_labels_.size(); }
  std::size_t cols() const { return col_labels_.size(); }
  std::size_t total() const { return n_; }
  long count(std::size_t i, std::size_t j) const { return cells_[i * cols() + j]; }
  const std::vector<int>& row_labels() const { return row_labels_; }
  const std::vector<int>& col_labels() const { return col_labels_; }

  long row_sum(std::size_t i) const {
    long s = 0;
    for (std::size_t j = 0; j < cols(); ++j) s += count(i, j);
    return s;
  }
  long col_sum(std::size_t j) const {
    long s = 0;
    for (std::size_t i = 0; i < rows(); ++i) s += count(i, j);
    return s;
  }

 private:
  static std::vector<std::size_t> compact(std::span<const int> x, std::vector<int>& labels) {
    labels.assign(x.begin(), x.end());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::vector<std::size_t> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      out[i] = static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), x[i]) - labels.begin());
    return out;
  }

  std::vector<int> row_labels_, col_labels_;
  std::vector<long> cells_;
  std::size_t n_ = 0;
};

inline double choose2(double x) { return x * (x - 1.0) / 2.0; }

/// Adjusted Rand index (Hubert-Arabie). Two labelings that are both trivial in
/// the same way (one block, or all singletons) score 1.
inline double ari(const ContingencyTable& t) {
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) index += choose2(static_cast<double>(t.count(i, j)));
  for (std::size_t i = 0; i < t.rows(); ++i) sa += choose2(static_cast<double>(t.row_sum(i)));
  for (std::size_t j = 0; j < t.cols(); ++j) sb += choose2(static_cast<double>(t.col_sum(j)));
  const double pairs = choose2(static_cast<double>(t.total()));
  if (pairs == 0.0) return 1.0;
  const double expected = sa * sb / pairs;
  const double max_index = 0.5 * (sa + sb);
  const double denom = max_index - expected;
  if (denom == 0.0) return index == expected ? 1.0 : 0.0;
  return (index - expected) / denom;
}

inline double ari(std::span<const int> a, std::span<const int> b) { return ari(ContingencyTable(a, b)); }

/// Quantile binning: label = floor(rank * levels / n), ties share the lowest rank.
inline std::vector<int> discretize_scores(std::span<const double> scores, int levels) {
  if (levels < 2) throw input_error("need at least two levels");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x] < scores[y]; });
  std::vector<int> out(n, 0);
  std::size_t rank = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == 0 || scores[order[r]] != scores[order[r - 1]]) rank = r;
    out[order[r]] = static_cast<int>(rank * static_cast<std::size_t>(levels) / n);
  }
  return out;
}

/// Number of distinct labels.
inline int count_labels(std::span<const int> labels) {
  std::vector<int> v(labels.begin(), labels.end());
  std::sort(v.begin(), v.end());
  return static_cast<int>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace cortree
