#pragma once

// Distance-based clustering baselines: Lloyd k-means with Forgy starts and
// k-medoids (BUILD + SWAP) under squared Euclidean cost. Both also serve as
// initializers for the mixture sampler.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace cortree {

using FeatureMatrix = Eigen::MatrixXd;  // n x p, one row per sample

struct Labeling {
  std::vector<int> labels;
  int k = 0;
};

/// Rows of a count matrix as features: proportions (default) or raw counts.
/// All-zero rows stay zero.
inline FeatureMatrix make_features(std::span<const std::int64_t> counts, std::size_t rows, std::size_t cols,
                                   bool normalize = true) {
  if (counts.size() != rows * cols) throw input_error("count matrix size mismatch");
  FeatureMatrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < cols; ++j) total += static_cast<double>(counts[i * cols + j]);
    const double scale = normalize && total > 0.0 ? 1.0 / total : 1.0;
    for (std::size_t j = 0; j < cols; ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(counts[i * cols + j]) * scale;
  }
  return x;
}

struct KMeansResult {
  Labeling labeling;
  FeatureMatrix centers;
  std::vector<double> objective;  // within-cluster sum of squares after each iteration
  int iterations = 0;
};

inline KMeansResult kmeans_detailed(const FeatureMatrix& x, int k, Rng& rng, int max_iter = 100) {
  const Eigen::Index n = x.rows();
  if (k < 1) throw input_error("k must be at least 1");
  if (k > n) throw input_error("k exceeds the number of samples");

  // Forgy: k distinct rows chosen uniformly
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (int c = 0; c < k; ++c) {
    const auto j = c + static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n - c));
    std::swap(idx[static_cast<std::size_t>(c)], idx[static_cast<std::size_t>(std::min(j, n - 1))]);
  }
  KMeansResult r;
  r.centers.resize(k, x.cols());
  for (int c = 0; c < k; ++c) r.centers.row(c) = x.row(idx[static_cast<std::size_t>(c)]);

  std::vector<int> z(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (x.row(i) - r.centers.row(c)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (z[static_cast<std::size_t>(i)] != best) changed = true;
      z[static_cast<std::size_t>(i)] = best;
      dist[static_cast<std::size_t>(i)] = bd;
    }
    // empty clusters take the point farthest from its current center
    std::vector<int> size(static_cast<std::size_t>(k), 0);
    for (int c : z) ++size[static_cast<std::size_t>(c)];
    for (int c = 0; c < k; ++c) {
      if (size[static_cast<std::size_t>(c)] > 0) continue;
      std::size_t far = 0;
      for (std::size_t i = 0; i < dist.size(); ++i)
        if (size[static_cast<std::size_t>(z[i])] > 1 && dist[i] > dist[far]) far = i;
      --size[static_cast<std::size_t>(z[far])];
      z[far] = c;
      size[static_cast<std::size_t>(c)] = 1;
      dist[far] = 0.0;
      changed = true;
    }
    r.centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i) r.centers.row(z[static_cast<std::size_t>(i)]) += x.row(i);
    for (int c = 0; c < k; ++c) r.centers.row(c) /= static_cast<double>(size[static_cast<std::size_t>(c)]);

    double obj = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) obj += (x.row(i) - r.centers.row(z[static_cast<std::size_t>(i)])).squaredNorm();
    r.objective.push_back(obj);
    r.iterations = it + 1;
    if (!changed) break;
  }
  r.labeling = {std::move(z), k};
  return r;
}

inline Labeling kmeans(const FeatureMatrix& x, int k, Rng& rng, int max_iter = 100) {
  return kmeans_detailed(x, k, rng, max_iter).labeling;
}

struct PamResult {
  Labeling labeling;
  std::vector<Eigen::Index> medoids;
  std::vector<double> cost;  // after BUILD, then after each accepted swap
};

inline Eigen::MatrixXd squared_distances(const FeatureMatrix& x) {
  const Eigen::VectorXd norms = x.rowwise().squaredNorm();
  Eigen::MatrixXd d = -2.0 * x * x.transpose();
  d.colwise() += norms;
  d.rowwise() += norms.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

inline PamResult pam_detailed(const FeatureMatrix& x, int k, int max_iter = 100) {
  const Eigen::Index n = x.rows();
  if (k < 1) throw input_error("k must be at least 1");
  if (k > n) throw input_error("k exceeds the number of samples");
  const Eigen::MatrixXd d = squared_distances(x);
  constexpr double inf = std::numeric_limits<double>::infinity();

  PamResult r;
  std::vector<bool> is_medoid(static_cast<std::size_t>(n), false);
  std::vector<double> nearest(static_cast<std::size_t>(n), inf);

  // BUILD
  for (int c = 0; c < k; ++c) {
    Eigen::Index best = -1;
    double best_cost = inf;
    for (Eigen::Index h = 0; h < n; ++h) {
      if (is_medoid[static_cast<std::size_t>(h)]) continue;
      double cost = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) cost += std::min(nearest[static_cast<std::size_t>(j)], d(j, h));
      if (cost < best_cost) {
        best_cost = cost;
        best = h;
      }
    }
    r.medoids.push_back(best);
    is_medoid[static_cast<std::size_t>(best)] = true;
    for (Eigen::Index j = 0; j < n; ++j)
      nearest[static_cast<std::size_t>(j)] = std::min(nearest[static_cast<std::size_t>(j)], d(j, best));
  }

  auto assign = [&](std::vector<int>& who, std::vector<double>& d1, std::vector<double>& d2) {
    who.assign(static_cast<std::size_t>(n), 0);
    d1.assign(static_cast<std::size_t>(n), inf);
    d2.assign(static_cast<std::size_t>(n), inf);
    for (Eigen::Index j = 0; j < n; ++j)
      for (int c = 0; c < k; ++c) {
        const double v = d(j, r.medoids[static_cast<std::size_t>(c)]);
        auto js = static_cast<std::size_t>(j);
        if (v < d1[js]) {
          d2[js] = d1[js];
          d1[js] = v;
          who[js] = c;
        } else if (v < d2[js]) {
          d2[js] = v;
        }
      }
    return std::accumulate(d1.begin(), d1.end(), 0.0);
  };

  std::vector<int> who;
  std::vector<double> d1, d2;
  double cost = assign(who, d1, d2);
  r.cost.push_back(cost);

  // SWAP: best (medoid, non-medoid) exchange per pass, taken only if it lowers the cost
  for (int it = 0; it < max_iter; ++it) {
    double best_delta = 0.0;
    int best_c = -1;
    Eigen::Index best_h = -1;
    for (int c = 0; c < k; ++c) {
      for (Eigen::Index h = 0; h < n; ++h) {
        if (is_medoid[static_cast<std::size_t>(h)]) continue;
        double delta = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
          const auto js = static_cast<std::size_t>(j);
          const double dh = d(j, h);
          const double now = d1[js];
          const double after = who[js] == c ? std::min(d2[js], dh) : std::min(now, dh);
          delta += after - now;
        }
        if (delta < best_delta - 1e-12 * (1.0 + cost)) {
          best_delta = delta;
          best_c = c;
          best_h = h;
        }
      }
    }
    if (best_c < 0) break;
    is_medoid[static_cast<std::size_t>(r.medoids[static_cast<std::size_t>(best_c)])] = false;
    is_medoid[static_cast<std::size_t>(best_h)] = true;
    r.medoids[static_cast<std::size_t>(best_c)] = best_h;
    cost = assign(who, d1, d2);
    r.cost.push_back(cost);
  }
  r.labeling = {std::move(who), k};
  return r;
}

inline Labeling pam(const FeatureMatrix& x, int k, int max_iter = 100) { return pam_detailed(x, k, max_iter).labeling; }

}  // namespace cortree
