#pragma once

// Dyadic partition of histogram bins and the binomial tree likelihood.
//
// Nodes are stored in heap order: node (layer l, position j) lives at index
// 2^l - 1 + j, its children at 2i+1 and 2i+2. A tree of depth D has
// 2^(D+1) - 1 nodes, 2^D leaves and 2^D - 1 internal nodes. Internal node k
// carries one splitting variable psi[k] = logit P(left child | node k), so a
// split vector is ordered top to bottom, left to right.

#include <Eigen/Dense>

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace cortree {

inline constexpr int kMaxDepth = 24;

struct NodePath {
  int layer = 0;
  std::int64_t position = 0;

  static NodePath root() { return {}; }
  static NodePath from_index(std::size_t index) {
    int layer = 0;
    while ((std::size_t{2} << layer) - 1 <= index) ++layer;
    return {layer, static_cast<std::int64_t>(index - ((std::size_t{1} << layer) - 1))};
  }

  std::size_t index() const { return (std::size_t{1} << layer) - 1 + static_cast<std::size_t>(position); }
  NodePath left() const { return {layer + 1, 2 * position}; }
  NodePath right() const { return {layer + 1, 2 * position + 1}; }
  NodePath parent() const { return {layer - 1, position / 2}; }

  /// The binary string e_1...e_l identifying the node ("" for the root).
  std::string bits() const {
    std::string s(static_cast<std::size_t>(layer), '0');
    for (int b = 0; b < layer; ++b)
      if ((position >> (layer - 1 - b)) & 1) s[static_cast<std::size_t>(b)] = '1';
    return s;
  }

  friend auto operator<=>(const NodePath&, const NodePath&) = default;
};

struct BinRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  friend bool operator==(const BinRange&, const BinRange&) = default;
};

/// ceil(log2 p): the smallest depth whose leaves hold at most one bin.
inline int min_depth(std::size_t bins) {
  int d = 0;
  while ((std::size_t{1} << d) < bins) ++d;
  return d;
}

class DyadicLayout {
 public:
  DyadicLayout() = default;

  DyadicLayout(std::size_t bins, int depth) : bins_(bins), depth_(depth) {
    if (bins < 1) throw config_error("layout needs at least one bin");
    if (depth < 0 || depth > kMaxDepth)
      throw config_error("tree depth must lie in [0, " + std::to_string(kMaxDepth) + "]");
    ranges_.resize(node_count());
    ranges_[0] = {0, bins};
    for (std::size_t k = 0; k < internal_count(); ++k) {
      const BinRange r = ranges_[k];
      const std::size_t mid = r.begin + (r.size() + 1) / 2;
      ranges_[2 * k + 1] = {r.begin, std::max(r.begin, std::min(mid, r.end))};
      ranges_[2 * k + 2] = {std::min(mid, r.end), r.end};
    }
  }

  std::size_t bins() const { return bins_; }
  int depth() const { return depth_; }
  std::size_t node_count() const { return (std::size_t{2} << depth_) - 1; }
  std::size_t internal_count() const { return (std::size_t{1} << depth_) - 1; }
  std::size_t leaf_count() const { return std::size_t{1} << depth_; }
  std::size_t first_leaf() const { return internal_count(); }

  const BinRange& range(std::size_t node) const { return ranges_[node]; }
  const BinRange& range(const NodePath& path) const { return ranges_[path.index()]; }
  const BinRange& leaf_range(std::size_t leaf) const { return ranges_[first_leaf() + leaf]; }

  /// Internal node k splits mass between two non-empty children. Nodes that
  /// fail this send everything left and carry no likelihood information.
  bool splittable(std::size_t k) const {
    return !ranges_[2 * k + 1].empty() && !ranges_[2 * k + 2].empty();
  }

  /// True when some leaf still spans more than one bin.
  bool coarse() const {
    for (std::size_t j = 0; j < leaf_count(); ++j)
      if (leaf_range(j).size() > 1) return true;
    return false;
  }

 private:
  std::size_t bins_ = 0;
  int depth_ = 0;
  std::vector<BinRange> ranges_;
};

/// Layout whose leaves resolve single bins; rejects depths below ceil(log2 p).
inline DyadicLayout build_layout(std::size_t bins, int depth) {
  if (bins < 1) throw config_error("layout needs at least one bin");
  if (depth < min_depth(bins))
    throw config_error("depth " + std::to_string(depth) + " cannot resolve " + std::to_string(bins) +
                       " bins; need at least " + std::to_string(min_depth(bins)));
  return DyadicLayout(bins, depth);
}

/// Layout that may stop above single-bin resolution; leaves then cover
/// contiguous blocks of bins.
inline DyadicLayout build_coarse_layout(std::size_t bins, int depth) { return DyadicLayout(bins, depth); }

/// Per-sample node counts in heap order.
struct TreeCounts {
  std::vector<std::int64_t> node;

  std::int64_t total() const { return node.empty() ? 0 : node[0]; }
  std::int64_t at(const NodePath& path) const { return node[path.index()]; }
};

inline void validate_counts(const TreeCounts& counts, const DyadicLayout& layout) {
  if (counts.node.size() != layout.node_count()) throw input_error("tree counts do not match layout size");
  for (std::size_t i = 0; i < counts.node.size(); ++i) {
    if (counts.node[i] < 0) throw input_error("negative node count");
    if (layout.range(i).empty() && counts.node[i] != 0) throw input_error("non-zero count on an empty node");
  }
  for (std::size_t k = 0; k < layout.internal_count(); ++k)
    if (counts.node[k] != counts.node[2 * k + 1] + counts.node[2 * k + 2])
      throw input_error("node counts are not additive at node " + NodePath::from_index(k).bits());
}

inline TreeCounts propagate_counts(std::span<const std::int64_t> hist, const DyadicLayout& layout) {
  if (hist.size() != layout.bins())
    throw input_error("histogram has " + std::to_string(hist.size()) + " bins, layout expects " +
                      std::to_string(layout.bins()));
  for (auto v : hist)
    if (v < 0) throw input_error("negative bin count");
  TreeCounts out;
  out.node.assign(layout.node_count(), 0);
  for (std::size_t j = 0; j < layout.leaf_count(); ++j) {
    const BinRange& r = layout.leaf_range(j);
    std::int64_t s = 0;
    for (std::size_t b = r.begin; b < r.end; ++b) s += hist[b];
    out.node[layout.first_leaf() + j] = s;
  }
  for (std::size_t k = layout.internal_count(); k-- > 0;) out.node[k] = out.node[2 * k + 1] + out.node[2 * k + 2];
  return out;
}

// ---------------------------------------------------------------------------
// Split vectors

using SplitVector = Eigen::VectorXd;

/// Layer (1-based) of the left child whose probability psi[k] controls.
inline int split_layer(std::size_t k) {
  int l = 0;
  while ((std::size_t{2} << l) - 1 <= k) ++l;
  return l + 1;
}

/// Head/tail partition of a split vector: the first `cor_layers` layers form
/// the correlated block of size 2^L - 1.
struct SplitPartition {
  int depth = 0;
  int cor_layers = 0;

  SplitPartition() = default;
  SplitPartition(int d, int l) : depth(d), cor_layers(l) {
    if (l < 1) throw config_error("need at least one correlated layer");
    if (l > d) throw config_error("correlated layers (" + std::to_string(l) + ") exceed tree depth (" +
                                  std::to_string(d) + ")");
  }

  std::size_t size() const { return (std::size_t{1} << depth) - 1; }
  std::size_t head_size() const { return (std::size_t{1} << cor_layers) - 1; }
  std::size_t tail_size() const { return size() - head_size(); }
};

/// Per-layer view of a split vector: layer l holds 2^l entries.
inline std::vector<std::vector<double>> devectorize(const SplitVector& psi, int depth) {
  if (static_cast<std::size_t>(psi.size()) != (std::size_t{1} << depth) - 1)
    throw input_error("split vector length does not match depth");
  std::vector<std::vector<double>> layers(static_cast<std::size_t>(depth));
  std::size_t k = 0;
  for (int l = 0; l < depth; ++l) {
    layers[l].resize(std::size_t{1} << l);
    for (auto& v : layers[l]) v = psi[static_cast<Eigen::Index>(k++)];
  }
  return layers;
}

inline SplitVector vectorize(const std::vector<std::vector<double>>& layers) {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].size() != (std::size_t{1} << l)) throw input_error("layer " + std::to_string(l) + " has wrong width");
    n += layers[l].size();
  }
  SplitVector psi(static_cast<Eigen::Index>(n));
  Eigen::Index k = 0;
  for (const auto& layer : layers)
    for (double v : layer) psi[k++] = v;
  return psi;
}

// ---------------------------------------------------------------------------
// Probabilities and likelihood

inline std::vector<double> leaf_probabilities(const SplitVector& psi, const DyadicLayout& layout) {
  if (static_cast<std::size_t>(psi.size()) != layout.internal_count())
    throw input_error("split vector length does not match layout");
  std::vector<double> mass(layout.node_count(), 0.0);
  mass[0] = 1.0;
  for (std::size_t k = 0; k < layout.internal_count(); ++k) {
    if (mass[k] == 0.0) continue;
    if (!layout.splittable(k)) {
      // all mass follows the only non-empty child (left, by the split rule)
      mass[2 * k + 1] = layout.range(2 * k + 1).empty() ? 0.0 : mass[k];
      continue;
    }
    const double x = psi[static_cast<Eigen::Index>(k)];
    mass[2 * k + 1] = mass[k] * sigmoid(x);
    mass[2 * k + 2] = mass[k] * sigmoid(-x);
  }
  return {mass.begin() + static_cast<std::ptrdiff_t>(layout.first_leaf()), mass.end()};
}

/// Leaf probabilities spread uniformly over the bins each leaf covers.
inline std::vector<double> bin_probabilities(const SplitVector& psi, const DyadicLayout& layout) {
  const auto leaves = leaf_probabilities(psi, layout);
  std::vector<double> out(layout.bins(), 0.0);
  for (std::size_t j = 0; j < leaves.size(); ++j) {
    const BinRange& r = layout.leaf_range(j);
    for (std::size_t b = r.begin; b < r.end; ++b) out[b] = leaves[j] / static_cast<double>(r.size());
  }
  return out;
}

inline double log_binomial_coefficient(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

/// Sum over splittable internal nodes of log Bin(n(e0) | n(e), sigmoid(psi_e0)).
inline double tree_log_likelihood(const TreeCounts& counts, const SplitVector& psi, const DyadicLayout& layout) {
  validate_counts(counts, layout);
  if (static_cast<std::size_t>(psi.size()) != layout.internal_count())
    throw input_error("split vector length does not match layout");
  double ll = 0.0;
  for (std::size_t k = 0; k < layout.internal_count(); ++k) {
    const std::int64_t n = counts.node[k];
    if (n == 0 || !layout.splittable(k)) continue;
    const std::int64_t left = counts.node[2 * k + 1];
    const double x = psi[static_cast<Eigen::Index>(k)];
    ll += log_binomial_coefficient(n, left) + static_cast<double>(left) * log_sigmoid(x) +
          static_cast<double>(n - left) * log_sigmoid(-x);
  }
  return ll;
}

}  // namespace cortree
