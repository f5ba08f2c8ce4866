#pragma once

// End-to-end clustering of a count matrix: initial labels, layout, sampler.

#include <algorithm>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "config.hpp"
#include "count_matrix.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "mixture.hpp"
#include "tree.hpp"

namespace cortree {

/// Layout for fitting: single-bin leaves when depth allows, coarse leaves otherwise.
inline DyadicLayout fitting_layout(std::size_t bins, const RunConfig& cfg) {
  return build_coarse_layout(bins, cfg.resolved_depth(bins));
}

inline std::vector<int> initial_labels(const CountMatrix& counts, const RunConfig& cfg) {
  const int k = std::min<int>(cfg.clusters, static_cast<int>(counts.rows));
  const std::string& init = cfg.init;
  if (init == "pam" || init == "kmeans") {
    const FeatureMatrix x = make_features(counts.data, counts.rows, counts.cols, !cfg.raw_features);
    if (init == "pam") return pam(x, k).labels;
    Rng rng = make_substream(cfg.seed, 0, 5);
    return kmeans(x, k, rng).labels;
  }
  if (init.rfind("file:", 0) == 0) {
    auto labels = io::read_labels(init.substr(5));
    if (labels.size() != counts.rows)
      throw config_error("initial label file has " + std::to_string(labels.size()) + " rows, counts have " +
                         std::to_string(counts.rows));
    return labels;
  }
  if (init.rfind("discretize:", 0) == 0) {
    const auto scores = io::read_scores(init.substr(11));
    if (scores.size() != counts.rows)
      throw config_error("score file has " + std::to_string(scores.size()) + " rows, counts have " +
                         std::to_string(counts.rows));
    if (cfg.clusters < 2) return std::vector<int>(counts.rows, 0);
    return discretize_scores(scores, cfg.clusters);
  }
  throw config_error("unknown init '" + init + "' (expected pam, kmeans, file:<path> or discretize:<path>)");
}

struct PipelineResult {
  DyadicLayout layout;
  std::vector<int> init;
  FitResult fit;
};

inline PipelineResult run_pipeline(const CountMatrix& counts, const RunConfig& cfg) {
  cfg.validate();
  if (counts.rows == 0) throw input_error("no samples");
  PipelineResult r;
  r.layout = fitting_layout(counts.cols, cfg);
  if (cfg.cor_layers > r.layout.depth())
    throw config_error("correlated layers (" + std::to_string(cfg.cor_layers) + ") exceed tree depth (" +
                       std::to_string(r.layout.depth()) + ")");
  r.init = initial_labels(counts, cfg);
  r.fit = fit(to_tree_counts(counts, r.layout), r.layout, r.init, cfg);
  return r;
}

}  // namespace cortree
