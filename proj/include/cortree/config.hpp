#pragma once

#include <cstdint>
#include <string>

#include "error.hpp"
#include "kernel.hpp"
#include "tree.hpp"

namespace cortree {

struct RunConfig {
  int depth = 0;  // 0 selects ceil(log2 bins)
  int cor_layers = 4;
  int clusters = 3;
  int burn_in = 100;
  int n_keep = 50;
  KernelHyper hyper;
  double alpha = 1.0;  // DP concentration, held fixed
  bool ind_tree = false;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string init = "pam";  // pam | kmeans | file:<path> | discretize:<path>
  int report_min_size = 10;
  bool trace_psi = false;
  bool raw_features = false;  // baselines/initializers on raw counts instead of proportions

  int resolved_depth(std::size_t bins) const { return depth > 0 ? depth : min_depth(bins); }

  void validate() const {
    if (clusters < 1) throw config_error("number of clusters must be at least 1");
    if (burn_in < 0) throw config_error("burn-in must be non-negative");
    if (n_keep < 1) throw config_error("need at least one kept iteration");
    if (depth < 0 || depth > kMaxDepth) throw config_error("depth out of range");
    if (cor_layers < 1) throw config_error("need at least one correlated layer");
    if (depth > 0 && cor_layers > depth) throw config_error("correlated layers exceed tree depth");
    if (!(alpha > 0.0)) throw config_error("concentration must be positive");
    if (!(hyper.alpha0 > 0.0)) throw config_error("alpha0 must be positive");
    if (!(hyper.sigma2_mu_head > 0.0) || !(hyper.sigma2_mu_tail > 0.0))
      throw config_error("mean prior variances must be positive");
    if (hyper.ghs_sweeps < 1) throw config_error("need at least one GHS sweep per iteration");
    if (threads < 1) throw config_error("threads must be at least 1");
    if (report_min_size < 0) throw config_error("report_min_size must be non-negative");
  }
};

}  // namespace cortree
