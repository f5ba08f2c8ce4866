#pragma once

// Joint-distribution (Geweke) check of the split-vector updates: marginal
// moments of psi from forward simulation (prior, then counts) must match the
// successive-conditional chain (omega, psi, then fresh counts given psi).

#include <cmath>
#include <random>
#include <vector>

#include "cortree/kernel.hpp"
#include "stats_util.hpp"

namespace testing_util {

struct GewekeMoment {
  double forward_mean = 0.0;
  double chain_mean = 0.0;
  double se = 0.0;  // standard error of the difference

  double z() const { return se > 0.0 ? (forward_mean - chain_mean) / se : 0.0; }
};

struct GewekeResult {
  std::vector<GewekeMoment> mean;    // E[psi_k]
  std::vector<GewekeMoment> square;  // E[psi_k^2]

  double max_abs_z() const {
    double z = 0.0;
    for (const auto& m : mean) z = std::max(z, std::abs(m.z()));
    for (const auto& m : square) z = std::max(z, std::abs(m.z()));
    return z;
  }
};

inline cortree::TreeCounts draw_counts(const cortree::SplitVector& psi, const cortree::DyadicLayout& layout,
                                       std::int64_t m, cortree::Rng& rng) {
  cortree::TreeCounts c;
  c.node.assign(layout.node_count(), 0);
  c.node[0] = m;
  for (std::size_t k = 0; k < layout.internal_count(); ++k) {
    const std::int64_t n = c.node[k];
    std::int64_t left = n;
    if (layout.splittable(k) && n > 0)
      left = std::binomial_distribution<std::int64_t>(n, cortree::sigmoid(psi[static_cast<Eigen::Index>(k)]))(rng);
    c.node[2 * k + 1] = left;
    c.node[2 * k + 2] = n - left;
  }
  return c;
}

inline cortree::SplitVector draw_prior(const cortree::ClusterParams& c, cortree::Rng& rng) {
  const Eigen::Index q = c.mu_head.size();
  cortree::SplitVector psi(q + c.mu_tail.size());
  const Eigen::MatrixXd cov = c.ghs->sigma;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  Eigen::VectorXd z(q);
  for (Eigen::Index i = 0; i < q; ++i) z[i] = cortree::std_normal(rng);
  psi.head(q) = c.mu_head + llt.matrixL() * z;
  for (Eigen::Index j = 0; j < c.mu_tail.size(); ++j)
    psi[q + j] = c.mu_tail[j] + std::sqrt(c.sigma2_tail[j]) * cortree::std_normal(rng);
  return psi;
}

/// Depth-2 tree over four bins: one correlated head node (the root) and two
/// tail nodes, fixed cluster parameters, one sample of `m` counts.
inline GewekeResult run_geweke(int draws, std::int64_t m, std::uint64_t seed) {
  using namespace cortree;
  const DyadicLayout layout = build_layout(4, 2);
  const SplitPartition part(2, 1);
  ClusterParams c = make_cluster_params(part, true);
  c.mu_head << 0.4;
  c.ghs->omega << 2.0;
  c.ghs->sigma << 0.5;
  c.mu_tail << -0.3, 0.6;
  c.sigma2_tail << 0.8, 1.5;
  const auto dim = static_cast<std::size_t>(part.size());

  Rng fwd_rng = make_substream(seed, 0, 11);
  Rng chain_rng = make_substream(seed, 1, 11);

  std::vector<std::vector<double>> fwd(dim), chain(dim);
  for (int d = 0; d < draws; ++d) {
    const SplitVector psi = draw_prior(c, fwd_rng);
    (void)draw_counts(psi, layout, m, fwd_rng);
    for (std::size_t k = 0; k < dim; ++k) fwd[k].push_back(psi[static_cast<Eigen::Index>(k)]);
  }

  SplitVector psi = draw_prior(c, chain_rng);
  AugmentedSample s = make_augmented_sample(draw_counts(psi, layout, m, chain_rng), layout);
  s.psi = psi;
  for (int d = 0; d < draws; ++d) {
    sample_omega(s, chain_rng);
    update_psi_head(s, c, chain_rng);
    update_psi_tail(s, c, chain_rng);
    // fresh data given psi; the augmentation rebuilds kappa and trials
    const SplitVector keep = s.psi;
    s = make_augmented_sample(draw_counts(keep, layout, m, chain_rng), layout);
    s.psi = keep;
    for (std::size_t k = 0; k < dim; ++k) chain[k].push_back(keep[static_cast<Eigen::Index>(k)]);
  }

  GewekeResult r;
  for (std::size_t k = 0; k < dim; ++k) {
    for (int power : {1, 2}) {
      std::vector<double> f(fwd[k]), g(chain[k]);
      if (power == 2) {
        for (auto& v : f) v *= v;
        for (auto& v : g) v *= v;
      }
      const auto fs = summarize(static_cast<int>(f.size()), [&, i = std::size_t{0}]() mutable { return f[i++]; });
      const auto gs = summarize(static_cast<int>(g.size()), [&, i = std::size_t{0}]() mutable { return g[i++]; });
      const double se_f = std::sqrt(fs.variance / static_cast<double>(f.size()));
      const double se_g = batch_means_se(g);
      GewekeMoment mom{fs.mean, gs.mean, std::sqrt(se_f * se_f + se_g * se_g)};
      (power == 1 ? r.mean : r.square).push_back(mom);
    }
  }
  return r;
}

}  // namespace testing_util
