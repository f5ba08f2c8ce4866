#pragma once

// Truncated stick-breaking mixture of correlated-tree kernels and its blocked
// Gibbs sampler.
//
// Each iteration runs, in order: per-sample PG auxiliaries and split vectors,
// per-cluster means, tail variances, head precision (GHS sweep, or diagonal
// variances for the independent-head variant), assignments, weights.
// Every sample and every cluster owns a random stream derived from the seed,
// so results do not depend on the thread count.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "kernel.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "tree.hpp"

namespace cortree {

struct MixtureState {
  std::vector<int> z;
  std::vector<double> pi;
  std::vector<double> sticks;  // K - 1 stick proportions
  double alpha = 1.0;
  std::vector<ClusterParams> clusters;
  std::vector<AugmentedSample> samples;

  std::vector<int> cluster_sizes() const {
    std::vector<int> n(clusters.size(), 0);
    for (int k : z) ++n[static_cast<std::size_t>(k)];
    return n;
  }

  std::vector<std::vector<const SplitVector*>> members() const {
    std::vector<std::vector<const SplitVector*>> out(clusters.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[static_cast<std::size_t>(z[i])].push_back(&samples[i].psi);
    return out;
  }
};

struct GibbsTrace {
  std::vector<std::vector<double>> pi;             // every iteration
  std::vector<std::vector<int>> z;                 // kept iterations
  std::vector<std::vector<SplitVector>> psi;       // kept iterations, opt-in
};

/// Normalized P(Z = k | psi) proportional to pi_k N(psi; cluster k).
inline std::vector<double> assignment_probabilities(const SplitVector& psi, std::span<const ClusterDensity> densities,
                                                    std::span<const double> pi) {
  const std::size_t K = densities.size();
  std::vector<double> w(K);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    w[k] = pi[k] > 0.0 ? std::log(pi[k]) + densities[k](psi) : -std::numeric_limits<double>::infinity();
    top = std::max(top, w[k]);
  }
  if (!std::isfinite(top)) throw internal_error("all assignment weights are zero");
  double total = 0.0;
  for (auto& v : w) total += (v = std::exp(v - top));
  for (auto& v : w) v /= total;
  return w;
}

inline int sample_categorical(std::span<const double> prob, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < prob.size(); ++k) {
    acc += prob[k];
    if (u < acc) return static_cast<int>(k);
  }
  // rounding left u beyond the accumulated mass: take the last positive entry
  for (std::size_t k = prob.size(); k-- > 0;)
    if (prob[k] > 0.0) return static_cast<int>(k);
  return 0;
}

/// Assignment update with one stream per sample (rngs.size() == n).
inline void update_assignments(MixtureState& st, std::span<Rng> rngs, int threads = 1) {
  if (rngs.size() != st.samples.size()) throw internal_error("one random stream per sample required");
  std::vector<ClusterDensity> dens;
  dens.reserve(st.clusters.size());
  for (const auto& c : st.clusters) dens.emplace_back(c);
  parallel_for(st.samples.size(), threads, [&](std::size_t i) {
    const auto p = assignment_probabilities(st.samples[i].psi, dens, st.pi);
    st.z[i] = sample_categorical(p, rngs[i]);
  });
}

/// Assignment update drawing every sample from one stream.
inline void update_assignments(MixtureState& st, Rng& rng) {
  std::vector<ClusterDensity> dens;
  dens.reserve(st.clusters.size());
  for (const auto& c : st.clusters) dens.emplace_back(c);
  for (std::size_t i = 0; i < st.samples.size(); ++i) {
    const auto p = assignment_probabilities(st.samples[i].psi, dens, st.pi);
    st.z[i] = sample_categorical(p, rng);
  }
}

struct StickWeights {
  std::vector<double> sticks;
  std::vector<double> pi;
};

/// V_k | Z ~ Beta(1 + n_k, alpha + sum_{l>k} n_l) via two gammas; the last
/// cluster takes the remaining stick so the weights sum to one.
inline StickWeights sample_stick_weights(std::span<const int> sizes, double alpha, Rng& rng) {
  const std::size_t K = sizes.size();
  StickWeights w;
  w.sticks.resize(K > 0 ? K - 1 : 0);
  w.pi.resize(K);
  double after = 0.0;
  std::vector<double> tail_count(K, 0.0);
  for (std::size_t k = K; k-- > 0;) {
    tail_count[k] = after;
    after += sizes[k];
  }
  double remaining = 1.0;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const double g1 = gamma_rate(rng, 1.0 + sizes[k], 1.0);
    const double g2 = gamma_rate(rng, alpha + tail_count[k], 1.0);
    w.sticks[k] = g1 / (g1 + g2);
    w.pi[k] = remaining * w.sticks[k];
    remaining *= 1.0 - w.sticks[k];
  }
  if (K > 0) w.pi[K - 1] = remaining;
  return w;
}

inline void update_pi(MixtureState& st, Rng& rng) {
  const auto sizes = st.cluster_sizes();
  auto w = sample_stick_weights(sizes, st.alpha, rng);
  st.sticks = std::move(w.sticks);
  st.pi = std::move(w.pi);
}

inline SplitVector cluster_mean_vector(const ClusterParams& c) {
  SplitVector v(c.mu_head.size() + c.mu_tail.size());
  v << c.mu_head, c.mu_tail;
  return v;
}

class GibbsSampler {
 public:
  GibbsSampler(const std::vector<TreeCounts>& counts, DyadicLayout layout, const RunConfig& config,
               std::span<const int> init_labels)
      : layout_(std::move(layout)), config_(config) {
    config_.validate();
    partition_ = SplitPartition(layout_.depth(), config_.cor_layers);
    const std::size_t n = counts.size();
    if (init_labels.size() != n)
      throw config_error("initial labels (" + std::to_string(init_labels.size()) + ") do not match samples (" +
                         std::to_string(n) + ")");
    const auto K = static_cast<std::size_t>(config_.clusters);
    for (int z : init_labels)
      if (z < 0 || static_cast<std::size_t>(z) >= K)
        throw config_error("initial label " + std::to_string(z) + " outside [0, " + std::to_string(K) + ")");

    state_.alpha = config_.alpha;
    state_.z.assign(init_labels.begin(), init_labels.end());
    state_.samples.reserve(n);
    for (const auto& c : counts) state_.samples.push_back(make_augmented_sample(c, layout_));
    state_.clusters.assign(K, make_cluster_params(partition_, !config_.ind_tree));

    sample_rngs_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) sample_rngs_.push_back(make_substream(config_.seed, i, 1));
    cluster_rngs_.reserve(K);
    for (std::size_t k = 0; k < K; ++k) cluster_rngs_.push_back(make_substream(config_.seed, k, 2));
    master_rng_ = make_substream(config_.seed, 0, 3);

    update_clusters();
    update_pi(state_, master_rng_);
  }

  void iterate() {
    parallel_for(state_.samples.size(), config_.threads, [&](std::size_t i) {
      AugmentedSample& s = state_.samples[i];
      const ClusterParams& c = state_.clusters[static_cast<std::size_t>(state_.z[i])];
      sample_omega(s, sample_rngs_[i]);
      update_psi_head(s, c, sample_rngs_[i]);
      update_psi_tail(s, c, sample_rngs_[i]);
    });
    update_clusters();
    update_assignments(state_, sample_rngs_, config_.threads);
    update_pi(state_, master_rng_);
  }

  const MixtureState& state() const { return state_; }
  MixtureState& state() { return state_; }
  const DyadicLayout& layout() const { return layout_; }
  const SplitPartition& partition() const { return partition_; }

 private:
  void update_clusters() {
    const auto members = state_.members();
    parallel_for(state_.clusters.size(), config_.threads, [&](std::size_t k) {
      ClusterParams& c = state_.clusters[k];
      Rng& rng = cluster_rngs_[k];
      update_mu(members[k], c, config_.hyper, rng);
      update_sigma2_tail(members[k], c, config_.hyper, rng);
      if (c.correlated())
        update_head_precision(members[k], c, config_.hyper, rng);
      else
        update_sigma2_head(members[k], c, config_.hyper, rng);
    });
  }

  DyadicLayout layout_;
  RunConfig config_;
  SplitPartition partition_;
  MixtureState state_;
  std::vector<Rng> sample_rngs_;
  std::vector<Rng> cluster_rngs_;
  Rng master_rng_;
};

/// One full Gibbs sweep; thin wrapper kept for symmetry with the other updates.
inline void gibbs_iteration(GibbsSampler& sampler) { sampler.iterate(); }

struct FitResult {
  GibbsTrace trace;
  std::vector<int> labels;           // per-sample majority vote over kept iterations
  std::vector<int> sizes;            // cluster sizes under `labels`
  std::vector<bool> reportable;      // size >= report_min_size
  std::vector<std::vector<double>> cluster_density;  // K x bins, posterior mean of mu-implied densities
  int occupied = 0;
  int reported = 0;
};

inline std::vector<int> majority_labels(const std::vector<std::vector<int>>& draws, int K) {
  if (draws.empty()) return {};
  const std::size_t n = draws.front().size();
  std::vector<int> out(n, 0);
  std::vector<int> votes(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& z : draws) ++votes[static_cast<std::size_t>(z[i])];
    out[i] = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  return out;
}

inline FitResult fit(const std::vector<TreeCounts>& counts, const DyadicLayout& layout,
                     std::span<const int> init_labels, const RunConfig& config) {
  config.validate();
  if (counts.empty()) throw input_error("no samples to fit");
  GibbsSampler sampler(counts, layout, config, init_labels);
  FitResult r;
  const int total = config.burn_in + config.n_keep;
  const auto K = static_cast<std::size_t>(config.clusters);
  std::vector<std::vector<double>> density_sum(K, std::vector<double>(layout.bins(), 0.0));
  for (int it = 0; it < total; ++it) {
    sampler.iterate();
    const MixtureState& st = sampler.state();
    r.trace.pi.push_back(st.pi);
    if (it < config.burn_in) continue;
    r.trace.z.push_back(st.z);
    if (config.trace_psi) {
      std::vector<SplitVector> snap;
      snap.reserve(st.samples.size());
      for (const auto& s : st.samples) snap.push_back(s.psi);
      r.trace.psi.push_back(std::move(snap));
    }
    for (std::size_t k = 0; k < K; ++k) {
      const auto bins = bin_probabilities(cluster_mean_vector(st.clusters[k]), layout);
      for (std::size_t b = 0; b < bins.size(); ++b) density_sum[k][b] += bins[b];
    }
  }
  r.labels = majority_labels(r.trace.z, config.clusters);
  r.sizes.assign(K, 0);
  for (int z : r.labels) ++r.sizes[static_cast<std::size_t>(z)];
  r.reportable.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    r.reportable[k] = r.sizes[k] >= config.report_min_size && r.sizes[k] > 0;
    if (r.sizes[k] > 0) ++r.occupied;
    if (r.reportable[k]) ++r.reported;
  }
  // bin probabilities scaled to a density on [0, 1] with equal-width bins
  const double scale = static_cast<double>(layout.bins()) / config.n_keep;
  r.cluster_density = std::move(density_sum);
  for (auto& row : r.cluster_density)
    for (auto& v : row) v *= scale;
  return r;
}

}  // namespace cortree
