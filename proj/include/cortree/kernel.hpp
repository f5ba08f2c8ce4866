#pragma once

// Correlated-tree kernel: a multivariate normal head over the first L layers
// of splitting variables and independent normals on the deeper tail, with
// Polya-Gamma augmented full conditionals for per-sample split vectors and
// conjugate updates for the per-cluster parameters.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "error.hpp"
#include "ghs.hpp"
#include "polya_gamma.hpp"
#include "random.hpp"
#include "tree.hpp"

namespace cortree {

struct KernelHyper {
  double alpha0 = 1.0;           // InvGamma shape of tail variances
  double sigma2_mu_head = 1.0;   // prior variance of head means
  double sigma2_mu_tail = 0.1;   // prior variance of tail means
  bool mu_layer_decay = false;   // divide the mean prior variance by the layer index
  // proper diagonal prior: with the flat one a singleton cluster's precision diverges
  GhsPrior ghs{1.0, 1.0};
  int ghs_sweeps = 1;

  double mu_prior_variance(std::size_t k, bool head) const {
    const double base = head ? sigma2_mu_head : sigma2_mu_tail;
    return mu_layer_decay ? base / split_layer(k) : base;
  }
  /// InvGamma rate of the variance prior at split index k: 1 / layer.
  static double sigma2_prior_rate(std::size_t k) { return 1.0 / split_layer(k); }
};

struct ClusterParams {
  Eigen::VectorXd mu_head;
  Eigen::VectorXd mu_tail;
  Eigen::VectorXd sigma2_tail;
  std::optional<GhsState> ghs;  // correlated head precision
  Eigen::VectorXd sigma2_head;  // diagonal head variances when the head is independent

  bool correlated() const { return ghs.has_value(); }
};

inline ClusterParams make_cluster_params(const SplitPartition& part, bool correlated) {
  const auto q = static_cast<Eigen::Index>(part.head_size());
  const auto t = static_cast<Eigen::Index>(part.tail_size());
  ClusterParams c;
  c.mu_head = Eigen::VectorXd::Zero(q);
  c.mu_tail = Eigen::VectorXd::Zero(t);
  c.sigma2_tail = Eigen::VectorXd::Ones(t);
  if (correlated)
    c.ghs = GhsState::identity(static_cast<int>(q));
  else
    c.sigma2_head = Eigen::VectorXd::Ones(q);
  return c;
}

/// One sample's split vector with its augmentation state. `trials` is the
/// parent count of each split, zeroed on nodes without two non-empty children.
struct AugmentedSample {
  SplitVector psi;
  Eigen::VectorXd omega;
  Eigen::VectorXd kappa;
  std::vector<std::int64_t> trials;
};

inline AugmentedSample make_augmented_sample(const TreeCounts& counts, const DyadicLayout& layout) {
  validate_counts(counts, layout);
  const std::size_t m = layout.internal_count();
  AugmentedSample s;
  s.psi = SplitVector::Zero(static_cast<Eigen::Index>(m));
  s.omega = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  s.kappa = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  s.trials.assign(m, 0);
  for (std::size_t k = 0; k < m; ++k) {
    if (!layout.splittable(k)) continue;
    const auto n = counts.node[k];
    const auto left = counts.node[2 * k + 1];
    s.trials[k] = n;
    s.kappa[static_cast<Eigen::Index>(k)] = static_cast<double>(left) - static_cast<double>(n) / 2.0;
    // smoothed empirical logit as a starting value
    s.psi[static_cast<Eigen::Index>(k)] = logit((static_cast<double>(left) + 0.5) / (static_cast<double>(n) + 1.0));
  }
  return s;
}

inline void sample_omega(AugmentedSample& s, Rng& rng) {
  for (Eigen::Index k = 0; k < s.psi.size(); ++k)
    s.omega[k] = sample_pg(s.trials[static_cast<std::size_t>(k)], s.psi[k], rng).value;
}

/// Draw x ~ N(P^{-1} b, P^{-1}) through the Cholesky factor of P.
inline Eigen::VectorXd sample_gaussian_canonical(const Eigen::MatrixXd& precision, const Eigen::VectorXd& linear,
                                                 Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> chol(precision);
  if (chol.info() != Eigen::Success) throw internal_error("conditional precision is not positive definite");
  Eigen::VectorXd z(linear.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = std_normal(rng);
  return chol.solve(linear) + chol.matrixU().solve(z);
}

namespace detail {

inline double scalar_gaussian(double prior_prec, double prior_mean, double omega, double kappa, Rng& rng) {
  const double prec = prior_prec + omega;
  const double mean = (prior_prec * prior_mean + kappa) / prec;
  return mean + std_normal(rng) / std::sqrt(prec);
}

}  // namespace detail

inline void update_psi_head(AugmentedSample& s, const ClusterParams& c, Rng& rng) {
  const Eigen::Index q = c.mu_head.size();
  if (c.correlated()) {
    const Eigen::MatrixXd& om = c.ghs->omega;
    Eigen::MatrixXd prec = om;
    prec.diagonal() += s.omega.head(q);
    const Eigen::VectorXd lin = om * c.mu_head + s.kappa.head(q);
    s.psi.head(q) = sample_gaussian_canonical(prec, lin, rng);
  } else {
    for (Eigen::Index k = 0; k < q; ++k)
      s.psi[k] = detail::scalar_gaussian(1.0 / c.sigma2_head[k], c.mu_head[k], s.omega[k], s.kappa[k], rng);
  }
}

inline void update_psi_tail(AugmentedSample& s, const ClusterParams& c, Rng& rng) {
  const Eigen::Index q = c.mu_head.size();
  for (Eigen::Index j = 0; j < c.mu_tail.size(); ++j)
    s.psi[q + j] = detail::scalar_gaussian(1.0 / c.sigma2_tail[j], c.mu_tail[j], s.omega[q + j], s.kappa[q + j], rng);
}

using MemberView = std::span<const SplitVector* const>;

inline void update_mu(MemberView members, ClusterParams& c, const KernelHyper& h, Rng& rng) {
  const Eigen::Index q = c.mu_head.size();
  const Eigen::Index t = c.mu_tail.size();
  const double n = static_cast<double>(members.size());
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(q + t);
  for (const SplitVector* psi : members) sum += *psi;

  Eigen::MatrixXd prec = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd lin;
  if (c.correlated()) {
    prec = n * c.ghs->omega;
    lin = c.ghs->omega * sum.head(q);
  } else {
    prec.diagonal() = n * c.sigma2_head.cwiseInverse();
    lin = sum.head(q).cwiseQuotient(c.sigma2_head);
  }
  for (Eigen::Index k = 0; k < q; ++k) prec(k, k) += 1.0 / h.mu_prior_variance(static_cast<std::size_t>(k), true);
  c.mu_head = sample_gaussian_canonical(prec, lin, rng);

  for (Eigen::Index j = 0; j < t; ++j) {
    const double prior_prec = 1.0 / h.mu_prior_variance(static_cast<std::size_t>(q + j), false);
    const double p = prior_prec + n / c.sigma2_tail[j];
    const double m = (sum[q + j] / c.sigma2_tail[j]) / p;
    c.mu_tail[j] = m + std_normal(rng) / std::sqrt(p);
  }
}

namespace detail {

inline void update_diag_variances(MemberView members, const Eigen::VectorXd& mu, Eigen::Index offset,
                                  Eigen::VectorXd& sigma2, double alpha0, Rng& rng) {
  const double n = static_cast<double>(members.size());
  for (Eigen::Index j = 0; j < sigma2.size(); ++j) {
    double ss = 0.0;
    for (const SplitVector* psi : members) {
      const double d = (*psi)[offset + j] - mu[j];
      ss += d * d;
    }
    const double rate = KernelHyper::sigma2_prior_rate(static_cast<std::size_t>(offset + j)) + ss / 2.0;
    sigma2[j] = inv_gamma(rng, alpha0 + n / 2.0, rate);
  }
}

}  // namespace detail

inline void update_sigma2_tail(MemberView members, ClusterParams& c, const KernelHyper& h, Rng& rng) {
  detail::update_diag_variances(members, c.mu_tail, c.mu_head.size(), c.sigma2_tail, h.alpha0, rng);
}

/// Independent-head variant: head variances updated exactly like the tail.
inline void update_sigma2_head(MemberView members, ClusterParams& c, const KernelHyper& h, Rng& rng) {
  if (c.correlated()) throw internal_error("diagonal head update on a correlated cluster");
  detail::update_diag_variances(members, c.mu_head, 0, c.sigma2_head, h.alpha0, rng);
}

inline Eigen::MatrixXd head_scatter(MemberView members, const Eigen::VectorXd& mu_head) {
  const Eigen::Index q = mu_head.size();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(q, q);
  for (const SplitVector* psi : members) {
    const Eigen::VectorXd d = psi->head(q) - mu_head;
    s.selfadjointView<Eigen::Lower>().rankUpdate(d);
  }
  return s.selfadjointView<Eigen::Lower>();
}

inline void update_head_precision(MemberView members, ClusterParams& c, const KernelHyper& h, Rng& rng) {
  if (!c.correlated()) throw internal_error("precision update on an independent cluster");
  const Eigen::MatrixXd s = head_scatter(members, c.mu_head);
  for (int sweep = 0; sweep < h.ghs_sweeps; ++sweep)
    ghs_sweep(*c.ghs, s, static_cast<double>(members.size()), rng, h.ghs);
}

/// Normal prior density of a split vector under one cluster, with the head
/// factorization cached so repeated evaluation is cheap.
class ClusterDensity {
 public:
  explicit ClusterDensity(const ClusterParams& c) : mu_head_(c.mu_head), mu_tail_(c.mu_tail) {
    const Eigen::Index q = c.mu_head.size();
    constexpr double log2pi = 1.8378770664093454836;
    if (c.correlated()) {
      llt_.compute(c.ghs->omega);
      if (llt_.info() != Eigen::Success) throw internal_error("cluster precision is not positive definite");
      upper_ = llt_.matrixU();
      double logdet = 0.0;
      for (Eigen::Index i = 0; i < q; ++i) logdet += 2.0 * std::log(upper_(i, i));
      constant_ = 0.5 * logdet - 0.5 * static_cast<double>(q) * log2pi;
    } else {
      head_prec_ = c.sigma2_head.cwiseInverse();
      constant_ = -0.5 * static_cast<double>(q) * log2pi + 0.5 * head_prec_.array().log().sum();
    }
    tail_prec_ = c.sigma2_tail.cwiseInverse();
    constant_ += -0.5 * static_cast<double>(c.mu_tail.size()) * log2pi + 0.5 * tail_prec_.array().log().sum();
  }

  double operator()(const SplitVector& psi) const {
    const Eigen::Index q = mu_head_.size();
    double quad;
    if (head_prec_.size() == 0) {
      // (x - mu)' U'U (x - mu)
      quad = (upper_.triangularView<Eigen::Upper>() * (psi.head(q) - mu_head_)).squaredNorm();
    } else {
      quad = ((psi.head(q) - mu_head_).array().square() * head_prec_.array()).sum();
    }
    quad += ((psi.tail(mu_tail_.size()) - mu_tail_).array().square() * tail_prec_.array()).sum();
    return constant_ - 0.5 * quad;
  }

 private:
  Eigen::VectorXd mu_head_, mu_tail_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd upper_;
  Eigen::VectorXd head_prec_, tail_prec_;
  double constant_ = 0.0;
};

inline double log_density_psi(const SplitVector& psi, const ClusterParams& c) {
  if (psi.size() != c.mu_head.size() + c.mu_tail.size()) throw input_error("split vector length mismatch");
  return ClusterDensity(c)(psi);
}

}  // namespace cortree
