#pragma once

// Graphical horseshoe: column-wise Gibbs sweep for a precision matrix with
// horseshoe priors on its off-diagonal entries,
//   omega_ij ~ N(0, lambda2_ij * tau2), lambda_ij, tau ~ C+(0, 1),
// using the inverse-gamma auxiliary representation of the half-Cauchy scales.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace cortree {

struct GhsState {
  Eigen::MatrixXd omega;
  Eigen::MatrixXd sigma;    // inverse of omega
  Eigen::MatrixXd lambda2;  // local scales, off-diagonal entries used
  Eigen::MatrixXd nu;       // auxiliaries of lambda2
  double tau2 = 1.0;        // global scale (not the tail-parameter set of the tree prior)
  double xi = 1.0;          // auxiliary of tau2

  static GhsState identity(int q) {
    GhsState s;
    s.omega = Eigen::MatrixXd::Identity(q, q);
    s.sigma = Eigen::MatrixXd::Identity(q, q);
    s.lambda2 = Eigen::MatrixXd::Ones(q, q);
    s.nu = Eigen::MatrixXd::Ones(q, q);
    return s;
  }

  int dim() const { return static_cast<int>(omega.rows()); }
};

/// Prior on the diagonal: omega_jj has density proportional to
/// exp(-diag_rate * omega_jj / 2). diag_rate = 0 is the flat prior of the
/// plain graphical horseshoe. That prior is improper, so a cluster with no
/// members (n_k = 0) falls back to `empty_diag_rate`.
struct GhsPrior {
  double diag_rate = 0.0;
  double empty_diag_rate = 1.0;
};

struct GammaParams {
  double shape = 0.0;
  double rate = 0.0;
};

/// Gamma component of the column-j diagonal update: shape n/2 + 1, rate (s_jj + r)/2.
inline GammaParams ghs_diagonal_conditional(double n_k, double s_jj, double diag_rate) {
  return {n_k / 2.0 + 1.0, (s_jj + diag_rate) / 2.0};
}

inline void ghs_sweep(GhsState& st, const Eigen::MatrixXd& scatter, double n_k, Rng& rng,
                      const GhsPrior& prior = {}) {
  const int q = st.dim();
  if (scatter.rows() != q || scatter.cols() != q) throw input_error("scatter matrix has wrong shape");
  if (n_k < 0) throw input_error("member count must be non-negative");
  if (q > 0 && (scatter - scatter.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scatter.cwiseAbs().maxCoeff()))
    throw input_error("scatter matrix is not symmetric");

  double diag_rate = prior.diag_rate;
  if (n_k == 0 && diag_rate <= 0.0) diag_rate = prior.empty_diag_rate;

  std::vector<int> others(static_cast<std::size_t>(q > 0 ? q - 1 : 0));
  for (int i = 0; i < q; ++i) {
    for (int j = 0, m = 0; j < q; ++j)
      if (j != i) others[static_cast<std::size_t>(m++)] = j;
    const int r = q - 1;

    const GammaParams g = ghs_diagonal_conditional(n_k, scatter(i, i), diag_rate);
    if (!(g.rate > 0.0)) throw input_error("diagonal conditional has zero rate; supply a positive diag_rate");
    const double gamma = gamma_rate(rng, g.shape, g.rate);

    if (r == 0) {
      st.omega(0, 0) = gamma;
      st.sigma(0, 0) = 1.0 / gamma;
      continue;
    }

    Eigen::MatrixXd sigma11(r, r);
    Eigen::VectorXd sigma12(r), s21(r), lambda12(r), nu12(r);
    for (int a = 0; a < r; ++a) {
      const int ia = others[static_cast<std::size_t>(a)];
      sigma12[a] = st.sigma(ia, i);
      s21[a] = scatter(ia, i);
      lambda12[a] = st.lambda2(ia, i);
      nu12[a] = st.nu(ia, i);
      for (int b = 0; b < r; ++b) sigma11(a, b) = st.sigma(ia, others[static_cast<std::size_t>(b)]);
    }
    const double sigma22 = st.sigma(i, i);

    // inverse of the (others, others) block of omega
    const Eigen::MatrixXd inv_omega11 = sigma11 - sigma12 * sigma12.transpose() / sigma22;

    Eigen::MatrixXd inv_c = (scatter(i, i) + diag_rate) * inv_omega11;
    for (int a = 0; a < r; ++a) inv_c(a, a) += 1.0 / (lambda12[a] * st.tau2);
    inv_c = 0.5 * (inv_c + inv_c.transpose());
    Eigen::LLT<Eigen::MatrixXd> chol(inv_c);
    if (chol.info() != Eigen::Success) throw internal_error("GHS column precision is not positive definite");

    Eigen::VectorXd z(r);
    for (int a = 0; a < r; ++a) z[a] = std_normal(rng);
    const Eigen::VectorXd mean = -chol.solve(s21);
    const Eigen::VectorXd beta = mean + chol.matrixU().solve(z);

    const double omega22 = gamma + beta.dot(inv_omega11 * beta);

    for (int a = 0; a < r; ++a) {
      const double rate = beta[a] * beta[a] / (2.0 * st.tau2) + 1.0 / nu12[a];
      lambda12[a] = inv_gamma(rng, 1.0, rate);
      nu12[a] = inv_gamma(rng, 1.0, 1.0 + 1.0 / lambda12[a]);
    }

    const Eigen::VectorXd temp = inv_omega11 * beta;
    const Eigen::MatrixXd new_sigma11 = inv_omega11 + temp * temp.transpose() / gamma;
    const Eigen::VectorXd new_sigma12 = -temp / gamma;

    st.omega(i, i) = omega22;
    st.sigma(i, i) = 1.0 / gamma;
    for (int a = 0; a < r; ++a) {
      const int ia = others[static_cast<std::size_t>(a)];
      st.omega(i, ia) = st.omega(ia, i) = beta[a];
      st.sigma(i, ia) = st.sigma(ia, i) = new_sigma12[a];
      st.lambda2(i, ia) = st.lambda2(ia, i) = lambda12[a];
      st.nu(i, ia) = st.nu(ia, i) = nu12[a];
      for (int b = 0; b < r; ++b) st.sigma(ia, others[static_cast<std::size_t>(b)]) = new_sigma11(a, b);
    }
  }

  double ss = 0.0;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < i; ++j) ss += st.omega(i, j) * st.omega(i, j) / (2.0 * st.lambda2(i, j));
  const double n_off = static_cast<double>(q) * (q - 1) / 2.0;
  st.tau2 = inv_gamma(rng, (n_off + 1.0) / 2.0, 1.0 / st.xi + ss);
  st.xi = inv_gamma(rng, 1.0, 1.0 + 1.0 / st.tau2);

  // The rank-one updates drift over long runs; re-derive sigma from omega.
  st.omega = 0.5 * (st.omega + st.omega.transpose());
  Eigen::LLT<Eigen::MatrixXd> chol(st.omega);
  if (chol.info() != Eigen::Success) throw internal_error("GHS precision lost positive definiteness");
  st.sigma = chol.solve(Eigen::MatrixXd::Identity(q, q));
  st.sigma = 0.5 * (st.sigma + st.sigma.transpose());
}

}  // namespace cortree
