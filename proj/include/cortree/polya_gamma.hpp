#pragma once

// Polya-Gamma PG(b, c) variates for integer b.
//
// b <= threshold: sum of b exact PG(1, c) draws, each from the alternating
// series accept/reject sampler (Devroye-style proposal mixing a truncated
// exponential and a truncated inverse Gaussian).
// b > threshold: Gaussian with the exact PG(b, c) mean and variance,
// rejected below zero.

#include <cmath>
#include <cstdint>
#include <numbers>

#include "error.hpp"
#include "random.hpp"

namespace cortree {

inline constexpr std::int64_t kPgExactThreshold = 200;

struct PgDraw {
  double value = 0.0;
  std::int64_t b = 0;
  double c = 0.0;
};

/// E[PG(b, c)] = b tanh(c/2) / (2c), with limit b/4 at c = 0.
inline double pg_mean(double b, double c) {
  const double x = std::abs(c) / 2.0;
  if (x < 1e-4) return b / 4.0 * (1.0 - x * x / 3.0);
  return b / 4.0 * std::tanh(x) / x;
}

/// Var[PG(b, c)] = b (sinh c - c) sech^2(c/2) / (4 c^3), limit b/24 at c = 0.
inline double pg_variance(double b, double c) {
  const double a = std::abs(c);
  if (a < 1e-3) return b / 24.0 * (1.0 - a * a / 5.0);
  // sinh(c) sech^2(c/2) == 2 tanh(c/2); avoids overflow for large |c|
  const double ch = std::cosh(a / 2.0);
  const double sech2 = std::isinf(ch) ? 0.0 : 1.0 / (ch * ch);
  return b * (2.0 * std::tanh(a / 2.0) - a * sech2) / (4.0 * a * a * a);
}

namespace detail {

inline constexpr double kPgTrunc = 0.64;

inline double log_normal_cdf(double x) { return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2)); }

// n-th coefficient of the alternating series for the J*(1, z) density.
inline double pg_series_coef(int n, double x) {
  const double k = (n + 0.5) * std::numbers::pi;
  if (x > kPgTrunc) return k * std::exp(-0.5 * k * k * x);
  if (x <= 0.0) return 0.0;
  const double expnt = -1.5 * (std::log(0.5 * std::numbers::pi) + std::log(x)) + std::log(k) -
                       2.0 * (n + 0.5) * (n + 0.5) / x;
  return std::exp(expnt);
}

// Probability that the proposal comes from the exponential piece.
inline double pg_mass_exponential(double z) {
  const double t = kPgTrunc;
  const double fz = 0.125 * std::numbers::pi * std::numbers::pi + 0.5 * z * z;
  const double b = std::sqrt(1.0 / t) * (t * z - 1.0);
  const double a = -std::sqrt(1.0 / t) * (t * z + 1.0);
  const double x0 = std::log(fz) + fz * t;
  const double xb = x0 - z + log_normal_cdf(b);
  const double xa = x0 + z + log_normal_cdf(a);
  const double q_over_p = 4.0 / std::numbers::pi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + q_over_p);
}

// Inverse Gaussian(1/z, 1) truncated to (0, kPgTrunc].
inline double truncated_inverse_gaussian(double z, Rng& rng) {
  const double t = kPgTrunc;
  double x = t + 1.0;
  if (z < 1.0 / t) {
    double accept = 0.0;
    while (uniform01(rng) > accept) {
      double e1 = exponential(rng);
      double e2 = exponential(rng);
      while (e1 * e1 > 2.0 * e2 / t) {
        e1 = exponential(rng);
        e2 = exponential(rng);
      }
      x = 1.0 + e1 * t;
      x = t / (x * x);
      accept = std::exp(-0.5 * z * z * x);
    }
    return x;
  }
  const double mu = 1.0 / z;
  while (x > t) {
    double y = std_normal(rng);
    y *= y;
    const double mu_y = mu * y;
    x = mu + 0.5 * mu * mu_y - 0.5 * mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
    if (uniform01(rng) > mu / (mu + x)) x = mu * mu / x;
  }
  return x;
}

}  // namespace detail

/// One exact PG(1, c) draw.
inline double sample_pg1(double c, Rng& rng) {
  const double z = std::abs(c) * 0.5;
  const double fz = 0.125 * std::numbers::pi * std::numbers::pi + 0.5 * z * z;
  const double p_exp = detail::pg_mass_exponential(z);
  for (;;) {
    double x;
    if (uniform01(rng) < p_exp)
      x = detail::kPgTrunc + exponential(rng) / fz;
    else
      x = detail::truncated_inverse_gaussian(z, rng);

    double s = detail::pg_series_coef(0, x);
    const double y = uniform01(rng) * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= detail::pg_series_coef(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += detail::pg_series_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

inline PgDraw sample_pg(std::int64_t b, double c, Rng& rng, std::int64_t exact_threshold = kPgExactThreshold) {
  if (b < 0) throw input_error("Polya-Gamma shape must be non-negative");
  PgDraw d{0.0, b, c};
  if (b == 0) return d;
  if (b <= exact_threshold) {
    for (std::int64_t i = 0; i < b; ++i) d.value += sample_pg1(c, rng);
    return d;
  }
  const double m = pg_mean(static_cast<double>(b), c);
  const double sd = std::sqrt(pg_variance(static_cast<double>(b), c));
  do {
    d.value = m + sd * std_normal(rng);
  } while (d.value < 0.0);
  return d;
}

}  // namespace cortree
