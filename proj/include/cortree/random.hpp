#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cortree {

using Rng = std::mt19937_64;

/// Independent engine for (seed, stream, salt). Workers own one each so that
/// results do not depend on how work is split across threads.
inline Rng make_substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(salt), 0x9e3779b9u};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double std_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double exponential(Rng& rng, double rate = 1.0) {
  return std::exponential_distribution<double>(rate)(rng);
}

/// Gamma(shape, rate).
inline double gamma_rate(Rng& rng, double shape, double rate) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

/// InvGamma(shape, rate): reciprocal of a Gamma(shape, rate) variate.
inline double inv_gamma(Rng& rng, double shape, double rate) {
  return 1.0 / gamma_rate(rng, shape, rate);
}

/// Beta(a, b) through the two-gamma ratio.
inline double beta(Rng& rng, double a, double b) {
  const double x = gamma_rate(rng, a, 1.0);
  const double y = gamma_rate(rng, b, 1.0);
  return x / (x + y);
}

/// log(1 / (1 + exp(-x))) without overflow.
inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double v) { return std::log(v) - std::log1p(-v); }

}  // namespace cortree
