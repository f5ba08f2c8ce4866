#pragma once

// Two-group synthetic histograms. Each sample draws a group, a mixing weight
// W ~ Beta(10, 10) and a total count m; its m points come from
// W * Beta(a1, b1) + (1 - W) * Beta(a2, b2) and are binned on [0, 1].
//   group 1 (label 0): Beta(2, 6) and Beta(6, 2), modes near 1/4 and 3/4
//   group 2 (label 1): Beta(1, 1) and Beta(3, 3), unimodal

#include <cmath>
#include <cstdint>
#include <vector>

#include "count_matrix.hpp"
#include "error.hpp"
#include "random.hpp"

namespace cortree {

struct BetaShape {
  double a = 1.0;
  double b = 1.0;
};

struct SimSpec {
  std::size_t n = 200;
  double group1_frac = 0.6;
  std::int64_t count_low = 4000;
  std::int64_t count_high = 10000;
  std::size_t bins = 1000;
  BetaShape group1_first{2, 6}, group1_second{6, 2};
  BetaShape group2_first{1, 1}, group2_second{3, 3};
  BetaShape w{10, 10};
  std::uint64_t seed = 1;

  /// Low-count regime: per-sample totals in [100, 2156], n = 570.
  static SimSpec low_count() {
    SimSpec s;
    s.n = 570;
    s.count_low = 100;
    s.count_high = 2156;
    return s;
  }

  void validate() const {
    if (n < 1) throw config_error("need at least one sample");
    if (!(group1_frac > 0.0 && group1_frac < 1.0)) throw config_error("group-1 fraction must lie in (0, 1)");
    if (count_low < 0 || count_low > count_high) throw config_error("invalid count range");
    if (bins < 2) throw config_error("need at least two bins");
  }
};

struct SimData {
  CountMatrix counts;
  std::vector<int> truth;   // 0 = group 1, 1 = group 2
  std::vector<double> w;
};

inline SimData simulate(const SimSpec& spec) {
  spec.validate();
  SimData out;
  out.counts = CountMatrix(spec.n, spec.bins);
  out.truth.resize(spec.n);
  out.w.resize(spec.n);
  const auto p = static_cast<double>(spec.bins);
  for (std::size_t j = 0; j < spec.n; ++j) {
    Rng rng = make_substream(spec.seed, j, 7);
    const bool g1 = uniform01(rng) < spec.group1_frac;
    const double w = beta(rng, spec.w.a, spec.w.b);
    const std::int64_t m = std::uniform_int_distribution<std::int64_t>(spec.count_low, spec.count_high)(rng);
    const BetaShape& first = g1 ? spec.group1_first : spec.group2_first;
    const BetaShape& second = g1 ? spec.group1_second : spec.group2_second;
    auto row = out.counts.row(j);
    for (std::int64_t s = 0; s < m; ++s) {
      const BetaShape& c = uniform01(rng) < w ? first : second;
      const double x = beta(rng, c.a, c.b);
      // half-open bins, last bin closed at 1
      auto bin = static_cast<std::size_t>(std::floor(x * p));
      if (bin >= spec.bins) bin = spec.bins - 1;
      ++row[bin];
    }
    out.truth[j] = g1 ? 0 : 1;
    out.w[j] = w;
  }
  return out;
}

}  // namespace cortree
