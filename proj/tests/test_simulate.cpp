#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "cortree/simulate.hpp"

using namespace cortree;

TEST(Simulate, DefaultRowSums) {
  SimSpec spec;
  spec.n = 60;
  const auto d = simulate(spec);
  ASSERT_EQ(d.counts.rows, 60u);
  ASSERT_EQ(d.counts.cols, 1000u);
  for (std::size_t i = 0; i < d.counts.rows; ++i) {
    EXPECT_GE(d.counts.row_sum(i), 4000);
    EXPECT_LE(d.counts.row_sum(i), 10000);
    EXPECT_GT(d.w[i], 0.0);
    EXPECT_LT(d.w[i], 1.0);
  }
}

TEST(Simulate, LowCountPreset) {
  SimSpec spec = SimSpec::low_count();
  EXPECT_EQ(spec.n, 570u);
  spec.n = 100;
  const auto d = simulate(spec);
  for (std::size_t i = 0; i < d.counts.rows; ++i) {
    EXPECT_GE(d.counts.row_sum(i), 100);
    EXPECT_LE(d.counts.row_sum(i), 2156);
  }
}

TEST(Simulate, GroupFraction) {
  SimSpec spec;
  spec.n = 10000;
  spec.bins = 10;
  spec.count_low = spec.count_high = 1;
  const auto d = simulate(spec);
  const double frac =
      static_cast<double>(std::count(d.truth.begin(), d.truth.end(), 0)) / static_cast<double>(spec.n);
  EXPECT_NEAR(frac, 0.6, 0.02);
}

TEST(Simulate, GroupOneIsBimodal) {
  SimSpec spec;
  spec.n = 80;
  spec.bins = 100;
  const auto d = simulate(spec);
  std::vector<double> avg(100, 0.0);
  for (std::size_t i = 0; i < d.counts.rows; ++i) {
    if (d.truth[i] != 0) continue;
    const double m = static_cast<double>(d.counts.row_sum(i));
    for (std::size_t j = 0; j < 100; ++j) avg[j] += static_cast<double>(d.counts(i, j)) / m;
  }
  // Beta(2,6) has mode 1/6 and mean 1/4; Beta(6,2) mirrors it
  const auto left = std::max_element(avg.begin(), avg.begin() + 50) - avg.begin();
  const auto right = std::max_element(avg.begin() + 50, avg.end()) - avg.begin();
  EXPECT_GE(left, 10);
  EXPECT_LE(left, 30);
  EXPECT_GE(right, 70);
  EXPECT_LE(right, 90);
  EXPECT_LT(avg[50], 0.5 * avg[static_cast<std::size_t>(left)]);
  double mean_left = 0.0, mass_left = 0.0;
  for (std::size_t j = 0; j < 50; ++j) {
    mean_left += (j + 0.5) / 100.0 * avg[j];
    mass_left += avg[j];
  }
  EXPECT_NEAR(mean_left / mass_left, 0.25, 0.03);
}

TEST(Simulate, Deterministic) {
  SimSpec spec;
  spec.n = 20;
  spec.bins = 50;
  spec.seed = 7;
  EXPECT_EQ(simulate(spec).counts, simulate(spec).counts);
  SimSpec other = spec;
  other.seed = 8;
  EXPECT_FALSE(simulate(spec).counts == simulate(other).counts);
}

TEST(Simulate, LastBinClosed) {
  SimSpec spec;
  spec.n = 5;
  spec.bins = 2;
  spec.count_low = spec.count_high = 50;
  const auto d = simulate(spec);
  for (std::size_t i = 0; i < d.counts.rows; ++i) EXPECT_EQ(d.counts.row_sum(i), 50);
}

TEST(Simulate, Validation) {
  SimSpec spec;
  spec.group1_frac = 1.0;
  EXPECT_THROW(simulate(spec), config_error);
  spec = SimSpec{};
  spec.count_low = 10;
  spec.count_high = 5;
  EXPECT_THROW(simulate(spec), config_error);
  spec = SimSpec{};
  spec.bins = 1;
  EXPECT_THROW(simulate(spec), config_error);
}
