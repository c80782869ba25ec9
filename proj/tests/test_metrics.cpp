// Copyright 2026 The relaysel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "relaysel/metrics.hpp"
#include "relaysel/rng.hpp"

namespace relaysel {
namespace {

// Kolmogorov distance between the sample and uniform(0, 1).
double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max(d, std::fabs((i + 1) / n - xs[i]));
    d = std::max(d, std::fabs(xs[i] - i / n));
  }
  return d;
}

TEST(RngTest, TrialStreamsAreReproducible) {
  Rng a = Rng::for_trial(42, 7);
  Rng b = Rng::for_trial(42, 7);
  Rng c = Rng::for_trial(42, 8);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}

TEST(RngTest, UniformRanges) {
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_open01();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(ContinuousModelTest, UniformMapsAndSaturation) {
  const auto m = ContinuousMetricModel::uniform();
  EXPECT_DOUBLE_EQ(m.ccdf(0.25), 0.75);
  EXPECT_DOUBLE_EQ(m.inverse_ccdf(0.75), 0.25);
  EXPECT_EQ(m.ccdf(-1.0), 1.0);
  EXPECT_EQ(m.ccdf(2.0), 0.0);
  EXPECT_EQ(m.inverse_ccdf(1.5), m.infimum());
  EXPECT_EQ(m.inverse_ccdf(-0.5), m.supremum());
}

TEST(ContinuousModelTest, ExponentialTail) {
  const auto m = ContinuousMetricModel::exponential_tail(2.0);
  EXPECT_NEAR(m.ccdf(1.0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(m.inverse_ccdf(std::exp(-2.0)), 1.0, 1e-14);
  EXPECT_TRUE(std::isinf(m.supremum()));
  EXPECT_THROW(ContinuousMetricModel::exponential_tail(0.0), std::invalid_argument);
}

TEST(ContinuousModelTest, Registry) {
  const auto names = ContinuousMetricModel::registry();
  EXPECT_NE(std::find(names.begin(), names.end(), "uniform"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "exponential-tail"), names.end());
  for (const auto& name : names) EXPECT_EQ(ContinuousMetricModel::by_name(name).name(), name);
  EXPECT_THROW(ContinuousMetricModel::by_name("lognormal"), std::invalid_argument);
}

TEST(DiscreteModelTest, ParseAndBins) {
  const auto pmf = DiscreteMetricModel::parse("0.2,0.5,0.3");
  ASSERT_EQ(pmf.levels(), 3u);
  EXPECT_DOUBLE_EQ(pmf.bin_lower(1), 0.0);
  EXPECT_DOUBLE_EQ(pmf.bin_upper(1), 0.2);
  EXPECT_DOUBLE_EQ(pmf.bin_lower(2), 0.2);
  EXPECT_DOUBLE_EQ(pmf.bin_upper(2), 0.7);
  EXPECT_EQ(pmf.bin_upper(3), 1.0);
  EXPECT_THROW(pmf.bin_lower(0), std::invalid_argument);
  EXPECT_THROW(pmf.bin_upper(4), std::invalid_argument);
}

TEST(DiscreteModelTest, RejectsBadPmfs) {
  EXPECT_THROW(DiscreteMetricModel({}), std::invalid_argument);
  EXPECT_THROW(DiscreteMetricModel({0.5, 0.4}), std::invalid_argument);
  EXPECT_THROW(DiscreteMetricModel({0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(DiscreteMetricModel({-0.5, 1.5}), std::invalid_argument);
  EXPECT_THROW(DiscreteMetricModel::parse(""), std::invalid_argument);
  EXPECT_THROW(DiscreteMetricModel::parse("0.2,,0.8"), std::invalid_argument);
  EXPECT_THROW(DiscreteMetricModel::parse("0.2,abc"), std::invalid_argument);
  EXPECT_THROW(DiscreteMetricModel::parse("0.2,0.5"), std::invalid_argument);
}

TEST(DiscreteModelTest, LevelFrequencies) {
  const DiscreteMetricModel pmf({0.2, 0.5, 0.3});
  Rng rng(11);
  std::vector<int> counts(4, 0);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) ++counts.at(pmf.sample_level(rng));
  EXPECT_EQ(counts[0], 0);
  EXPECT_NEAR(counts[1] / double(draws), 0.2, 0.005);
  EXPECT_NEAR(counts[2] / double(draws), 0.5, 0.005);
  EXPECT_NEAR(counts[3] / double(draws), 0.3, 0.005);
}

TEST(NormalizedMetricsTest, Validation) {
  EXPECT_THROW(NormalizedMetrics({}), std::invalid_argument);
  EXPECT_THROW(NormalizedMetrics({0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(NormalizedMetrics({0.5, 2.0}), std::invalid_argument);
  EXPECT_THROW(NormalizedMetrics({0.5, 0.5}), std::invalid_argument);
  const NormalizedMetrics y({0.3, 0.9});
  EXPECT_EQ(y.node_count(), 2u);
  EXPECT_EQ(y[1], 0.9);
}

TEST(SampleContinuousTest, RejectsEmpty) {
  Rng rng(1);
  EXPECT_THROW(sample_continuous(0, ContinuousMetricModel::uniform(), rng), std::invalid_argument);
  EXPECT_THROW(sample_uniform_normalized(0, rng), std::invalid_argument);
}

TEST(SampleContinuousTest, SingleNodeInUnitInterval) {
  Rng rng(5);
  for (const auto& name : ContinuousMetricModel::registry()) {
    const auto y = sample_continuous(1, ContinuousMetricModel::by_name(name), rng);
    ASSERT_EQ(y.node_count(), 1u);
    EXPECT_GT(y[0], 0.0);
    EXPECT_LT(y[0], 1.0);
  }
}

TEST(SampleContinuousTest, NormalizedValuesAreUniformWhateverTheModel) {
  for (const auto& name : ContinuousMetricModel::registry()) {
    const auto model = ContinuousMetricModel::by_name(name);
    Rng rng(2024);
    std::vector<double> xs;
    xs.reserve(100000);
    for (int t = 0; t < 10000; ++t) {
      const auto y = sample_continuous(10, model, rng);
      for (double v : y.values()) xs.push_back(v / 10.0);
    }
    EXPECT_LT(ks_uniform(xs), 0.01) << name;
  }
}

TEST(SampleContinuousTest, FastPathIsUniform) {
  Rng rng(77);
  std::vector<double> xs;
  for (int t = 0; t < 10000; ++t) {
    const auto y = sample_uniform_normalized(10, rng);
    for (double v : y.values()) xs.push_back(v / 10.0);
  }
  EXPECT_LT(ks_uniform(xs), 0.01);
}

TEST(NormalizeTest, LargerMetricGetsSmallerValue) {
  for (const auto& name : ContinuousMetricModel::registry()) {
    const auto model = ContinuousMetricModel::by_name(name);
    const double hi = name == "uniform" ? 0.9 : 5.0;
    const double lo = name == "uniform" ? 0.2 : 1.0;
    const std::vector<double> u{hi, lo};
    const auto y = normalize(u, model);
    EXPECT_LT(y[0], y[1]) << name;
  }
}

TEST(NormalizeTest, RankReversalIsExact) {
  const auto model = ContinuousMetricModel::exponential_tail();
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> u(25);
    for (double& v : u) v = model.sample(rng);
    const auto y = normalize(u, model);
    std::vector<std::size_t> by_metric(u.size()), by_y(u.size());
    std::iota(by_metric.begin(), by_metric.end(), 0);
    std::iota(by_y.begin(), by_y.end(), 0);
    std::sort(by_metric.begin(), by_metric.end(), [&](auto a, auto b) { return u[a] > u[b]; });
    std::sort(by_y.begin(), by_y.end(), [&](auto a, auto b) { return y[a] < y[b]; });
    ASSERT_EQ(by_metric, by_y);
  }
}

TEST(ProportionalExpandTest, StaysInsideOpenBin) {
  const DiscreteMetricModel pmf({0.2, 0.5, 0.3});
  const DiscreteMetricModel single({1.0});
  Rng rng(4);
  for (int i = 0; i < 100000; ++i) {
    const double a = proportional_expand(1, pmf, rng);
    ASSERT_GT(a, 0.0);
    ASSERT_LT(a, 0.2);
    const double b = proportional_expand(3, pmf, rng);
    ASSERT_GT(b, 0.7);
    ASSERT_LT(b, 1.0);
    const double c = proportional_expand(1, single, rng);
    ASSERT_GT(c, 0.0);
    ASSERT_LT(c, 1.0);
  }
}

TEST(ProportionalExpandTest, RejectsBadLevel) {
  const DiscreteMetricModel pmf({0.2, 0.5, 0.3});
  Rng rng(4);
  EXPECT_THROW(proportional_expand(0, pmf, rng), std::invalid_argument);
  EXPECT_THROW(proportional_expand(4, pmf, rng), std::invalid_argument);
}

TEST(ProportionalExpandTest, ExpandedValuesAreUniform) {
  const DiscreteMetricModel pmf({0.2, 0.5, 0.3});
  Rng rng(31337);
  std::vector<double> xs(100000);
  for (double& x : xs) x = proportional_expand(pmf.sample_level(rng), pmf, rng);
  EXPECT_LT(ks_uniform(xs), 0.01);
  EXPECT_EQ(std::set<double>(xs.begin(), xs.end()).size(), xs.size());
}

TEST(ExpandLevelsTest, PreservesOrderOfDistinctLevels) {
  Rng rng(8);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t omega = 1 + rng() % 6;
    std::vector<double> weights(omega);
    for (double& w : weights) w = 0.05 + rng.uniform01();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= total;
    weights.back() = 1.0 - std::accumulate(weights.begin(), weights.end() - 1, 0.0);
    const DiscreteMetricModel pmf(weights);

    const std::size_t n = 1 + rng() % 30;
    std::vector<std::size_t> levels(n);
    for (auto& level : levels) level = pmf.sample_level(rng);
    const auto y = expand_levels(levels, pmf, rng);
    ASSERT_EQ(y.node_count(), n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (levels[i] > levels[j]) {
          ASSERT_LT(y[i], y[j]);
        }
  }
}

}  // namespace
}  // namespace relaysel
