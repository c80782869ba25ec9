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

#include "relaysel/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace relaysel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_duplicates(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return std::adjacent_find(values.begin(), values.end()) != values.end();
}

// Redraws entries until all lie in (0, n) and are distinct. `draw(i)` must
// return a fresh candidate for node i.
template <class Draw>
std::vector<double> draw_distinct(std::size_t n, Draw&& draw) {
  const double upper = static_cast<double>(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    do {
      y[i] = draw(i);
    } while (!(y[i] > 0.0 && y[i] < upper));
  }
  while (has_duplicates(y)) {
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
      auto range = std::equal_range(sorted.begin(), sorted.end(), y[i]);
      if (range.second - range.first > 1) {
        do {
          y[i] = draw(i);
        } while (!(y[i] > 0.0 && y[i] < upper));
      }
    }
  }
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// ContinuousMetricModel

ContinuousMetricModel::ContinuousMetricModel(std::string name, Map ccdf, Map inverse_ccdf,
                                             double infimum, double supremum)
    : name_(std::move(name)),
      ccdf_(std::move(ccdf)),
      inverse_ccdf_(std::move(inverse_ccdf)),
      infimum_(infimum),
      supremum_(supremum) {
  if (!ccdf_ || !inverse_ccdf_) throw std::invalid_argument("metric model: maps must be callable");
  if (!(infimum_ < supremum_)) throw std::invalid_argument("metric model: empty support");
}

ContinuousMetricModel ContinuousMetricModel::uniform() {
  return ContinuousMetricModel(
      "uniform", [](double u) { return 1.0 - u; }, [](double p) { return 1.0 - p; }, 0.0, 1.0);
}

ContinuousMetricModel ContinuousMetricModel::exponential_tail(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw std::invalid_argument("exponential-tail model: rate must be positive");
  return ContinuousMetricModel(
      "exponential-tail", [rate](double u) { return std::exp(-rate * u); },
      [rate](double p) { return -std::log(p) / rate; }, 0.0, kInf);
}

ContinuousMetricModel ContinuousMetricModel::by_name(std::string_view name) {
  if (name == "uniform") return uniform();
  if (name == "exponential-tail") return exponential_tail();
  throw std::invalid_argument("unknown metric model '" + std::string(name) + "'");
}

std::vector<std::string> ContinuousMetricModel::registry() { return {"uniform", "exponential-tail"}; }

double ContinuousMetricModel::ccdf(double u) const {
  if (u <= infimum_) return 1.0;
  if (u >= supremum_) return 0.0;
  return std::clamp(ccdf_(u), 0.0, 1.0);
}

double ContinuousMetricModel::inverse_ccdf(double p) const {
  if (p >= 1.0) return infimum_;
  if (p <= 0.0) return supremum_;
  return std::clamp(inverse_ccdf_(p), infimum_, supremum_);
}

double ContinuousMetricModel::sample(Rng& rng) const { return inverse_ccdf(rng.uniform_open01()); }

// ---------------------------------------------------------------------------
// DiscreteMetricModel

DiscreteMetricModel::DiscreteMetricModel(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw std::invalid_argument("pmf: at least one level is required");
  for (double rho : pmf_) {
    if (!(rho > 0.0) || !std::isfinite(rho))
      throw std::invalid_argument("pmf: every probability must be positive");
  }
  cumulative_.assign(pmf_.size() + 1, 0.0);
  std::partial_sum(pmf_.begin(), pmf_.end(), cumulative_.begin() + 1);
  if (std::abs(cumulative_.back() - 1.0) > 1e-12)
    throw std::invalid_argument("pmf: probabilities must sum to 1");
}

DiscreteMetricModel DiscreteMetricModel::parse(std::string_view text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view field = text.substr(pos, comma - pos);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    double value = 0.0;
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || end != field.data() + field.size())
      throw std::invalid_argument("pmf: cannot parse '" + std::string(field) + "' as a probability");
    values.push_back(value);
    pos = comma + 1;
  }
  return DiscreteMetricModel(std::move(values));
}

void DiscreteMetricModel::check_level(std::size_t level) const {
  if (level < 1 || level > pmf_.size())
    throw std::invalid_argument("pmf: level " + std::to_string(level) + " outside 1.." +
                                std::to_string(pmf_.size()));
}

double DiscreteMetricModel::bin_lower(std::size_t level) const {
  check_level(level);
  return cumulative_[level - 1];
}

double DiscreteMetricModel::bin_upper(std::size_t level) const {
  check_level(level);
  // The last bin ends at exactly 1 regardless of rounding in the partial sums.
  return level == pmf_.size() ? 1.0 : cumulative_[level];
}

std::size_t DiscreteMetricModel::sample_level(Rng& rng) const {
  const double u = rng.uniform01();
  auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end() - 1, u);
  return static_cast<std::size_t>(it - cumulative_.begin());
}

// ---------------------------------------------------------------------------
// NormalizedMetrics

NormalizedMetrics::NormalizedMetrics(std::vector<double> y) : y_(std::move(y)) {
  if (y_.empty()) throw std::invalid_argument("normalized metrics: at least one node is required");
  const double n = static_cast<double>(y_.size());
  for (double v : y_) {
    if (!(v > 0.0 && v < n))
      throw std::invalid_argument("normalized metrics: every value must lie in (0, n)");
  }
  if (has_duplicates(y_)) throw std::invalid_argument("normalized metrics: values must be distinct");
}

NormalizedMetrics sample_continuous(std::size_t n, const ContinuousMetricModel& model, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_continuous: n must be at least 1");
  const double scale = static_cast<double>(n);
  return NormalizedMetrics(
      draw_distinct(n, [&](std::size_t) { return scale * model.ccdf(model.sample(rng)); }));
}

NormalizedMetrics sample_uniform_normalized(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_uniform_normalized: n must be at least 1");
  const double scale = static_cast<double>(n);
  return NormalizedMetrics(draw_distinct(n, [&](std::size_t) { return scale * rng.uniform_open01(); }));
}

NormalizedMetrics normalize(std::span<const double> metrics, const ContinuousMetricModel& model) {
  const double scale = static_cast<double>(metrics.size());
  std::vector<double> y;
  y.reserve(metrics.size());
  for (double u : metrics) y.push_back(scale * model.ccdf(u));
  return NormalizedMetrics(std::move(y));
}

double proportional_expand(std::size_t level, const DiscreteMetricModel& model, Rng& rng) {
  const double lo = model.bin_lower(level);
  const double hi = model.bin_upper(level);
  for (;;) {
    const double nu = lo + (hi - lo) * rng.uniform01();
    if (nu > lo && nu < hi) return nu;
  }
}

NormalizedMetrics expand_levels(std::span<const std::size_t> levels, const DiscreteMetricModel& model,
                                Rng& rng) {
  if (levels.empty()) throw std::invalid_argument("expand_levels: at least one node is required");
  const double scale = static_cast<double>(levels.size());
  return NormalizedMetrics(draw_distinct(levels.size(), [&](std::size_t i) {
    return scale * (1.0 - proportional_expand(levels[i], model, rng));
  }));
}

}  // namespace relaysel
