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

#ifndef RELAYSEL_METRICS_HPP
#define RELAYSEL_METRICS_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relaysel/rng.hpp"

namespace relaysel {

/// A continuous suitability metric described by its complementary CDF
/// F_c(u) = Pr(metric > u) and the inverse of that map.
///
/// The CCDF must be strictly decreasing on (infimum, supremum). Outside the
/// support it saturates: ccdf(u) = 1 below the infimum and 0 above the
/// supremum, and inverse_ccdf maps p >= 1 to the infimum and p <= 0 to the
/// supremum (which may be +inf).
class ContinuousMetricModel {
 public:
  using Map = std::function<double(double)>;

  ContinuousMetricModel(std::string name, Map ccdf, Map inverse_ccdf, double infimum,
                        double supremum);

  /// Metric uniform on (0, 1): F_c(u) = 1 - u.
  static ContinuousMetricModel uniform();
  /// Exponential tail on (0, inf): F_c(u) = exp(-rate * u).
  static ContinuousMetricModel exponential_tail(double rate = 1.0);

  /// Looks a model up in the built-in registry ("uniform", "exponential-tail").
  static ContinuousMetricModel by_name(std::string_view name);
  static std::vector<std::string> registry();

  double ccdf(double u) const;
  double inverse_ccdf(double p) const;
  double infimum() const { return infimum_; }
  double supremum() const { return supremum_; }
  const std::string& name() const { return name_; }

  /// Inverse-transform draw of one metric value.
  double sample(Rng& rng) const;

 private:
  std::string name_;
  Map ccdf_;
  Map inverse_ccdf_;
  double infimum_;
  double supremum_;
};

/// Discrete metric taking levels 1..omega with probabilities rho_1..rho_omega.
class DiscreteMetricModel {
 public:
  /// Throws std::invalid_argument unless every entry is positive and the
  /// entries sum to one within 1e-12.
  explicit DiscreteMetricModel(std::vector<double> pmf);

  /// Parses a comma-separated probability list such as "0.2,0.5,0.3".
  static DiscreteMetricModel parse(std::string_view text);

  std::size_t levels() const { return pmf_.size(); }
  std::span<const double> pmf() const { return pmf_; }

  /// Bin of Proportional Expansion for a level in 1..levels():
  /// (sum of rho below the level, sum of rho up to and including it).
  double bin_lower(std::size_t level) const;
  double bin_upper(std::size_t level) const;

  /// Draws a level in 1..levels() from the pmf.
  std::size_t sample_level(Rng& rng) const;

 private:
  void check_level(std::size_t level) const;

  std::vector<double> pmf_;
  std::vector<double> cumulative_;  // cumulative_[j] = rho_1 + ... + rho_j, cumulative_[0] = 0
};

/// Metrics mapped into the normalized domain y_i = n * F_c(u_i).
///
/// Each y_i lies strictly inside (0, n) and the values are pairwise distinct.
/// The best metric has the smallest y.
class NormalizedMetrics {
 public:
  /// Throws std::invalid_argument on an empty list, a value outside (0, n),
  /// or a repeated value.
  explicit NormalizedMetrics(std::vector<double> y);

  std::size_t node_count() const { return y_.size(); }
  std::span<const double> values() const { return y_; }
  double operator[](std::size_t i) const { return y_[i]; }

 private:
  std::vector<double> y_;
};

/// n i.i.d. draws from the model, normalized. Each y_i is uniform on (0, n)
/// whatever the CCDF. Boundary values and ties are redrawn.
NormalizedMetrics sample_continuous(std::size_t n, const ContinuousMetricModel& model, Rng& rng);

/// Fast path used by the simulator: draws y directly, uniform on (0, n).
NormalizedMetrics sample_uniform_normalized(std::size_t n, Rng& rng);

/// y_i = n * F_c(u_i) for given raw metrics.
NormalizedMetrics normalize(std::span<const double> metrics, const ContinuousMetricModel& model);

/// Proportional Expansion: a draw uniform on the open bin of `level`.
double proportional_expand(std::size_t level, const DiscreteMetricModel& model, Rng& rng);

/// Expands each node's level and maps the result into the normalized domain
/// (y = n * (1 - nu)). Values that collide after expansion are redrawn.
NormalizedMetrics expand_levels(std::span<const std::size_t> levels, const DiscreteMetricModel& model,
                                Rng& rng);

}  // namespace relaysel

#endif  // RELAYSEL_METRICS_HPP
