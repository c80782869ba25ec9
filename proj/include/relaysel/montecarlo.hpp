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

#ifndef RELAYSEL_MONTECARLO_HPP
#define RELAYSEL_MONTECARLO_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "relaysel/analysis.hpp"
#include "relaysel/metrics.hpp"

namespace relaysel {

/// Sample statistics of the slot count over independent trials.
struct SummaryStats {
  double mean_slots = 0.0;
  double std_error = 0.0;
  double ci95_half_width = 0.0;  ///< 1.96 * std_error
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Worker threads for a Monte Carlo run; 0 picks the hardware concurrency.
/// Results never depend on this value.
struct RunOptions {
  unsigned workers = 0;
};

/// Mean slots of the Q-node algorithm over `trials` fresh uniform normalized
/// instances. Trial t draws from Rng::for_trial(seed, t); the node values are
/// generated lazily in increasing order, so a trial costs O(slots), not O(n).
SummaryStats estimate(std::size_t n, std::size_t q, double p, std::uint64_t trials, std::uint64_t seed,
                      RunOptions options = {});

/// One trial with discrete metrics: the sampled levels and the selection.
struct DiscreteTrial {
  std::vector<std::size_t> levels;  ///< per node, in 1..omega
  std::vector<std::size_t> selected;
  std::size_t slots = 0;
};

DiscreteTrial run_discrete_trial(const DiscreteMetricModel& pmf, std::size_t n, std::size_t q, double p, Rng& rng);

/// As estimate, with node levels drawn from `pmf` and made continuous by
/// Proportional Expansion.
SummaryStats estimate_discrete(const DiscreteMetricModel& pmf, std::size_t n, std::size_t q, double p,
                               std::uint64_t trials, std::uint64_t seed, RunOptions options = {});

/// A sweep point. Without `n` only the asymptotic value is produced.
struct SweepPoint {
  std::optional<std::size_t> n;
  std::size_t q = 1;
  double p = 1.0;
};

struct SweepRow {
  SweepPoint point;
  double analytic = 0.0;  ///< finite-n value for Q = 1 with n given, asymptotic otherwise
  std::optional<SummaryStats> simulated;
};

/// One row per point. Every simulated point uses the same seed.
std::vector<SweepRow> sweep(std::span<const SweepPoint> grid, std::uint64_t trials, std::uint64_t seed,
                            const SeriesControl& ctl = {}, RunOptions options = {});

}  // namespace relaysel

#endif  // RELAYSEL_MONTECARLO_HPP
