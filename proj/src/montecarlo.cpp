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

#include "relaysel/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "relaysel/protocol.hpp"

namespace relaysel {

namespace {

__extension__ typedef unsigned __int128 Wide;

// Slot counts are integers, so the sums are exact and independent of the
// order in which workers finish.
struct Moments {
  std::uint64_t sum = 0;
  Wide sum_sq = 0;
};

// Order statistics of n uniform draws on (0, n), produced in increasing order
// by the sequential spacing method. Only as many as a run asks for are drawn.
class OrderStatistics {
 public:
  OrderStatistics(std::size_t n, Rng& rng) : n_(n), scale_(static_cast<double>(n)), rng_(rng) {}

  double operator()() {
    for (;;) {
      const double remaining = static_cast<double>(n_ - taken_);
      const double step = -std::expm1(std::log(rng_.uniform_open01()) / remaining);
      const double u = u_ + (1.0 - u_) * step;
      const double y = scale_ * u;
      // Redraw on rounding ties and on the upper boundary.
      if (y > last_ && y < scale_) {
        u_ = u;
        last_ = y;
        ++taken_;
        return y;
      }
    }
  }

 private:
  std::size_t n_;
  double scale_;
  Rng& rng_;
  std::size_t taken_ = 0;
  double u_ = 0.0;
  double last_ = 0.0;
};

void check_sizes(std::size_t n, std::size_t q, double p, std::uint64_t trials) {
  if (n == 0) throw std::invalid_argument("n must be at least 1");
  if (q == 0) throw std::invalid_argument("Q must be at least 1");
  if (q > n) throw std::invalid_argument("Q must not exceed n");
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("contention load must be positive and finite");
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
}

template <class Trial>
SummaryStats run_trials(std::uint64_t trials, std::uint64_t seed, RunOptions options, Trial&& trial) {
  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, trials));

  std::vector<Moments> partial(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      const std::uint64_t begin = trials * w / workers;
      const std::uint64_t end = trials * (w + 1) / workers;
      Moments m;
      for (std::uint64_t t = begin; t < end; ++t) {
        Rng rng = Rng::for_trial(seed, t);
        const std::uint64_t slots = trial(rng);
        m.sum += slots;
        m.sum_sq += static_cast<Wide>(slots) * slots;
      }
      partial[w] = m;
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  Moments total;
  for (const Moments& m : partial) {
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
  }

  SummaryStats stats;
  stats.trials = trials;
  stats.seed = seed;
  const double count = static_cast<double>(trials);
  stats.mean_slots = static_cast<double>(total.sum) / count;
  if (trials > 1) {
    // N * sum(x^2) - (sum x)^2, exact in 128-bit integers.
    const Wide scaled = static_cast<Wide>(trials) * total.sum_sq -
                       static_cast<Wide>(total.sum) * total.sum;
    const double variance = static_cast<double>(scaled) / (count * (count - 1.0));
    stats.std_error = std::sqrt(variance / count);
  }
  stats.ci95_half_width = 1.96 * stats.std_error;
  return stats;
}

}  // namespace

SummaryStats estimate(std::size_t n, std::size_t q, double p, std::uint64_t trials, std::uint64_t seed,
                      RunOptions options) {
  check_sizes(n, q, p, trials);
  return run_trials(trials, seed, options, [&](Rng& rng) -> std::uint64_t {
    return qselect_slots_sorted(n, p, q, OrderStatistics(n, rng));
  });
}

DiscreteTrial run_discrete_trial(const DiscreteMetricModel& pmf, std::size_t n, std::size_t q, double p, Rng& rng) {
  check_sizes(n, q, p, 1);
  DiscreteTrial trial;
  trial.levels.resize(n);
  for (auto& level : trial.levels) level = pmf.sample_level(rng);
  QSelectResult result = run_qselect(expand_levels(trial.levels, pmf, rng), p, q);
  trial.selected = std::move(result.selected);
  trial.slots = result.slots;
  return trial;
}

SummaryStats estimate_discrete(const DiscreteMetricModel& pmf, std::size_t n, std::size_t q, double p,
                               std::uint64_t trials, std::uint64_t seed, RunOptions options) {
  check_sizes(n, q, p, trials);
  return run_trials(trials, seed, options,
                    [&](Rng& rng) -> std::uint64_t { return run_discrete_trial(pmf, n, q, p, rng).slots; });
}

std::vector<SweepRow> sweep(std::span<const SweepPoint> grid, std::uint64_t trials, std::uint64_t seed,
                            const SeriesControl& ctl, RunOptions options) {
  if (grid.empty()) throw std::invalid_argument("sweep grid must not be empty");
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const SweepPoint& point : grid) {
    if (point.q == 0) throw std::invalid_argument("Q must be at least 1");
    SweepRow row;
    row.point = point;
    if (point.n && point.q == 1) {
      row.analytic = avg_slots_finite(*point.n, point.p);
    } else {
      row.analytic = avg_slots_q_recursive(static_cast<unsigned>(point.q), point.p, ctl);
    }
    if (point.n) row.simulated = estimate(*point.n, point.q, point.p, trials, seed, options);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace relaysel
