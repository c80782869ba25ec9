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

#include "relaysel/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace relaysel {

namespace {

void check_run_load(double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("contention load must be positive and finite");
}

[[noreturn]] void budget_exhausted(std::size_t budget) {
  throw std::runtime_error("selection did not finish within the slot budget of " + std::to_string(budget));
}

// Values of a finite population lie in (0, n); cut intervals at n.
void clip_to_population(QSelectState& state, std::size_t n) {
  const double end = static_cast<double>(n);
  if (state.start < end && state.start + state.width > end) state.width = end - state.start;
}

}  // namespace

Feedback sink_feedback(std::size_t transmit_count) {
  if (transmit_count == 0) return Feedback::Idle;
  if (transmit_count == 1) return Feedback::Success;
  return Feedback::Collision;
}

char feedback_symbol(Feedback fb) {
  switch (fb) {
    case Feedback::Idle:
      return '0';
    case Feedback::Success:
      return '1';
    case Feedback::Collision:
      return 'e';
  }
  return '?';
}

char half_symbol(Half h) { return h == Half::Left ? 'L' : 'R'; }

void write_transcript(std::ostream& out, const Transcript& transcript) {
  char line[160];
  for (const TranscriptRecord& r : transcript) {
    std::snprintf(line, sizeof line, "%zu,%.6g,%.6g,%c,%c,%zu\n", r.slot_index, r.interval_start,
                  r.interval_width, half_symbol(r.sigma), feedback_symbol(r.feedback), r.selected_count);
    out << line;
  }
}

std::size_t slot_budget(std::size_t n, double p) {
  // Idle sweep over (0, n) plus generous room for splitting.
  return 64 * n + static_cast<std::size_t>(std::ceil(static_cast<double>(n) / p)) + 1;
}

// ---------------------------------------------------------------------------
// Single best node

double split_threshold(double a, double b, const ContinuousMetricModel& model) {
  return model.inverse_ccdf((model.ccdf(a) + model.ccdf(b)) / 2.0);
}

SingleSelectState single_initial(const ContinuousMetricModel& model, std::size_t n, double p) {
  SingleSelectState s;
  s.lower = model.inverse_ccdf(p / static_cast<double>(n));
  s.upper = std::numeric_limits<double>::infinity();
  s.floor = model.infimum();
  s.slot = 1;
  s.collision_seen = false;
  return s;
}

SingleSelectState single_update(const SingleSelectState& state, Feedback fb, const ContinuousMetricModel& model,
                                std::size_t n, double p) {
  if (fb == Feedback::Success) throw std::logic_error("single_update: a success ends the run");
  SingleSelectState next = state;
  next.slot = state.slot + 1;
  if (fb == Feedback::Collision) {
    next.lower = split_threshold(state.lower, state.upper, model);
    next.floor = state.lower;
    next.collision_seen = true;
  } else if (!state.collision_seen) {
    // Idle phase; once (k+1) p / n reaches 1 the threshold clamps to the infimum.
    next.upper = state.lower;
    next.lower = model.inverse_ccdf(static_cast<double>(next.slot) * p / static_cast<double>(n));
    next.floor = model.infimum();
  } else {
    next.upper = state.lower;
    next.lower = split_threshold(state.floor, state.lower, model);
  }
  return next;
}

SingleResult run_single(std::span<const double> metrics, const ContinuousMetricModel& model, double p,
                        Transcript* transcript) {
  const std::size_t n = metrics.size();
  if (n == 0) throw std::invalid_argument("run_single: at least one node is required");
  check_run_load(p);
  if (p > static_cast<double>(n)) throw std::invalid_argument("run_single: contention load must not exceed n");

  const double scale = static_cast<double>(n);
  const std::size_t budget = slot_budget(n, p);
  SingleSelectState state = single_initial(model, n, p);
  for (;;) {
    std::size_t count = 0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (state.lower < metrics[i] && metrics[i] < state.upper) {
        ++count;
        last = i;
      }
    }
    const Feedback fb = sink_feedback(count);
    if (transcript) {
      const double start = scale * model.ccdf(state.upper);
      transcript->push_back({state.slot, start, scale * model.ccdf(state.lower) - start,
                             state.collision_seen ? Half::Left : Half::Right, fb,
                             fb == Feedback::Success ? std::size_t{1} : std::size_t{0}});
    }
    if (fb == Feedback::Success) return {last, state.slot};
    if (state.slot >= budget) budget_exhausted(budget);
    state = single_update(state, fb, model, n, p);
  }
}

SingleResult run_single(const NormalizedMetrics& y, double p, Transcript* transcript) {
  const double scale = static_cast<double>(y.node_count());
  std::vector<double> metrics;
  metrics.reserve(y.node_count());
  for (double v : y.values()) metrics.push_back(1.0 - v / scale);
  return run_single(metrics, ContinuousMetricModel::uniform(), p, transcript);
}

// ---------------------------------------------------------------------------
// Best Q nodes

QSelectState q_initial(double p) {
  QSelectState s;
  s.width = p;
  return s;
}

QSelectState q_update(const QSelectState& state, Feedback fb, double p) {
  QSelectState next = state;
  next.slot = state.slot + 1;
  if (fb == Feedback::Collision) {
    next.width = state.width / 2.0;
    next.sigma = Half::Left;
    return next;
  }
  next.start = state.start + state.width;
  if (state.sigma == Half::Left) {
    // Success: the right sibling holds at least one node. Idle: every
    // collided node is in the right sibling, so split it.
    if (fb == Feedback::Idle) {
      next.width = state.width / 2.0;
      next.sigma = Half::Left;
    } else {
      next.sigma = Half::Right;
    }
  } else {
    next.width = p;
    next.sigma = Half::Right;
  }
  if (fb == Feedback::Success) ++next.selected_count;
  return next;
}

QSelectResult run_qselect(const NormalizedMetrics& y, double p, std::size_t q, Transcript* transcript) {
  const std::size_t n = y.node_count();
  check_run_load(p);
  if (q < 1) throw std::invalid_argument("run_qselect: Q must be at least 1");
  if (q > n) throw std::invalid_argument("run_qselect: Q must not exceed the node count n");

  const std::size_t budget = slot_budget(n, p);
  const std::span<const double> values = y.values();
  QSelectState state = q_initial(p);
  clip_to_population(state, n);
  for (;;) {
    const double hi = state.start + state.width;
    std::size_t count = 0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (state.start < values[i] && values[i] < hi) {
        ++count;
        last = i;
      }
    }
    const Feedback fb = sink_feedback(count);
    QSelectState next = q_update(state, fb, p);
    if (fb == Feedback::Success) next.selected.push_back(last);
    clip_to_population(next, n);
    if (transcript) {
      transcript->push_back({state.slot, state.start, state.width, state.sigma, fb, next.selected_count});
    }
    if (next.selected_count == q) return {std::move(next.selected), state.slot};
    if (state.slot >= budget) budget_exhausted(budget);
    state = std::move(next);
  }
}

std::size_t qselect_slots_sorted(std::size_t n, double p, std::size_t q, const SortedSource& next_value) {
  check_run_load(p);
  if (q < 1) throw std::invalid_argument("qselect_slots_sorted: Q must be at least 1");
  if (q > n) throw std::invalid_argument("qselect_slots_sorted: Q must not exceed the node count n");

  const std::size_t budget = slot_budget(n, p);
  std::vector<double> seen;
  auto pull_past = [&](double bound) {
    while (seen.size() < n && (seen.empty() || seen.back() < bound)) {
      const double v = next_value();
      if (!seen.empty() && !(v > seen.back()))
        throw std::invalid_argument("qselect_slots_sorted: values must be strictly increasing");
      seen.push_back(v);
    }
  };

  QSelectState state = q_initial(p);
  clip_to_population(state, n);
  for (;;) {
    const double hi = state.start + state.width;
    pull_past(hi);
    const auto first = std::upper_bound(seen.begin(), seen.end(), state.start);
    const auto last = std::lower_bound(first, seen.end(), hi);
    const Feedback fb = sink_feedback(static_cast<std::size_t>(last - first));
    state.selected.clear();
    QSelectState next = q_update(state, fb, p);
    clip_to_population(next, n);
    if (next.selected_count == q) return state.slot;
    if (state.slot >= budget) budget_exhausted(budget);
    state = std::move(next);
  }
}

}  // namespace relaysel
