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

#ifndef RELAYSEL_PROTOCOL_HPP
#define RELAYSEL_PROTOCOL_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "relaysel/metrics.hpp"

namespace relaysel {

/// Sink broadcast after every slot.
enum class Feedback { Idle, Success, Collision };

/// 0 -> Idle, 1 -> Success, 2 or more -> Collision.
Feedback sink_feedback(std::size_t transmit_count);

/// Wire symbol of a feedback value: '0', '1' or 'e'.
char feedback_symbol(Feedback fb);

/// Which half of the last split the current interval is. Right is also used
/// whenever no collision is being resolved.
enum class Half { Left, Right };

char half_symbol(Half h);

/// One slot of a protocol run, in the normalized domain. `selected_count` is
/// the number of nodes selected once the slot's feedback has been applied.
struct TranscriptRecord {
  std::size_t slot_index = 0;
  double interval_start = 0.0;
  double interval_width = 0.0;
  Half sigma = Half::Right;
  Feedback feedback = Feedback::Idle;
  std::size_t selected_count = 0;

  bool operator==(const TranscriptRecord&) const = default;
};

using Transcript = std::vector<TranscriptRecord>;

/// Writes one line per record:
/// slot_index,interval_start,interval_width,sigma,feedback,selected_count
void write_transcript(std::ostream& out, const Transcript& transcript);

// --- Single best node ------------------------------------------------------

/// Metric-domain thresholds of the single-node algorithm. A node transmits
/// in the current slot iff lower < metric < upper. `floor` is the largest
/// value known to lie below the best metric.
struct SingleSelectState {
  double lower = 0.0;
  double upper = 0.0;
  double floor = 0.0;
  std::size_t slot = 1;
  bool collision_seen = false;
};

/// Thresholds for slot 1: lower = F_c^-1(p/n), upper = +inf (the supremum),
/// floor = the metric infimum.
SingleSelectState single_initial(const ContinuousMetricModel& model, std::size_t n, double p);

/// Applies the response to a non-success feedback. Throws std::logic_error on
/// Success, which ends the run instead.
SingleSelectState single_update(const SingleSelectState& state, Feedback fb, const ContinuousMetricModel& model,
                                std::size_t n, double p);

/// F_c^-1((F_c(a) + F_c(b)) / 2)
double split_threshold(double a, double b, const ContinuousMetricModel& model);

struct SingleResult {
  std::size_t winner = 0;
  std::size_t slots = 0;
};

/// Runs the single-node algorithm on raw metrics drawn from `model`.
SingleResult run_single(std::span<const double> metrics, const ContinuousMetricModel& model, double p,
                        Transcript* transcript = nullptr);

/// Runs the single-node algorithm on normalized metrics. The metrics are
/// mapped back to the uniform model (u = 1 - y/n) and driven through the
/// metric-domain thresholds.
SingleResult run_single(const NormalizedMetrics& y, double p, Transcript* transcript = nullptr);

// --- Best Q nodes ----------------------------------------------------------

/// State of the Q-node algorithm: nodes with start < y < start + width
/// transmit in the current slot.
struct QSelectState {
  std::size_t selected_count = 0;
  double start = 0.0;
  double width = 0.0;
  Half sigma = Half::Right;
  std::size_t slot = 1;
  std::vector<std::size_t> selected;
};

QSelectState q_initial(double p);

/// Applies the response rules for one slot's feedback. On Success the count
/// is incremented; the caller records who was selected.
QSelectState q_update(const QSelectState& state, Feedback fb, double p);

struct QSelectResult {
  std::vector<std::size_t> selected;  ///< node indices, best (smallest y) first
  std::size_t slots = 0;
};

/// Runs the Q-node algorithm until Q nodes are selected. Requires 1 <= Q <= n.
/// Intervals that reach past n are cut at n.
QSelectResult run_qselect(const NormalizedMetrics& y, double p, std::size_t q,
                          Transcript* transcript = nullptr);

/// Supplies node values in increasing order, one per call.
using SortedSource = std::function<double()>;

/// Slot count of the Q-node algorithm when the n node values arrive in
/// increasing order from `next_value`. Values are pulled only as far as the
/// probed intervals reach, so a run costs O(slots log n) instead of O(n)
/// per slot. Gives the same slots as run_qselect on the same values.
std::size_t qselect_slots_sorted(std::size_t n, double p, std::size_t q, const SortedSource& next_value);

/// Upper limit on slots for one run; exceeding it raises std::runtime_error.
std::size_t slot_budget(std::size_t n, double p);

}  // namespace relaysel

#endif  // RELAYSEL_PROTOCOL_HPP
