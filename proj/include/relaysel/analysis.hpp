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

// Closed-form average slot counts for splitting-based selection of the best
// Q of n nodes.
//
// Notation used in the comments:
//   p      contention load (expected transmitters per idle-phase slot)
//   E_k    expected slots to finish after a collision among k nodes;
//          E_k^[1] is the single-node resolution time, E_k^[Q] the time to
//          finish selecting Q nodes
//   m^[Q]  asymptotic (n -> inf) average slots to select the best Q nodes
//
// Everything here is a pure function of its arguments. Intermediate tables
// are memoized behind locks, so concurrent callers are safe.

#ifndef RELAYSEL_ANALYSIS_HPP
#define RELAYSEL_ANALYSIS_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace relaysel {

/// Thrown when a series does not reach its truncation tolerance within the
/// permitted number of terms.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Truncation policy for the infinite series.
struct SeriesControl {
  double tol = 1e-12;    ///< absolute truncation tolerance
  int max_terms = 200;   ///< hard cap on the number of series terms

  /// Throws std::invalid_argument unless tol > 0 and max_terms >= 10.
  void validate() const;
};

/// E_k^[Q] for k = 1..values.size() at a fixed contention load.
/// For Q = 1 the table is independent of p and E_1 = 0.
struct CollisionTable {
  unsigned q = 1;
  double contention_load = 0.0;
  std::vector<double> values;  ///< values[k - 1] = E_k^[Q]

  double at(std::size_t k) const { return values.at(k - 1); }
};

/// Success and visit probabilities of the Markov chains that track the slots
/// after the first non-idle slot.
///
/// For the single-node chain only `left_success` and `visit` are filled. For
/// the two-node chain all vectors are filled. Index i - 1 holds state i.
struct ChainProbabilities {
  double contention_load = 0.0;
  double first_success = 0.0;          ///< P_0: success in the first non-idle slot
  std::vector<double> left_success;    ///< P_i (= P_{L,i}): success in a left half at depth i
  std::vector<double> right_success;   ///< P_{R,i}: success in a right half known to be non-empty
  std::vector<double> visit;           ///< p(i): no success yet, depth i reached
  std::vector<double> visit_first;     ///< p'(i): first success happened at depth i
  std::vector<double> visit_after;     ///< p''(i): first success already behind, depth i reached
};

// --- Single-node selection -------------------------------------------------

/// E[X_k]: expected slots to resolve a collision among k nodes (k >= 1).
/// E[X_1] = 0 and E[X_2] = 2. Memoized; stable for k in the thousands.
double collision_slots_q1(std::size_t k);

/// Exact average slots for n nodes (finite sum over an idle
/// phase of q = ceil(n/p) - 1 slots). Requires n >= 1 and 0 < p <= n.
double avg_slots_finite(std::size_t n, double p);

/// m^[1](p) from the recursive (Poisson-weighted) series.
double avg_slots_asym_recursive(double p, const SeriesControl& ctl = {});

/// Single-node chain: P_0, P_i and p(i) until p(i) < ctl.tol.
ChainProbabilities chain_probabilities_q1(double p, const SeriesControl& ctl = {});

/// m^[1](p) from the non-recursive (Markov chain) series.
double avg_slots_asym_markov(double p, const SeriesControl& ctl = {});

/// Closed-form upper bound on m^[1](p) from a tangent to log2 at k0 >= e/2.
double upper_bound(double p, double k0);

// --- Q-node selection ------------------------------------------------------

/// E_k^[Q] for Q >= 2 (Q = 1 delegates to collision_slots_q1).
double collision_slots_q(std::size_t k, unsigned q, double p, const SeriesControl& ctl = {});

/// The table E_1^[Q] .. E_K^[Q] for K = count.
CollisionTable collision_table(unsigned q, double p, std::size_t count, const SeriesControl& ctl = {});

/// m^[Q](p) from the recursive series. Q = 1 gives avg_slots_asym_recursive.
double avg_slots_q_recursive(unsigned q, double p, const SeriesControl& ctl = {});

/// Two-node chain: P_0, P_{L,i}, P_{R,i}, p(i), p'(i), p''(i) until
/// p(i) + p'(i) + p''(i) < ctl.tol.
ChainProbabilities chain_probabilities_q2(double p, const SeriesControl& ctl = {});

/// m^[2](p) from the non-recursive (Markov chain) series.
double avg_slots_q2_markov(double p, const SeriesControl& ctl = {});

/// Q / m^[Q](p): nodes selected per slot.
double throughput(unsigned q, double p, const SeriesControl& ctl = {});

// --- Truncated series (lower bounds) ---------------------------------------

/// Recursive series kept to its first `terms` terms. Lower bound on m^[Q].
double avg_slots_recursive_truncated(unsigned q, double p, int terms, const SeriesControl& ctl = {});

/// Markov series kept to its first `terms` states (Q in {1, 2}). Lower bound.
double avg_slots_markov_truncated(unsigned q, double p, int terms, const SeriesControl& ctl = {});

}  // namespace relaysel

#endif  // RELAYSEL_ANALYSIS_HPP
