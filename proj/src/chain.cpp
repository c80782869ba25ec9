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

// Markov-chain forms of m^[1] and m^[2]. State i is the i-th split after the
// first non-idle slot; the interval there has width 2^-i p.

#include <cmath>
#include <string>

#include "relaysel/analysis.hpp"
#include "series_detail.hpp"

namespace relaysel {

namespace {

using detail::check_load;
using detail::idle_phase_slots;

// Pr(N(z) >= 2) = 1 - (1 + z) e^-z. The direct form cancels to zero once
// z is below ~1e-8, and deep states reach z ~ 2^-40 p.
double at_least_two(double z) {
  if (z > 0.5) return -std::expm1(-z) - z * std::exp(-z);
  // sum_{m>=2} (-1)^m (m - 1) z^m / m!
  double power_over_factorial = z;  // z^1 / 1!
  double sum = 0.0;
  for (int m = 2; m <= 30; ++m) {
    power_over_factorial *= z / m;
    const double term = (m - 1) * power_over_factorial;
    sum += (m % 2 == 0) ? term : -term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// P_0 = p e^-p / (1 - e^-p): exactly one node given at least one.
double first_success(double p) { return p / std::expm1(p); }

// 1 - P_0 = (e^p - 1 - p) / (e^p - 1), without the cancellation for small p.
double first_failure(double p) {
  double excess;  // e^p - 1 - p
  if (p > 0.1) {
    excess = std::expm1(p) - p;
  } else {
    double power_over_factorial = p;
    excess = 0.0;
    for (int m = 2; m <= 20; ++m) {
      power_over_factorial *= p / m;
      excess += power_over_factorial;
    }
  }
  return excess / std::expm1(p);
}

// P_{L,i}: exactly one node in the left half given at least two in the parent.
double left_success(double p, int depth) {
  const double x = std::ldexp(p, -depth);
  return x * std::exp(-x) * -std::expm1(-x) / at_least_two(2.0 * x);
}

// 1 - P_{R,i} = Pr(N(x) >= 2) / Pr(N(x) >= 1) for a right half known non-empty.
double right_failure(double p, int depth) {
  const double x = std::ldexp(p, -depth);
  return at_least_two(x) / -std::expm1(-x);
}

void check_terms(int terms) {
  if (terms < 0) throw std::invalid_argument("number of series terms must be non-negative");
}

ConvergenceError chain_not_converged(const char* which, double p, int cap) {
  return ConvergenceError(std::string(which) + " chain at p_e=" + std::to_string(p) + " did not reach tolerance within " +
                          std::to_string(cap) + " states");
}

}  // namespace

ChainProbabilities chain_probabilities_q1(double p, const SeriesControl& ctl) {
  check_load(p);
  ctl.validate();
  ChainProbabilities chain;
  chain.contention_load = p;
  chain.first_success = first_success(p);
  double visit = first_failure(p);  // p(1)
  for (int i = 1; i <= ctl.max_terms; ++i) {
    const double success = left_success(p, i);
    chain.left_success.push_back(success);
    chain.visit.push_back(visit);
    if (visit < ctl.tol) return chain;
    visit *= 1.0 - success;
  }
  throw chain_not_converged("single-node", p, ctl.max_terms);
}

double avg_slots_asym_markov(double p, const SeriesControl& ctl) {
  check_load(p);
  if (p < 1e-6) return idle_phase_slots(p);
  const ChainProbabilities chain = chain_probabilities_q1(p, ctl);
  double sum = 0.0;
  for (double v : chain.visit) sum += v;
  return idle_phase_slots(p) + sum;
}

ChainProbabilities chain_probabilities_q2(double p, const SeriesControl& ctl) {
  check_load(p);
  ctl.validate();
  ChainProbabilities chain;
  chain.contention_load = p;
  chain.first_success = first_success(p);

  double visit = first_failure(p);  // p(i)
  double after = 0.0;               // p''(i); p''(1) = 0
  // One state beyond the cut is kept so that p''(I + 1) is available.
  bool cut = false;
  for (int i = 1; i <= ctl.max_terms + 1; ++i) {
    const double left = left_success(p, i);
    const double right_fail = right_failure(p, i);
    const double first = visit * left;  // p'(i)
    chain.left_success.push_back(left);
    chain.right_success.push_back(1.0 - right_fail);
    chain.visit.push_back(visit);
    chain.visit_first.push_back(first);
    chain.visit_after.push_back(after);
    if (cut) return chain;
    if (visit + first + after < ctl.tol) cut = true;
    after = first * right_fail + after * (1.0 - left);
    visit *= 1.0 - left;
  }
  throw chain_not_converged("two-node", p, ctl.max_terms);
}

namespace {

// Sum of p(i) + p'(i) + p''(i+1) over the first `states` states.
double two_node_visits(const ChainProbabilities& chain, std::size_t states) {
  double sum = 0.0;
  for (std::size_t i = 0; i < states; ++i) {
    sum += chain.visit[i] + chain.visit_first[i] + chain.visit_after[i + 1];
  }
  return sum;
}

}  // namespace

double avg_slots_q2_markov(double p, const SeriesControl& ctl) {
  check_load(p);
  if (p < 1e-6) return 2.0 * idle_phase_slots(p);
  const ChainProbabilities chain = chain_probabilities_q2(p, ctl);
  const double single = avg_slots_q_recursive(1, p, ctl);
  return idle_phase_slots(p) + chain.first_success * single + two_node_visits(chain, chain.visit.size() - 1);
}

double avg_slots_markov_truncated(unsigned q, double p, int terms, const SeriesControl& ctl) {
  check_load(p);
  check_terms(terms);
  ctl.validate();
  const auto states = static_cast<std::size_t>(terms);
  if (q == 1) {
    double visit = first_failure(p);
    double sum = 0.0;
    for (std::size_t i = 1; i <= states; ++i) {
      sum += visit;
      visit *= 1.0 - left_success(p, static_cast<int>(i));
    }
    return idle_phase_slots(p) + sum;
  }
  if (q == 2) {
    double visit = first_failure(p);
    double after = 0.0;
    double sum = 0.0;
    for (std::size_t i = 1; i <= states; ++i) {
      const double left = left_success(p, static_cast<int>(i));
      const double first = visit * left;
      const double next_after = first * right_failure(p, static_cast<int>(i)) + after * (1.0 - left);
      sum += visit + first + next_after;
      after = next_after;
      visit *= 1.0 - left;
    }
    return idle_phase_slots(p) + first_success(p) * avg_slots_q_recursive(1, p, ctl) + sum;
  }
  throw std::invalid_argument("Markov-chain form is available for Q = 1 and Q = 2 only");
}

}  // namespace relaysel
