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

#include "relaysel/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <tuple>

#include "series_detail.hpp"

namespace relaysel {

void SeriesControl::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw std::invalid_argument("series tol must be positive");
  if (max_terms < 10) throw std::invalid_argument("series max_terms must be at least 10");
}

namespace detail {

void check_load(double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("contention load must be positive and finite, got " + std::to_string(p));
}

double idle_phase_slots(double p) { return -1.0 / std::expm1(-p); }

}  // namespace detail

namespace {

using detail::check_load;
using detail::idle_phase_slots;

// Below this load the idle phase dominates every other contribution.
constexpr double kSmallLoad = 1e-6;

// Weighted sum  sum_{i=2}^{k-1} C(k,i) 2^-k values[i-1]. The binomial weights
// are carried as a running log so no factorial or 2^k is ever formed.
template <class Lookup>
double binomial_half_sum(std::size_t k, Lookup&& value_at) {
  const double kd = static_cast<double>(k);
  double log_weight = -kd * std::numbers::ln2 + std::log(kd);  // i = 1
  double sum = 0.0;
  for (std::size_t i = 2; i + 1 <= k; ++i) {
    log_weight += std::log((kd - static_cast<double>(i) + 1.0) / static_cast<double>(i));
    sum += std::exp(log_weight) * value_at(i);
  }
  return sum;
}

// E[X_k] memo, shared by every caller. Grows on demand.
class SingleResolutionTable {
 public:
  double get(std::size_t k) {
    {
      std::shared_lock lock(mutex_);
      if (k <= values_.size()) return values_[k - 1];
    }
    std::unique_lock lock(mutex_);
    while (values_.size() < k) {
      const std::size_t next = values_.size() + 1;
      const double weighted = binomial_half_sum(next, [this](std::size_t i) { return values_[i - 1]; });
      values_.push_back((weighted + 1.0) / -std::expm1(-static_cast<double>(next - 1) * std::numbers::ln2));
    }
    return values_[k - 1];
  }

 private:
  std::shared_mutex mutex_;
  std::vector<double> values_{0.0};
};

SingleResolutionTable& single_table() {
  static SingleResolutionTable table;
  return table;
}

// All E_k^[q] and m^[q] for q up to whatever has been requested, at one load.
// E_k^[q] for q >= 2 couples to the load through its base cases
// E_1^[q] = m^[q-1] and E_2^[q] = m^[q-2] + 3, so a ladder is per load.
class Ladder {
 public:
  Ladder(double p, const SeriesControl& ctl) : p_(p), ctl_(ctl), means_{0.0} {}

  double entry(unsigned q, std::size_t k) {
    if (q == 1) return single_table().get(k);
    while (tables_.size() <= q) tables_.emplace_back();
    while (tables_[q].size() < k) {
      const std::size_t next = tables_[q].size() + 1;
      const double value = compute_entry(q, next);
      tables_[q].push_back(value);
    }
    return tables_[q][k - 1];
  }

  double mean(unsigned q) {
    while (means_.size() <= q) {
      const auto next = static_cast<unsigned>(means_.size());
      const double value = compute_mean(next);
      means_.push_back(value);
    }
    return means_[q];
  }

  // Idle term plus the first `terms` terms of the series for m^[q].
  double truncated_mean(unsigned q, int terms) {
    double t = 1.0 / std::expm1(p_);
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k) {
      t *= p_ / k;
      sum += entry(q, static_cast<std::size_t>(k)) * t;
    }
    return sum + idle_phase_slots(p_);
  }

 private:
  double compute_entry(unsigned q, std::size_t k) {
    if (k == 1) return mean(q - 1);
    if (k == 2) return mean(q - 2) + 3.0;
    // (2^k - 2) E_k = sum_{i=2}^{k-1} C(k,i) E_i + k (1 + E_{k-1}^[q-1]) + 2^k, divided through by 2^k.
    const double cross = entry(q - 1, k - 1);
    const double kd = static_cast<double>(k);
    const double weighted = binomial_half_sum(k, [this, q](std::size_t i) { return tables_[q][i - 1]; });
    const double cross_term = kd * std::exp2(-kd) * (1.0 + cross);
    return (weighted + cross_term + 1.0) / -std::expm1(-(kd - 1.0) * std::numbers::ln2);
  }

  // m^[q] = 1/(1 - e^-p) + (e^p - 1)^-1 sum_k E_k^[q] p^k / k!
  //
  // Truncation is certified: with E_j <= s * j for j beyond the cut,
  //   sum_{j>K} E_j t_j <= s p sum_{j>=K} t_j <= s p t_K / (1 - p/(K+1)).
  // For q = 1, E_j <= log2(j) + 1 <= j gives s = 1. For q >= 2 the slope s is
  // the largest E_j / j seen so far; E_j^[q] grows logarithmically in j.
  double compute_mean(unsigned q) {
    if (q == 0) return 0.0;
    if (p_ < kSmallLoad) return q * idle_phase_slots(p_);
    double t = 1.0 / std::expm1(p_);
    double sum = 0.0;
    double slope = 1.0;
    for (int k = 1; k <= ctl_.max_terms; ++k) {
      const double kd = static_cast<double>(k);
      t *= p_ / kd;
      const double e = entry(q, static_cast<std::size_t>(k));
      if (q > 1) slope = std::max(slope, e / kd);
      const double term = e * t;
      sum += term;
      const double ratio = p_ / (kd + 1.0);
      if (ratio < 1.0 && term < ctl_.tol) {
        const double tail = slope * p_ * t / (1.0 - ratio);
        if (tail < ctl_.tol) return sum + idle_phase_slots(p_);
      }
    }
    throw ConvergenceError("recursive series for Q=" + std::to_string(q) + " at p_e=" + std::to_string(p_) +
                           " did not converge within " + std::to_string(ctl_.max_terms) + " terms");
  }

  double p_;
  SeriesControl ctl_;
  std::vector<double> means_;                // means_[q] = m^[q], means_[0] = 0
  std::vector<std::vector<double>> tables_;  // tables_[q][k-1] = E_k^[q], q >= 2
};

// Ladders keyed by (load bits, tol bits, max_terms). Each carries its own lock;
// results are deterministic, so a cleared cache only costs recomputation.
class LadderCache {
 public:
  struct Slot {
    std::mutex mutex;
    Ladder ladder;
    Slot(double p, const SeriesControl& ctl) : ladder(p, ctl) {}
  };

  std::shared_ptr<Slot> get(double p, const SeriesControl& ctl) {
    const Key key{std::bit_cast<std::uint64_t>(p), std::bit_cast<std::uint64_t>(ctl.tol), ctl.max_terms};
    std::lock_guard lock(mutex_);
    auto it = slots_.find(key);
    if (it != slots_.end()) return it->second;
    if (slots_.size() >= kCapacity) slots_.clear();
    auto slot = std::make_shared<Slot>(p, ctl);
    slots_.emplace(key, slot);
    return slot;
  }

 private:
  using Key = std::tuple<std::uint64_t, std::uint64_t, int>;
  static constexpr std::size_t kCapacity = 4096;
  std::mutex mutex_;
  std::map<Key, std::shared_ptr<Slot>> slots_;
};

LadderCache& ladder_cache() {
  static LadderCache cache;
  return cache;
}

template <class Fn>
auto with_ladder(double p, const SeriesControl& ctl, Fn&& fn) {
  auto slot = ladder_cache().get(p, ctl);
  std::lock_guard lock(slot->mutex);
  return fn(slot->ladder);
}

void check_q(unsigned q) {
  if (q < 1) throw std::invalid_argument("Q must be at least 1");
}

}  // namespace

double collision_slots_q1(std::size_t k) {
  if (k == 0) throw std::invalid_argument("collision size k must be at least 1");
  return single_table().get(k);
}

double avg_slots_finite(std::size_t n, double p) {
  if (n == 0) throw std::invalid_argument("node count n must be at least 1");
  check_load(p);
  const double nd = static_cast<double>(n);
  if (p > nd) throw std::invalid_argument("contention load must not exceed n");

  // Idle phase of q slots; slot q+1 covers whatever remains of (0, n).
  auto q = static_cast<std::size_t>(std::ceil(nd / p)) - 1;
  if (q > 0 && static_cast<double>(q) * p >= nd) --q;

  const double a = p / nd;
  double total = 0.0;
  for (std::size_t i = 1; i <= q; ++i) {
    const double id = static_cast<double>(i);
    const double log_b = std::log1p(-id * a);  // b = 1 - i p / n
    const double log_ratio = std::log(a) - log_b;
    double log_weight = nd * log_b;  // C(n,0) a^0 b^n
    double slot_sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double kd = static_cast<double>(k);
      log_weight += std::log((nd - kd + 1.0) / kd) + log_ratio;
      slot_sum += std::exp(log_weight) * (collision_slots_q1(k) + id);
    }
    total += slot_sum;
  }
  const double last = std::exp(nd * std::log1p(-static_cast<double>(q) * a));
  total += last * (collision_slots_q1(n) + static_cast<double>(q) + 1.0);
  return total;
}

double avg_slots_asym_recursive(double p, const SeriesControl& ctl) {
  return avg_slots_q_recursive(1, p, ctl);
}

double upper_bound(double p, double k0) {
  check_load(p);
  if (!(k0 >= std::numbers::e / 2.0) || !std::isfinite(k0))
    throw std::invalid_argument("tangent point k0 must be at least e/2");
  return p / (k0 * std::numbers::ln2) + std::log2(2.0 * k0 / std::numbers::e) + idle_phase_slots(p);
}

double collision_slots_q(std::size_t k, unsigned q, double p, const SeriesControl& ctl) {
  if (k == 0) throw std::invalid_argument("collision size k must be at least 1");
  check_q(q);
  if (q == 1) return collision_slots_q1(k);
  check_load(p);
  ctl.validate();
  return with_ladder(p, ctl, [&](Ladder& ladder) { return ladder.entry(q, k); });
}

CollisionTable collision_table(unsigned q, double p, std::size_t count, const SeriesControl& ctl) {
  check_q(q);
  CollisionTable table;
  table.q = q;
  table.contention_load = p;
  table.values.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) table.values.push_back(collision_slots_q(k, q, p, ctl));
  return table;
}

double avg_slots_q_recursive(unsigned q, double p, const SeriesControl& ctl) {
  check_q(q);
  check_load(p);
  ctl.validate();
  return with_ladder(p, ctl, [&](Ladder& ladder) { return ladder.mean(q); });
}

double throughput(unsigned q, double p, const SeriesControl& ctl) {
  return static_cast<double>(q) / avg_slots_q_recursive(q, p, ctl);
}

double avg_slots_recursive_truncated(unsigned q, double p, int terms, const SeriesControl& ctl) {
  check_q(q);
  check_load(p);
  ctl.validate();
  if (terms < 0) throw std::invalid_argument("number of series terms must be non-negative");
  return with_ladder(p, ctl, [&](Ladder& ladder) { return ladder.truncated_mean(q, terms); });
}

}  // namespace relaysel
