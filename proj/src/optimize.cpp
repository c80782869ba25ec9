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

#include "relaysel/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

namespace relaysel {

namespace {

constexpr int kCoarsePoints = 41;

struct Minimum {
  double x;
  double value;
  bool grid_fallback;
};

template <class Fn>
Minimum minimize_on(Fn&& f, Bracket bracket, double xtol) {
  std::vector<double> xs(kCoarsePoints);
  std::vector<double> fs(kCoarsePoints);
  const double step = (bracket.high - bracket.low) / (kCoarsePoints - 1);
  for (int i = 0; i < kCoarsePoints; ++i) {
    xs[i] = i + 1 == kCoarsePoints ? bracket.high : bracket.low + i * step;
    fs[i] = f(xs[i]);
  }
  const auto best = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());

  bool unimodal = best > 0 && best + 1 < kCoarsePoints;
  for (int i = 0; unimodal && i < best; ++i) unimodal = fs[i] >= fs[i + 1];
  for (int i = best; unimodal && i + 1 < kCoarsePoints; ++i) unimodal = fs[i] <= fs[i + 1];

  if (unimodal) {
    // Relative precision of Brent's method in bits; enough to resolve xtol.
    const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(xtol / bracket.high))) + 2, 8,
                                std::numeric_limits<double>::digits / 2);
    std::uintmax_t max_iter = 500;
    auto [x, value] =
        boost::math::tools::brent_find_minima(f, xs[best - 1], xs[best + 1], bits, max_iter);
    return {x, value, false};
  }

  Minimum scan{bracket.low, f(bracket.low), true};
  const auto steps = static_cast<std::int64_t>(std::ceil((bracket.high - bracket.low) / xtol));
  for (std::int64_t i = 1; i <= steps; ++i) {
    const double x = std::min(bracket.high, bracket.low + static_cast<double>(i) * xtol);
    const double value = f(x);
    if (value < scan.value) {
      scan.x = x;
      scan.value = value;
    }
  }
  return scan;
}

void check_bracket(Bracket bracket, double xtol) {
  if (!(bracket.low > 0.0) || !(bracket.low < bracket.high) || !std::isfinite(bracket.high))
    throw std::invalid_argument("bracket must satisfy 0 < low < high");
  if (!(xtol > 0.0) || !(xtol < bracket.high - bracket.low))
    throw std::invalid_argument("xtol must be positive and smaller than the bracket");
}

OptimumRow optimum_for(unsigned q, Bracket bracket, double xtol, const SeriesControl& ctl) {
  auto objective = [q, &ctl](double p) { return avg_slots_q_recursive(q, p, ctl); };
  const Minimum m = minimize_on(objective, bracket, xtol);
  OptimumRow row;
  row.q = q;
  row.pe_star = m.x;
  row.m_star = m.value;
  row.grid_fallback = m.grid_fallback;
  return row;
}

}  // namespace

OptimumRow optimal_pe(unsigned q, Bracket bracket, double xtol, const SeriesControl& ctl) {
  if (q < 1) throw std::invalid_argument("Q must be at least 1");
  check_bracket(bracket, xtol);
  ctl.validate();
  OptimumRow row = optimum_for(q, bracket, xtol, ctl);
  if (q > 1) {
    const OptimumRow single = optimum_for(1, bracket, xtol, ctl);
    row.improvement = 1.0 - row.m_star / (q * single.m_star);
  }
  return row;
}

std::vector<OptimumRow> table1(unsigned q_max, const SeriesControl& ctl) {
  if (q_max < 1) throw std::invalid_argument("q_max must be at least 1");
  ctl.validate();
  const Bracket bracket;
  const double xtol = 1e-4;
  std::vector<OptimumRow> rows;
  rows.reserve(q_max);
  for (unsigned q = 1; q <= q_max; ++q) {
    OptimumRow row = optimum_for(q, bracket, xtol, ctl);
    if (q > 1) row.improvement = 1.0 - row.m_star / (q * rows.front().m_star);
    rows.push_back(row);
  }
  return rows;
}

double greedy_gap(unsigned q, const SeriesControl& ctl) {
  const OptimumRow best = optimal_pe(q, Bracket{}, 1e-4, ctl);
  const double greedy = avg_slots_q_recursive(q, 1.0, ctl);
  return (greedy - best.m_star) / best.m_star;
}

}  // namespace relaysel
