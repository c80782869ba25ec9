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

#ifndef RELAYSEL_OPTIMIZE_HPP
#define RELAYSEL_OPTIMIZE_HPP

#include <cstddef>
#include <vector>

#include "relaysel/analysis.hpp"

namespace relaysel {

struct Bracket {
  double low = 0.5;
  double high = 2.0;
};

/// Optimal contention load for one Q.
struct OptimumRow {
  unsigned q = 1;
  double pe_star = 0.0;
  double m_star = 0.0;
  /// 1 - m_star / (Q * m^[1] at its own optimum); zero for Q = 1.
  double improvement = 0.0;
  /// True when the coarse scan found the objective not unimodal on the
  /// bracket (or the minimum on an edge) and a full grid scan was used.
  bool grid_fallback = false;
};

/// Minimizes m^[Q](p) over the bracket to |dp| < xtol.
///
/// A coarse scan first checks that the objective falls then rises. If it
/// does, Brent's method refines the minimum between the scan points around
/// the best sample. Otherwise the bracket is scanned with step xtol.
OptimumRow optimal_pe(unsigned q, Bracket bracket = {}, double xtol = 1e-4, const SeriesControl& ctl = {});

/// Rows for Q = 1..q_max on the default bracket; improvements are measured
/// against the computed Q = 1 optimum.
std::vector<OptimumRow> table1(unsigned q_max, const SeriesControl& ctl = {});

/// Relative penalty of the greedy setting p = 1:
/// (m^[Q](1) - m^[Q](p*)) / m^[Q](p*).
double greedy_gap(unsigned q, const SeriesControl& ctl = {});

}  // namespace relaysel

#endif  // RELAYSEL_OPTIMIZE_HPP
