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

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "relaysel/analysis.hpp"
#include "relaysel/optimize.hpp"

namespace relaysel {
namespace {

struct Expected {
  double pe;
  double m;
  double improvement_pct;
};

const Expected kRows[] = {
    {1.088, 2.467, 0.0}, {1.221, 4.406, 10.7}, {1.214, 6.491, 12.3},
    {1.231, 8.537, 13.5}, {1.236, 10.592, 14.1}, {1.241, 12.645, 14.6},
};

TEST(OptimalPeTest, SingleNode) {
  const OptimumRow r = optimal_pe(1);
  EXPECT_NEAR(r.pe_star, 1.088, 0.002);
  EXPECT_NEAR(r.m_star, 2.467, 0.001);
  EXPECT_EQ(r.improvement, 0.0);
  EXPECT_FALSE(r.grid_fallback);
}

TEST(OptimalPeTest, TwoAndFiveNodes) {
  const OptimumRow two = optimal_pe(2);
  EXPECT_NEAR(two.pe_star, 1.221, 0.002);
  EXPECT_NEAR(two.m_star, 4.406, 0.002);
  EXPECT_NEAR(100.0 * two.improvement, 10.7, 0.2);
  const OptimumRow five = optimal_pe(5);
  EXPECT_NEAR(five.pe_star, 1.236, 0.002);
  EXPECT_NEAR(five.m_star, 10.592, 0.005);
  EXPECT_NEAR(100.0 * five.improvement, 14.1, 0.2);
}

TEST(OptimalPeTest, Preconditions) {
  EXPECT_THROW(optimal_pe(0), std::invalid_argument);
  EXPECT_THROW(optimal_pe(1, Bracket{2.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(optimal_pe(1, Bracket{0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(optimal_pe(1, Bracket{1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(optimal_pe(1, Bracket{0.5, 2.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(optimal_pe(1, Bracket{0.5, 2.0}, 5.0), std::invalid_argument);
}

TEST(OptimalPeTest, EdgeMinimumFallsBackToGrid) {
  const OptimumRow r = optimal_pe(1, Bracket{1.5, 2.0}, 1e-3);
  EXPECT_TRUE(r.grid_fallback);
  EXPECT_NEAR(r.pe_star, 1.5, 1e-12);
  EXPECT_DOUBLE_EQ(r.m_star, avg_slots_asym_recursive(1.5));
}

TEST(OptimalPeTest, TightToleranceRefines) {
  const OptimumRow coarse = optimal_pe(1, Bracket{}, 1e-2);
  const OptimumRow fine = optimal_pe(1, Bracket{}, 1e-6);
  EXPECT_NEAR(coarse.pe_star, fine.pe_star, 1e-2);
  EXPECT_LE(fine.m_star, coarse.m_star + 1e-12);
}

TEST(Table1Test, SixRows) {
  const auto rows = table1(6);
  ASSERT_EQ(rows.size(), 6u);
  for (unsigned q = 1; q <= 6; ++q) {
    const OptimumRow& r = rows[q - 1];
    const Expected& e = kRows[q - 1];
    EXPECT_EQ(r.q, q);
    EXPECT_NEAR(r.pe_star, e.pe, 0.005) << q;
    EXPECT_NEAR(r.m_star, e.m, 0.005) << q;
    EXPECT_NEAR(100.0 * r.improvement, e.improvement_pct, 0.2) << q;
    EXPECT_FALSE(r.grid_fallback) << q;
  }
}

TEST(Table1Test, SmallTables) {
  const auto one = table1(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].improvement, 0.0);
  const auto three = table1(3);
  ASSERT_EQ(three.size(), 3u);
  EXPECT_NEAR(100.0 * three[2].improvement, 12.3, 0.2);
  EXPECT_THROW(table1(0), std::invalid_argument);
}

TEST(Table1Test, OptimumProperties) {
  const auto rows = table1(6);
  for (const OptimumRow& r : rows) {
    EXPECT_LE(r.pe_star, 2.0);
    EXPECT_GE(avg_slots_q_recursive(r.q, r.pe_star - 0.05), r.m_star);
    EXPECT_GE(avg_slots_q_recursive(r.q, r.pe_star + 0.05), r.m_star);
    if (r.q >= 2) {
      EXPECT_GE(r.pe_star, 1.21);
      EXPECT_LE(r.pe_star, 1.25);
      EXPECT_GT(r.m_star, rows[r.q - 2].m_star);
    }
  }
  // The three-node optimum sits slightly below the two-node one.
  EXPECT_LT(rows[2].pe_star, rows[1].pe_star);
}

TEST(Table1Test, LargeQApproachesLimit) {
  const OptimumRow r = optimal_pe(20);
  EXPECT_GE(r.pe_star, 1.24);
  EXPECT_LE(r.pe_star, 1.266);
}

TEST(GreedyGapTest, Values) {
  const double g1 = greedy_gap(1);
  EXPECT_GT(g1, 0.0);
  EXPECT_LT(g1, 0.01);
  EXPECT_GT(greedy_gap(6), g1);
  for (unsigned q = 1; q <= 6; ++q) EXPECT_GE(greedy_gap(q), 0.0) << q;
}

}  // namespace
}  // namespace relaysel
