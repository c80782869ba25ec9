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

#ifndef RELAYSEL_SRC_SERIES_DETAIL_HPP
#define RELAYSEL_SRC_SERIES_DETAIL_HPP

namespace relaysel::detail {

/// Throws std::invalid_argument unless p is positive and finite.
void check_load(double p);

/// Expected idle-phase length 1 / (1 - e^-p).
double idle_phase_slots(double p);

}  // namespace relaysel::detail

#endif  // RELAYSEL_SRC_SERIES_DETAIL_HPP
