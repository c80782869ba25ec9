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

#ifndef RELAYSEL_RNG_HPP
#define RELAYSEL_RNG_HPP

#include <cstdint>
#include <limits>

namespace relaysel {

/// SplitMix64 stream. Satisfies UniformRandomBitGenerator, so it plugs into
/// <random> distributions, but the helpers below are used in hot paths
/// because their output is bit-identical across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Counter-based stream for one Monte Carlo trial. The stream depends only
  /// on (seed, index), so results do not depend on how trials are scheduled.
  static Rng for_trial(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix(mix(seed) ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL)));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); zero draws are rejected.
  double uniform_open01() {
    for (;;) {
      double u = uniform01();
      if (u > 0.0) return u;
    }
  }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace relaysel

#endif  // RELAYSEL_RNG_HPP
