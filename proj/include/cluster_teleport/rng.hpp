// Copyright 2026 The cluster-teleport Authors
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

#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace cluster_teleport {

/// Seedable generator used by every protocol run.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// derives doubles from the top 53 bits, so a seed reproduces the same draws
/// on every conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, stream), e.g. one per Monte Carlo trial.
  static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(std::mt19937_64(seq));
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Inverse-CDF draw over `probabilities` in order. Entries at or below
  /// `floor` are never selected.
  std::size_t sample(std::span<const double> probabilities, double floor) {
    double total = 0.0;
    for (double p : probabilities) {
      if (p > floor) total += p;
    }
    const double target = uniform() * total;
    double cumulative = 0.0;
    std::size_t last = probabilities.size();
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
      if (probabilities[i] <= floor) continue;
      last = i;
      cumulative += probabilities[i];
      if (target < cumulative) return i;
    }
    return last;
  }

 private:
  explicit Rng(std::mt19937_64 engine) : engine_(engine) {}

  std::mt19937_64 engine_;
};

}  // namespace cluster_teleport
