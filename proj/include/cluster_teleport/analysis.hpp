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

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "cluster_teleport/protocols.hpp"

namespace cluster_teleport::analysis {

using protocols::ChannelParams;
using protocols::InputState;

/// 2(|alpha|^2 + |beta|^2). Throws protocols::AssumptionViolation when the
/// channel does not satisfy the phase and magnitude assumptions.
double success_probability(const ChannelParams& p);

/// |gamma|^2 + |eta|^2 - |alpha|^2 - |beta|^2.
double failure_probability(const ChannelParams& p);

struct EnumeratedProbability {
  double success = 0.0;
  double failure = 0.0;
  std::vector<protocols::ProposedBranchStats> branches;
};

/// Exact sum over (Bob outcome, E outcome) from full state simulation.
EnumeratedProbability enumerate_success(const InputState& zeta, const ChannelParams& p);

struct PovmReport {
  protocols::PovmConfig config;
  /// 1/(4 rho varsigma), 1/(4 rho varsigma), 1 - 1/(2 rho varsigma)
  std::array<double, 3> closed_form{};
  /// POVM applied to the normalized post-CNOT state of (Q4, E).
  std::array<double, 3> simulated{};
  std::array<double, 3> discrepancy{};  // simulated - closed_form
  double max_discrepancy = 0.0;
};

PovmReport ramirez_povm_report(const protocols::PovmConfig& cfg, const InputState& zeta);

/// 1 - (1 - p)^N. Throws std::invalid_argument outside p in [0, 1], N >= 1.
double geometric_success(double p, std::int64_t n);

struct RepeatStats {
  std::int64_t trials = 0;
  std::int64_t max_tries = 0;
  std::uint64_t seed = 0;
  std::int64_t attempts = 0;
  std::int64_t successes = 0;
  std::int64_t exhausted = 0;  // trials with no success within max_tries
  std::int64_t failed_attempts = 0;
  double p_hat = 0.0;  // successes / attempts
  double p_closed = 0.0;
  /// Smallest fidelity of the recovered sender qubit over all failed attempts.
  double min_sender_fidelity = 1.0;
  /// Attempt index of the first success -> number of trials.
  std::map<std::int64_t, std::int64_t> first_success_histogram;

  /// Fraction of trials that succeeded within the first n attempts.
  double empirical_cdf(std::int64_t n) const;
};

/// Repeat-until-success with a fresh channel per attempt. Trial t draws from
/// Rng::for_stream(seed, t), so the result does not depend on `workers`.
/// Throws std::logic_error if a failed attempt ever loses the input.
RepeatStats monte_carlo_repeat(const InputState& zeta, const ChannelParams& p, std::int64_t trials,
                               std::int64_t max_tries, std::uint64_t seed, unsigned workers = 1);

struct Fig2Row {
  double p = 0.0;
  std::int64_t n = 1;
  double prob = 0.0;
};

/// Cross product, p-major.
std::vector<Fig2Row> figure2_data(const std::vector<double>& p_values, const std::vector<std::int64_t>& n_values);

/// Panel (a): N in {2, 10, 50, 100} over p = 0, 0.01, ..., 1.
std::vector<Fig2Row> figure2_panel_a();
/// Panel (b): p in {0.1, ..., 0.5} over N = 1..100.
std::vector<Fig2Row> figure2_panel_b();

}  // namespace cluster_teleport::analysis
