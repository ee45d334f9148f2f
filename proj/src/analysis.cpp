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

#include "cluster_teleport/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace cluster_teleport::analysis {
namespace {

using protocols::kAncilla;
using protocols::kQ4;
using protocols::TeleportStatus;
using qcore::PureState;

constexpr double kRecoveryTol = 1e-9;

struct TrialRecord {
  std::int64_t first_success = 0;  // 0 when exhausted
  std::int64_t attempts = 0;
  double min_sender_fidelity = 1.0;
};

TrialRecord run_trial(const InputState& zeta, const ChannelParams& p, std::int64_t max_tries, std::uint64_t seed,
                      std::uint64_t trial) {
  Rng rng = Rng::for_stream(seed, trial);
  const PureState reference = zeta.as_state();
  PureState sender = reference;
  TrialRecord record;
  for (std::int64_t k = 1; k <= max_tries; ++k) {
    auto result = protocols::run_proposed_attempt(sender, p, rng, reference);
    ++record.attempts;
    if (result.status == TeleportStatus::Success) {
      if (result.target_fidelity < 1.0 - kRecoveryTol) {
        throw std::logic_error("monte_carlo_repeat: success with receiver fidelity " +
                               std::to_string(result.target_fidelity));
      }
      record.first_success = k;
      return record;
    }
    const double fidelity = result.sender_fidelity_on_fail.value_or(0.0);
    record.min_sender_fidelity = std::min(record.min_sender_fidelity, fidelity);
    if (fidelity < 1.0 - kRecoveryTol || !result.recovered_sender) {
      throw std::logic_error("monte_carlo_repeat: failed attempt lost the input (fidelity " +
                             std::to_string(fidelity) + ")");
    }
    sender = std::move(*result.recovered_sender);
  }
  return record;
}

}  // namespace

double success_probability(const ChannelParams& p) {
  p.require_aligned_and_ordered();
  return 2.0 * (std::norm(p.alpha()) + std::norm(p.beta()));
}

double failure_probability(const ChannelParams& p) {
  p.require_aligned_and_ordered();
  return std::norm(p.gamma()) + std::norm(p.eta()) - std::norm(p.alpha()) - std::norm(p.beta());
}

EnumeratedProbability enumerate_success(const InputState& zeta, const ChannelParams& p) {
  EnumeratedProbability out;
  out.branches = protocols::enumerate_proposed(zeta, p);
  for (const auto& branch : out.branches) {
    out.success += branch.bob_probability * branch.success_given_bob;
    out.failure += branch.bob_probability * (1.0 - branch.success_given_bob);
  }
  return out;
}

PovmReport ramirez_povm_report(const protocols::PovmConfig& cfg, const InputState& zeta) {
  PovmReport report;
  report.config = cfg;
  const double x = 1.0 / (cfg.rho * cfg.varsigma);
  report.closed_form = {x / 4.0, x / 4.0, 1.0 - x / 2.0};

  PureState state = PureState::normalized({kQ4}, {cfg.delta0 * zeta.a(), cfg.delta1 * zeta.b()});
  state = qcore::tensor_product(state, PureState::basis({kAncilla}, 0));
  state = qcore::apply_gate(state, qcore::GateMatrix::cnot(), {kQ4, kAncilla});
  const auto outcomes = qcore::povm_measure(state, kAncilla, cfg.elements);
  for (std::size_t i = 0; i < 3; ++i) {
    report.simulated[i] = outcomes.at(i).probability;
    report.discrepancy[i] = report.simulated[i] - report.closed_form[i];
    report.max_discrepancy = std::max(report.max_discrepancy, std::abs(report.discrepancy[i]));
  }
  return report;
}

double geometric_success(double p, std::int64_t n) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("geometric_success: p must lie in [0, 1]");
  if (n < 1) throw std::invalid_argument("geometric_success: N must be at least 1");
  if (p == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-p));
}

double RepeatStats::empirical_cdf(std::int64_t n) const {
  if (trials == 0) return 0.0;
  std::int64_t count = 0;
  for (const auto& [k, c] : first_success_histogram) {
    if (k <= n) count += c;
  }
  return static_cast<double>(count) / static_cast<double>(trials);
}

RepeatStats monte_carlo_repeat(const InputState& zeta, const ChannelParams& p, std::int64_t trials,
                               std::int64_t max_tries, std::uint64_t seed, unsigned workers) {
  if (trials < 1) throw std::invalid_argument("monte_carlo_repeat: trials must be at least 1");
  if (max_tries < 1) throw std::invalid_argument("monte_carlo_repeat: max_tries must be at least 1");
  p.require_aligned_and_ordered();

  std::vector<TrialRecord> records(static_cast<std::size_t>(trials));
  const auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) records[t] = run_trial(zeta, p, max_tries, seed, t);
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::int64_t>(trials, 256))));
  if (workers == 1) {
    run_range(0, records.size());
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (records.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(records.size(), w * chunk);
      const std::size_t end = std::min(records.size(), begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& thread : pool) thread.join();
    for (const auto& error : errors) {
      if (error) std::rethrow_exception(error);
    }
  }

  RepeatStats stats;
  stats.trials = trials;
  stats.max_tries = max_tries;
  stats.seed = seed;
  stats.p_closed = success_probability(p);
  for (const auto& record : records) {
    stats.attempts += record.attempts;
    stats.min_sender_fidelity = std::min(stats.min_sender_fidelity, record.min_sender_fidelity);
    if (record.first_success > 0) {
      ++stats.successes;
      stats.failed_attempts += record.attempts - 1;
      ++stats.first_success_histogram[record.first_success];
    } else {
      ++stats.exhausted;
      stats.failed_attempts += record.attempts;
    }
  }
  stats.p_hat = static_cast<double>(stats.successes) / static_cast<double>(stats.attempts);
  return stats;
}

std::vector<Fig2Row> figure2_data(const std::vector<double>& p_values, const std::vector<std::int64_t>& n_values) {
  std::vector<Fig2Row> rows;
  rows.reserve(p_values.size() * n_values.size());
  for (double p : p_values) {
    for (std::int64_t n : n_values) rows.push_back({p, n, geometric_success(p, n)});
  }
  return rows;
}

std::vector<Fig2Row> figure2_panel_a() {
  std::vector<double> ps;
  for (int i = 0; i <= 100; ++i) ps.push_back(i / 100.0);
  return figure2_data(ps, {2, 10, 50, 100});
}

std::vector<Fig2Row> figure2_panel_b() {
  std::vector<std::int64_t> ns;
  for (std::int64_t n = 1; n <= 100; ++n) ns.push_back(n);
  return figure2_data({0.1, 0.2, 0.3, 0.4, 0.5}, ns);
}

}  // namespace cluster_teleport::analysis
