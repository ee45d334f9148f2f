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

// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cluster_teleport/analysis.hpp"
#include "cluster_teleport/cli.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace {

using namespace cluster_teleport;
using namespace cluster_teleport::protocols;
using qcore::GateMatrix;
using qcore::Matrix;
using qcore::PureState;

constexpr double kTable1Tol = 1e-10;
constexpr double kExact = 1e-12;
constexpr double kComplete = 1e-10;
constexpr double kRecovered = 1e-9;
constexpr double kSigmas = 3.0;
constexpr std::int64_t kMonteCarloTrials = 100000;
constexpr std::int64_t kFailedAttemptsRequired = 10000;
constexpr int kDraws = 20;
constexpr int kPropertyCases = 100;

ChannelParams skewed_channel() { return {0.3, 0.4, std::sqrt(0.5), 0.5}; }
InputState sample_input() { return {0.6, 0.8}; }

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;
};

double gap(const std::vector<Amplitude>& x, const std::vector<Amplitude>& y) {
  double g = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) g = std::max(g, std::abs(x[i] - y[i]));
  return g;
}

double phase_gap(const std::vector<Amplitude>& x, const std::vector<Amplitude>& y) {
  Amplitude overlap = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) overlap += std::conj(x[i]) * y[i];
  const Amplitude phase = std::abs(overlap) > 0 ? std::conj(overlap) / std::abs(overlap) : Amplitude(1.0);
  std::vector<Amplitude> aligned(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) aligned[i] = phase * y[i];
  return gap(x, aligned);
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------

Verdict table1() {
  const auto z = sample_input();
  const auto p = skewed_channel();
  const auto full = qcore::tensor_product(z.as_state(), make_cluster_channel(p));
  double worst = 0.0;
  int cells = 0;
  for (const auto& alice : qcore::bell_measure(full, kInput, kQ1)) {
    for (const auto& bob : qcore::bell_measure(*alice.post_state, kQ2, kQ3)) {
      const auto q4 = qcore::extract_subsystem(*bob.post_state, {kQ4});
      const auto cell = ct_testing::table1_cell(static_cast<int>(alice.index), static_cast<int>(bob.index), z, p);
      const auto table = PureState::normalized({kQ4}, {cell[0], cell[1]});
      const auto branch = table1_outcome(kBellOutcomes[alice.index], kBellOutcomes[bob.index], p);
      worst = std::max(worst, 1.0 - qcore::fidelity(q4, table));
      worst = std::max(worst, 1.0 - qcore::fidelity(q4, branch.collapse_state(z)));
      ++cells;
    }
  }
  return {cells == 16 && worst < kTable1Tol, std::to_string(cells) + " cells, max fidelity deviation " + sci(worst)};
}

Verdict table2() {
  const auto p = skewed_channel();
  const auto outcomes = qcore::bell_measure(make_cluster_channel(p), kQ2, kQ3);
  Verdict v;
  double worst = 0.0;
  for (const auto& o : outcomes) {
    const auto row = ct_testing::table2_row(static_cast<int>(o.index), p);
    const auto lib = table2_branch(kBellOutcomes[o.index], p);
    std::vector<Amplitude> printed(4);
    printed[row.tau2 ? 0b01 : 0b00] = row.u;
    printed[row.tau2 ? 0b10 : 0b11] = row.v;
    const auto simulated = qcore::extract_subsystem(*o.post_state, {kQ1, kQ4});
    const double dp = std::abs(o.probability - row.prob);
    const double ds = phase_gap(simulated.amplitudes(), printed);
    const double dlib = std::max(std::abs(lib.prob - row.prob), gap(tau_state(lib).amplitudes(), printed));
    const double dev = std::max({dp, ds, dlib});
    worst = std::max(worst, dev);
    std::string note = o.label + ": |dPr| " + sci(dp) + ", state gap in (Q1,Q4) order " + sci(ds);
    if (row.tau2) {
      const double swapped = phase_gap(simulated.permuted({kQ4, kQ1}).amplitudes(), printed);
      note += ", with the two factors exchanged " + sci(swapped);
    }
    v.notes.push_back(note);
  }
  v.pass = worst < kExact;
  v.detail = "4 rows, max deviation " + sci(worst) + " (tol " + sci(kExact) + ")";
  return v;
}

Verdict density_matrix() {
  std::mt19937_64 gen(403);
  double worst = 0.0, off = 0.0, before_off = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const auto z = ct_testing::random_input(gen);
    const auto p = ct_testing::random_channel(gen);
    const auto r = critique_density_matrix(z, p);
    Matrix closed = Matrix::Zero(4, 4);
    closed.diagonal() << ct_testing::closed_p1(z, p), ct_testing::closed_p1(z, p), ct_testing::closed_p2(z, p),
        ct_testing::closed_p2(z, p);
    worst = std::max(worst, qcore::max_abs_diff(r.after_measurement.matrix(), closed));
    off = std::max(off, r.max_off_diagonal);
    Matrix b = r.before_measurement.matrix();
    b.diagonal().setZero();
    before_off = std::max(before_off, b.cwiseAbs().maxCoeff());
  }
  Verdict v{worst < kExact && off < kExact,
            std::to_string(kDraws) + " draws, ensemble after Alice's measurement vs diag(p1,p1,p2,p2): " + sci(worst),
            {}};
  v.notes.push_back("pre-measurement reduced state: largest Bell-basis off-diagonal " + sci(before_off) +
                    " (diagonal matches)");
  return v;
}

Verdict decompositions() {
  std::mt19937_64 gen(404);
  double rhs = 0.0, pipeline = 0.0, branches = 0.0;
  for (int form = 0; form < 2; ++form) {
    const bool tau2 = form == 1;
    for (int i = 0; i < kDraws; ++i) {
      const auto z = ct_testing::random_input(gen);
      const double vv = ct_testing::uniform(gen, 1.0 / std::sqrt(2.0), 1.0);
      const double u = std::sqrt(1 - vv * vv);
      const auto phase = ct_testing::random_phase(gen);
      const auto lhs = ct_testing::zeta_tau(z, u, vv, phase, tau2);
      rhs = std::max(rhs, gap(lhs, ct_testing::decomposition_rhs(z, u, vv, phase, tau2)));

      BranchInfo b;
      b.u = u;
      b.v = vv;
      const auto out = apply_discrimination_circuit(PureState({kInput, kQ1, kQ4}, lhs), build_ua(b))
                           .permuted({kAncilla, kInput, kQ1, kQ4});
      const auto expected = ct_testing::pipeline_state(z, u, vv, phase, tau2);
      pipeline = std::max(pipeline, gap(out.amplitudes(), expected));

      const auto e = qcore::measure_projective(out, kAncilla, qcore::MeasureBasis::Z);
      const auto fail = qcore::extract_subsystem(*e[1].post_state, {kInput, kQ1, kQ4});
      branches = std::max(branches, phase_gap(fail.amplitudes(), ct_testing::failure_state(z, tau2)));
      std::vector<Amplitude> success_expected(expected.begin(), expected.begin() + 8);
      for (auto& a : success_expected) a /= std::sqrt(e[0].probability);
      const auto success = qcore::extract_subsystem(*e[0].post_state, {kInput, kQ1, kQ4});
      branches = std::max(branches, phase_gap(success.amplitudes(), success_expected));
    }
  }
  const double worst = std::max({rhs, pipeline, branches});
  return {worst < kExact,
          "decomposition " + sci(rhs) + ", gate pipeline " + sci(pipeline) + ", conditioned branches " +
              sci(branches) + " over " + std::to_string(2 * kDraws) + " draws",
          {}};
}

analysis::RepeatStats g_stats;

Verdict success_probability() {
  std::mt19937_64 gen(405);
  double worst = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const auto z = ct_testing::random_input(gen);
    const auto p = ct_testing::random_channel(gen);
    const double closed = 2 * (std::norm(p.alpha()) + std::norm(p.beta()));
    worst = std::max(worst, std::abs(analysis::enumerate_success(z, p).success - closed));
  }
  g_stats = analysis::monte_carlo_repeat(sample_input(), skewed_channel(), kMonteCarloTrials, 1000, 20260, worker_count());
  const double p = 0.5;
  const double bound = kSigmas * std::sqrt(p * (1 - p) / kMonteCarloTrials);
  const double dev = std::abs(g_stats.p_hat - p);
  return {worst < kExact && dev < bound,
          "enumeration vs 2(|alpha|^2+|beta|^2) " + sci(worst) + "; Monte Carlo p_hat " +
              cli::format_probability(g_stats.p_hat) + " over " + std::to_string(g_stats.attempts) +
              " attempts, |p_hat-0.5| " + sci(dev) + " < " + sci(bound),
          {}};
}

Verdict information_preservation() {
  std::mt19937_64 gen(406);
  std::int64_t failed = 0, bad = 0;
  double worst = 0.0;
  std::uint64_t seed = 0;
  while (failed < kFailedAttemptsRequired) {
    const auto z = ct_testing::random_input(gen);
    const auto p = ct_testing::random_channel(gen);
    Rng rng(seed++);
    PureState sender = z.as_state();
    for (int attempt = 0; attempt < 50; ++attempt) {
      const auto r = run_proposed_attempt(sender, p, rng, z.as_state());
      if (r.status == TeleportStatus::Success) break;
      ++failed;
      const double loss = 1.0 - r.sender_fidelity_on_fail.value_or(0.0);
      worst = std::max(worst, loss);
      if (loss > kRecovered) ++bad;
      sender = *r.recovered_sender;
    }
  }
  return {bad == 0, std::to_string(failed) + " failed attempts, " + std::to_string(bad) +
                        " with fidelity(A, zeta) < 1 - 1e-9, worst loss " + sci(worst),
          {}};
}

Verdict geometric() {
  Verdict v;
  const double p = g_stats.p_closed;
  std::string empirical;
  for (std::int64_t n : {1, 2, 5, 10}) {
    const double expected = analysis::geometric_success(p, n);
    const double se = std::sqrt(expected * (1 - expected) / static_cast<double>(g_stats.trials));
    const double dev = std::abs(g_stats.empirical_cdf(n) - expected);
    if (!(dev <= kSigmas * se)) v.pass = false;
    empirical += " N=" + std::to_string(n) + ":" + sci(dev) + "/" + sci(kSigmas * se);
  }
  std::ostringstream out, err;
  const int code = cli::run({"fig2", "--format", "csv"}, out, err);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0, mismatched = 0;
  bool n_grid[4] = {}, p_grid[5] = {};
  while (std::getline(in, line)) {
    double pp = 0;
    long n = 0;
    char prob[64] = {};
    if (std::sscanf(line.c_str(), "%lf,%ld,%63s", &pp, &n, prob) != 3) {
      ++mismatched;
      continue;
    }
    ++rows;
    if (prob != cli::format_probability(1 - std::pow(1 - pp, static_cast<double>(n)))) ++mismatched;
    const long ns[4] = {2, 10, 50, 100};
    for (int i = 0; i < 4; ++i) n_grid[i] |= n == ns[i];
    for (int i = 0; i < 5; ++i) p_grid[i] |= line.rfind(cli::format_probability((i + 1) / 10.0) + ",", 0) == 0;
  }
  const bool grids = std::all_of(std::begin(n_grid), std::end(n_grid), [](bool b) { return b; }) &&
                     std::all_of(std::begin(p_grid), std::end(p_grid), [](bool b) { return b; });
  v.pass = v.pass && code == 0 && mismatched == 0 && grids && rows > 0;
  v.detail = "Pr(X<=N) dev/3sigma" + empirical + "; fig2 " + std::to_string(rows) + " rows, " +
             std::to_string(mismatched) + " mismatches at 12 digits, caption grids " + (grids ? "present" : "missing");
  return v;
}

Verdict povm_suite() {
  std::mt19937_64 gen(408);
  double completeness = 0.0, min_eig = 1.0, asym = 0.0;
  for (int i = 0; i < kPropertyCases; ++i) {
    const double d0 = ct_testing::uniform(gen, 0.05, 1.0);
    const double d1 = ct_testing::uniform(gen, 0.05, 1.0);
    const double rho = ct_testing::uniform(gen, povm_rho_min(d0, d1), 2.0);
    const auto cfg = make_povm(d0, d1, rho);
    Matrix sum = Matrix::Zero(2, 2);
    for (const auto& e : cfg.elements) {
      sum += e.matrix();
      Eigen::SelfAdjointEigenSolver<Matrix> solver(e.matrix());
      min_eig = std::min(min_eig, solver.eigenvalues().minCoeff());
    }
    completeness = std::max(completeness, qcore::max_abs_diff(sum, Matrix::Identity(2, 2)));
    const auto report = analysis::ramirez_povm_report(cfg, ct_testing::random_input(gen));
    asym = std::max(asym, std::abs(report.simulated[0] - report.simulated[1]));
  }
  Verdict v{completeness < kComplete && min_eig > -kComplete && asym < kExact,
            "completeness " + sci(completeness) + ", min eigenvalue " + sci(min_eig) + ", |P(L1)-P(L2)| " + sci(asym),
            {}};
  for (const auto& [d0, d1] : {std::pair{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}, std::pair{0.6, 0.8}}) {
    const auto r = analysis::ramirez_povm_report(make_povm(d0, d1, 2.0), sample_input());
    v.notes.push_back("report delta=(" + cli::format_probability(d0) + ", " + cli::format_probability(d1) +
                      "), rho=2: formula {" + cli::format_probability(r.closed_form[0]) + ", " +
                      cli::format_probability(r.closed_form[1]) + ", " + cli::format_probability(r.closed_form[2]) +
                      "} simulated {" + cli::format_probability(r.simulated[0]) + ", " +
                      cli::format_probability(r.simulated[1]) + ", " + cli::format_probability(r.simulated[2]) +
                      "} max discrepancy " + sci(r.max_discrepancy));
  }
  return v;
}

Verdict properties() {
  std::mt19937_64 gen(409);
  int unitary = 0, norm = 0, complete = 0, involution = 0, replay = 0;
  for (int i = 0; i < kPropertyCases; ++i) {
    const Matrix u = ct_testing::random_unitary(gen, 4);
    const GateMatrix g("U", u);
    if (qcore::max_abs_diff(g.matrix().adjoint() * g.matrix(), Matrix::Identity(4, 4)) < kExact) ++unitary;

    const auto s = ct_testing::random_state(gen, {"a", "b", "c"});
    const auto t = qcore::apply_gate(s, g, {"c", "a"});
    double n2 = 0.0;
    for (const auto& a : t.amplitudes()) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) < kExact) ++norm;

    double total = 0.0, bell = 0.0;
    for (const auto& o : qcore::measure_projective(t, "b", i % 2 ? qcore::MeasureBasis::X : qcore::MeasureBasis::Z)) {
      total += o.probability;
    }
    for (const auto& o : qcore::bell_measure(t, "a", "b")) bell += o.probability;
    if (std::abs(total - 1.0) < kComplete && std::abs(bell - 1.0) < kComplete) ++complete;

    BranchInfo b;
    const double v = ct_testing::uniform(gen, 0.1, 1.0);
    b.u = ct_testing::uniform(gen, 0.0, v);
    b.v = v;
    const Matrix m = build_ua(b).matrix();
    if (qcore::max_abs_diff(m * m, Matrix::Identity(2, 2)) < kExact) ++involution;

    const auto z = ct_testing::random_input(gen);
    const auto p = ct_testing::random_channel(gen);
    const std::uint64_t seed = gen();
    const bool same_proposed = proposed_teleport(z, p, seed).transcript.to_json().dump() ==
                               proposed_teleport(z, p, seed).transcript.to_json().dump();
    const bool same_ramirez = ramirez_teleport(z, p, seed).transcript.to_json().dump() ==
                              ramirez_teleport(z, p, seed).transcript.to_json().dump();
    if (same_proposed && same_ramirez) ++replay;
  }
  const int n = kPropertyCases;
  return {unitary == n && norm == n && complete == n && involution == n && replay == n,
          "unitarity " + std::to_string(unitary) + "/" + std::to_string(n) + ", norm " + std::to_string(norm) + "/" +
              std::to_string(n) + ", completeness " + std::to_string(complete) + "/" + std::to_string(n) +
              ", U_A involution " + std::to_string(involution) + "/" + std::to_string(n) + ", transcript replay " +
              std::to_string(replay) + "/" + std::to_string(n),
          {}};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 for none
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Table 1 reproduction", 1.0, table1},
      {2, "Table 2 reproduction", 1.0, table2},
      {3, "Bell-basis density matrix of (A,1)", 0.0, density_matrix},
      {4, "decomposition and gate pipeline identities", 0.0, decompositions},
      {5, "success probability", 60.0, success_probability},
      {6, "information preservation on failure", 0.0, information_preservation},
      {7, "geometric repetition and fig2 data", 0.0, geometric},
      {8, "POVM suite", 0.0, povm_suite},
      {9, "property suites", 0.0, properties},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what(), {}};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && seconds >= c.budget_seconds) {
      v.pass = false;
      v.detail += "; over the " + std::to_string(static_cast<int>(c.budget_seconds)) + " s budget";
    }
    std::printf("%s criterion %d: %s: %s [%.3f s]\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                seconds);
    for (const auto& note : v.notes) std::printf("    %s\n", note.c_str());
    failures += v.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
