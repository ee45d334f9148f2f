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

/// Controlled probabilistic teleportation over the four-qubit cluster channel
///
///     |phi>_1234 = alpha|0000> + beta|1010> + gamma|0101> - eta|1111>
///
/// Alice holds the input qubit A and channel qubit Q1, Bob (the controller)
/// holds Q2 and Q3, Chika (the receiver) holds Q4. Two drivers are provided:
///
///  * ramirez_teleport: both Bell measurements first, then Chika resolves the
///    residual amplitude imbalance with a three-outcome POVM on an ancilla.
///    A failed run destroys the input.
///  * proposed_teleport: after Bob's Bell measurement Alice runs a four-gate
///    circuit on (A, Q1, E) and a Z measurement on E decides the run. A failed
///    run leaves the input intact on A, so it can be retried on a fresh channel.
///
/// The outcome tables (table1_outcome, table2_branch) are closed-form oracles
/// kept separate from the simulation so the two can be checked against each
/// other.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cluster_teleport/qcore.hpp"
#include "cluster_teleport/rng.hpp"
#include "cluster_teleport/transcript.hpp"

namespace cluster_teleport::protocols {

using qcore::Amplitude;
using qcore::PureState;

// Register labels.
inline const std::string kInput = "A";
inline const std::string kQ1 = "Q1";
inline const std::string kQ2 = "Q2";
inline const std::string kQ3 = "Q3";
inline const std::string kQ4 = "Q4";
inline const std::string kAncilla = "E";

/// A protocol precondition does not hold (channel assumptions, POVM positivity).
class AssumptionViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input qubit a|0> + b|1>.
class InputState {
 public:
  InputState(Amplitude a, Amplitude b);

  Amplitude a() const { return a_; }
  Amplitude b() const { return b_; }
  PureState as_state(const std::string& label = kInput) const;

 private:
  Amplitude a_;
  Amplitude b_;
};

class ChannelParams {
 public:
  /// Throws qcore::InvariantError unless |alpha|^2 + |beta|^2 + |gamma|^2 + |eta|^2 = 1.
  ChannelParams(Amplitude alpha, Amplitude beta, Amplitude gamma, Amplitude eta);

  static ChannelParams uniform();

  Amplitude alpha() const { return alpha_; }
  Amplitude beta() const { return beta_; }
  Amplitude gamma() const { return gamma_; }
  Amplitude eta() const { return eta_; }

  /// arg(alpha) = arg(eta) and arg(beta) = arg(gamma); a zero coefficient
  /// matches any phase.
  bool phase_aligned() const;
  /// |alpha| <= |eta| and |beta| <= |gamma|.
  bool magnitude_ordered() const;
  /// Throws AssumptionViolation naming the failed flag.
  void require_aligned_and_ordered() const;

 private:
  Amplitude alpha_;
  Amplitude beta_;
  Amplitude gamma_;
  Amplitude eta_;
};

enum class BellOutcome { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

inline constexpr std::array<BellOutcome, 4> kBellOutcomes = {BellOutcome::PhiPlus, BellOutcome::PhiMinus,
                                                             BellOutcome::PsiPlus, BellOutcome::PsiMinus};

std::string to_string(BellOutcome outcome);
/// Accepts "phi+", "PhiPlus", ... ; throws std::invalid_argument otherwise.
BellOutcome parse_bell_outcome(const std::string& text);

/// Pauli products modulo global phase compose by XOR of (x, z) bits.
CorrectionOp compose(CorrectionOp first, CorrectionOp second);
qcore::GateMatrix correction_gate(CorrectionOp op);

// ---------------------------------------------------------------------------
// Channel

PureState make_cluster_channel(const ChannelParams& p);

// ---------------------------------------------------------------------------
// Original scheme: Bell + Bell + POVM

enum class ChannelCoef { Alpha, Beta, Gamma, Eta };

/// sign * coef * (a or b)
struct CollapseTerm {
  bool uses_b = false;
  int sign = 1;
  ChannelCoef coef = ChannelCoef::Alpha;
};

/// Chika's unnormalized state amp0|0> + amp1|1> for one (Alice, Bob) pair.
struct Table1Cell {
  CollapseTerm amp0;
  CollapseTerm amp1;
};

struct RamirezBranch {
  BellOutcome alice = BellOutcome::PhiPlus;
  BellOutcome bob = BellOutcome::PhiPlus;
  Table1Cell cell;
  /// Brings the collapse to delta0 a|0> + delta1 b|1>; Id or X.
  CorrectionOp pre_correction = CorrectionOp::Id;
  Amplitude delta0;
  Amplitude delta1;

  /// Normalized state of Q4 as listed in the table, before any correction.
  PureState collapse_state(const InputState& zeta) const;
};

RamirezBranch table1_outcome(BellOutcome alice, BellOutcome bob, const ChannelParams& p);

struct PovmConfig {
  double delta0 = 0.0;
  double delta1 = 0.0;
  double varsigma = 0.0;  // 1/delta0^2 + 1/delta1^2
  double rho = 0.0;
  double rho_min = 0.0;  // smallest rho for which Lambda_3 is PSD
  std::array<Amplitude, 2> m1{};
  std::array<Amplitude, 2> m2{};
  std::vector<qcore::PovmElement> elements;  // Lambda_1, Lambda_2, Lambda_3
};

/// Smallest valid rho: (2 / varsigma) * max(1/delta0^2, 1/delta1^2).
double povm_rho_min(double delta0, double delta1);

/// Throws std::invalid_argument for non-positive deltas and AssumptionViolation
/// ("Lambda_3 not positive semidefinite") when rho < rho_min.
PovmConfig make_povm(double delta0, double delta1, double rho);

// ---------------------------------------------------------------------------
// Results

enum class TeleportStatus { Success, FailRecoverable, FailInconclusive };

std::string to_string(TeleportStatus status);

struct TeleportResult {
  TeleportStatus status = TeleportStatus::FailInconclusive;
  /// Fidelity of Chika's qubit with the input after corrections.
  double target_fidelity = 0.0;
  /// Fidelity of Alice's qubit A with the input; set for FailRecoverable.
  std::optional<double> sender_fidelity_on_fail;
  Transcript transcript;
  /// Factored-out state of A after a recoverable failure, for the next attempt.
  std::optional<PureState> recovered_sender;
  /// Z-basis value left on Q4 after a recoverable failure.
  std::optional<int> receiver_fail_bit;
};

struct RamirezOptions {
  /// Fixed rho for every branch; default is max(2, rho_min) of the branch reached.
  std::optional<double> rho;
};

TeleportResult ramirez_teleport(const InputState& zeta, const ChannelParams& p, std::uint64_t seed,
                                const RamirezOptions& options = {});

struct CritiqueReport {
  double p1 = 0.0;
  double p2 = 0.0;
  /// diag(p1, p1, p2, p2) in the Bell basis.
  qcore::DensityMatrix closed_form;
  /// (A, Q1) after Alice's Bell measurement, averaged over her outcomes.
  qcore::DensityMatrix after_measurement;
  /// Reduced state of (A, Q1) before her measurement, Bell basis.
  qcore::DensityMatrix before_measurement;
  double max_deviation = 0.0;
  double max_off_diagonal = 0.0;
};

/// After Alice's Bell measurement the pair (A, Q1) is an incoherent mixture of
/// Bell states whose weights do not depend on the relative phase of a and b.
CritiqueReport critique_density_matrix(const InputState& zeta, const ChannelParams& p);

// ---------------------------------------------------------------------------
// Proposed scheme: controlled discrimination, input preserved on failure

enum class TauForm { Tau1, Tau2 };  // u|00> + v|11>, u|01> + v|10> on (Q1, Q4)

std::string to_string(TauForm form);

struct BranchInfo {
  BellOutcome bob = BellOutcome::PhiPlus;
  Amplitude u;
  Amplitude v;
  TauForm tau_form = TauForm::Tau1;
  double prob = 0.0;
  std::array<double, 3> n_hat{};
};

/// Closed-form row for Bob's outcome: probability, (u, v) with their signs,
/// the tau form and the rotation axis built from c = |u|/|v|.
BranchInfo table2_branch(BellOutcome bob, const ChannelParams& p);

/// u|00> + v|11> (Tau1) or u|01> + v|10> (Tau2) on (Q1, Q4).
PureState tau_state(const BranchInfo& branch);

/// [[c, s], [s, -c]] with c = |u|/|v| and s = sqrt(1 - c^2).
qcore::GateMatrix build_ua(const BranchInfo& branch);

/// Alice's four gates: C_{1A}, prepare E, C_{AE}, C^{U_A}_{1A}, C_{AE}.
/// `state` must hold A and Q1 and must not hold E. Events are appended to
/// `transcript` when provided.
PureState apply_discrimination_circuit(const PureState& state, const qcore::GateMatrix& ua,
                                       Transcript* transcript = nullptr);

/// Maps Alice's (A, Q1) results on the success branch to the operator Chika applies.
/// z_a is 0/1, x1_minus is true for the |-> result. Throws std::invalid_argument
/// when e_bit is 1.
CorrectionOp discriminate_correction(int e_bit, int z_a, bool x1_minus, TauForm tau);

/// Frame Chika must compose with the discrimination correction: the physical
/// (Q1, Q4) collapse differs from tau_state(branch) by X on both qubits for
/// the psi outcomes (Alice undoes hers, Chika's is returned here) and by Z
/// on Q4 when u and v have opposite signs.
CorrectionOp receiver_frame(const BranchInfo& branch);

/// Local gate Alice applies to Q1 before the circuit (X for Tau2, else none).
std::optional<qcore::GateMatrix> sender_alignment(const BranchInfo& branch);

TeleportResult proposed_teleport(const InputState& zeta, const ChannelParams& p, std::uint64_t seed);

/// One attempt driven by an existing generator. `sender` is the single-qubit
/// state currently held on A; `reference` is used only to score fidelities.
TeleportResult run_proposed_attempt(const PureState& sender, const ChannelParams& p, Rng& rng,
                                    const PureState& reference);

/// Exact per-branch statistics without sampling.
struct ProposedBranchStats {
  BellOutcome bob = BellOutcome::PhiPlus;
  double bob_probability = 0.0;
  double success_given_bob = 0.0;  // Pr(E = 0 | Bob's outcome)
};

std::vector<ProposedBranchStats> enumerate_proposed(const InputState& zeta, const ChannelParams& p);

}  // namespace cluster_teleport::protocols
