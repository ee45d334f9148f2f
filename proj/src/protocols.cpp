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

#include "cluster_teleport/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cluster_teleport::protocols {
namespace {

using qcore::DensityBasis;
using qcore::DensityMatrix;
using qcore::GateMatrix;
using qcore::InvariantError;
using qcore::kExactTol;
using qcore::kNegligibleProbability;
using qcore::kSumTol;
using qcore::Matrix;
using qcore::MeasurementOutcome;

constexpr CollapseTerm term(bool uses_b, int sign, ChannelCoef coef) { return {uses_b, sign, coef}; }

constexpr bool kA = false;
constexpr bool kB = true;

// Chika's unnormalized state after both Bell measurements, indexed
// [alice][bob] in the order phi+, phi-, psi+, psi-.
constexpr std::array<std::array<Table1Cell, 4>, 4> kTable1 = {{
    {{
        {term(kA, +1, ChannelCoef::Alpha), term(kB, -1, ChannelCoef::Eta)},
        {term(kA, +1, ChannelCoef::Alpha), term(kB, +1, ChannelCoef::Eta)},
        {term(kB, +1, ChannelCoef::Beta), term(kA, +1, ChannelCoef::Gamma)},
        {term(kB, +1, ChannelCoef::Beta), term(kA, -1, ChannelCoef::Gamma)},
    }},
    {{
        {term(kA, +1, ChannelCoef::Alpha), term(kB, +1, ChannelCoef::Eta)},
        {term(kA, +1, ChannelCoef::Alpha), term(kB, -1, ChannelCoef::Eta)},
        {term(kB, +1, ChannelCoef::Beta), term(kA, -1, ChannelCoef::Gamma)},
        {term(kB, +1, ChannelCoef::Beta), term(kA, +1, ChannelCoef::Gamma)},
    }},
    {{
        {term(kB, +1, ChannelCoef::Alpha), term(kA, -1, ChannelCoef::Eta)},
        {term(kB, +1, ChannelCoef::Alpha), term(kA, +1, ChannelCoef::Eta)},
        {term(kA, +1, ChannelCoef::Beta), term(kB, +1, ChannelCoef::Gamma)},
        {term(kA, +1, ChannelCoef::Beta), term(kB, -1, ChannelCoef::Gamma)},
    }},
    {{
        {term(kB, +1, ChannelCoef::Alpha), term(kA, +1, ChannelCoef::Eta)},
        {term(kB, +1, ChannelCoef::Alpha), term(kA, -1, ChannelCoef::Eta)},
        {term(kA, +1, ChannelCoef::Beta), term(kB, -1, ChannelCoef::Gamma)},
        {term(kA, +1, ChannelCoef::Beta), term(kB, +1, ChannelCoef::Gamma)},
    }},
}};

Amplitude coefficient(const ChannelParams& p, ChannelCoef coef) {
  switch (coef) {
    case ChannelCoef::Alpha: return p.alpha();
    case ChannelCoef::Beta: return p.beta();
    case ChannelCoef::Gamma: return p.gamma();
    case ChannelCoef::Eta: return p.eta();
  }
  return 0.0;
}

bool same_phase(Amplitude x, Amplitude y) {
  if (std::abs(x) <= kExactTol || std::abs(y) <= kExactTol) return true;
  const Amplitude relative = x * std::conj(y) / (std::abs(x) * std::abs(y));
  return std::abs(relative - Amplitude(1.0)) <= kSumTol;
}

std::string bell_bits(BellOutcome outcome) {
  switch (outcome) {
    case BellOutcome::PhiPlus: return "00";
    case BellOutcome::PhiMinus: return "01";
    case BellOutcome::PsiPlus: return "10";
    case BellOutcome::PsiMinus: return "11";
  }
  return "??";
}

std::vector<double> probabilities(const std::vector<MeasurementOutcome>& outcomes) {
  std::vector<double> probs;
  probs.reserve(outcomes.size());
  for (const auto& outcome : outcomes) probs.push_back(outcome.probability);
  return probs;
}

const MeasurementOutcome& sample_outcome(const std::vector<MeasurementOutcome>& outcomes, Rng& rng) {
  const auto probs = probabilities(outcomes);
  return outcomes.at(rng.sample(probs, kNegligibleProbability));
}

void record_measurement(Transcript& t, std::string party, std::string kind, std::vector<std::string> targets,
                        const MeasurementOutcome& outcome) {
  t.record(Measured{std::move(party), std::move(kind), std::move(targets), outcome.label, outcome.probability});
}

PureState apply_correction(const PureState& state, CorrectionOp op, Transcript& t) {
  t.record(CorrectionApplied{op, kQ4});
  if (op == CorrectionOp::Id) return state;
  return qcore::apply_gate(state, correction_gate(op), {kQ4});
}

double receiver_fidelity(const PureState& state, const PureState& reference) {
  return qcore::fidelity(qcore::reduced_density_matrix(state, {kQ4}), reference);
}

int bits_of(CorrectionOp op) {
  switch (op) {
    case CorrectionOp::Id: return 0;
    case CorrectionOp::X: return 1;
    case CorrectionOp::Z: return 2;
    case CorrectionOp::XZ: return 3;
  }
  return 0;
}

std::string format_value(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Value types

InputState::InputState(Amplitude a, Amplitude b) : a_(a), b_(b) {
  if (!std::isfinite(std::abs(a)) || !std::isfinite(std::abs(b))) {
    throw InvariantError("InputState: non-finite amplitude");
  }
  const double norm = std::norm(a) + std::norm(b);
  if (std::abs(norm - 1.0) > kExactTol) {
    throw InvariantError("InputState: |a|^2 + |b|^2 = " + format_value(norm) + " is not 1");
  }
}

PureState InputState::as_state(const std::string& label) const { return PureState::qubit(label, a_, b_); }

ChannelParams::ChannelParams(Amplitude alpha, Amplitude beta, Amplitude gamma, Amplitude eta)
    : alpha_(alpha), beta_(beta), gamma_(gamma), eta_(eta) {
  for (auto c : {alpha, beta, gamma, eta}) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InvariantError("ChannelParams: non-finite coefficient");
  }
  const double norm = std::norm(alpha) + std::norm(beta) + std::norm(gamma) + std::norm(eta);
  if (std::abs(norm - 1.0) > kExactTol) {
    throw InvariantError("ChannelParams: |alpha|^2 + |beta|^2 + |gamma|^2 + |eta|^2 = " + format_value(norm) +
                         " is not 1");
  }
}

ChannelParams ChannelParams::uniform() { return {0.5, 0.5, 0.5, 0.5}; }

bool ChannelParams::phase_aligned() const { return same_phase(alpha_, eta_) && same_phase(beta_, gamma_); }

bool ChannelParams::magnitude_ordered() const {
  return std::abs(alpha_) <= std::abs(eta_) + kExactTol && std::abs(beta_) <= std::abs(gamma_) + kExactTol;
}

void ChannelParams::require_aligned_and_ordered() const {
  if (!phase_aligned()) {
    throw AssumptionViolation("channel assumption violated: alpha/eta and beta/gamma must share phases");
  }
  if (!magnitude_ordered()) {
    throw AssumptionViolation("channel assumption violated: need |alpha| <= |eta| and |beta| <= |gamma|");
  }
}

std::string to_string(BellOutcome outcome) {
  switch (outcome) {
    case BellOutcome::PhiPlus: return "phi+";
    case BellOutcome::PhiMinus: return "phi-";
    case BellOutcome::PsiPlus: return "psi+";
    case BellOutcome::PsiMinus: return "psi-";
  }
  return "?";
}

BellOutcome parse_bell_outcome(const std::string& text) {
  for (auto outcome : kBellOutcomes) {
    if (text == to_string(outcome)) return outcome;
  }
  if (text == "PhiPlus") return BellOutcome::PhiPlus;
  if (text == "PhiMinus") return BellOutcome::PhiMinus;
  if (text == "PsiPlus") return BellOutcome::PsiPlus;
  if (text == "PsiMinus") return BellOutcome::PsiMinus;
  throw std::invalid_argument("unknown Bell outcome '" + text + "'");
}

std::string to_string(TeleportStatus status) {
  switch (status) {
    case TeleportStatus::Success: return "Success";
    case TeleportStatus::FailRecoverable: return "FailRecoverable";
    case TeleportStatus::FailInconclusive: return "FailInconclusive";
  }
  return "?";
}

std::string to_string(TauForm form) { return form == TauForm::Tau1 ? "Tau1" : "Tau2"; }

CorrectionOp compose(CorrectionOp first, CorrectionOp second) {
  static constexpr std::array<CorrectionOp, 4> kByBits = {CorrectionOp::Id, CorrectionOp::X, CorrectionOp::Z,
                                                          CorrectionOp::XZ};
  return kByBits[static_cast<std::size_t>(bits_of(first) ^ bits_of(second))];
}

GateMatrix correction_gate(CorrectionOp op) {
  switch (op) {
    case CorrectionOp::Id: return GateMatrix::identity();
    case CorrectionOp::X: return GateMatrix::pauli_x();
    case CorrectionOp::Z: return GateMatrix::pauli_z();
    case CorrectionOp::XZ: return GateMatrix("XZ", GateMatrix::pauli_x().matrix() * GateMatrix::pauli_z().matrix());
  }
  return GateMatrix::identity();
}

// ---------------------------------------------------------------------------
// Channel

PureState make_cluster_channel(const ChannelParams& p) {
  std::vector<Amplitude> amps(16);
  amps[0b0000] = p.alpha();
  amps[0b1010] = p.beta();
  amps[0b0101] = p.gamma();
  amps[0b1111] = -p.eta();
  return PureState({kQ1, kQ2, kQ3, kQ4}, std::move(amps));
}

// ---------------------------------------------------------------------------
// Original scheme

PureState RamirezBranch::collapse_state(const InputState& zeta) const {
  if (pre_correction == CorrectionOp::X) return PureState::normalized({kQ4}, {delta1 * zeta.b(), delta0 * zeta.a()});
  return PureState::normalized({kQ4}, {delta0 * zeta.a(), delta1 * zeta.b()});
}

RamirezBranch table1_outcome(BellOutcome alice, BellOutcome bob, const ChannelParams& p) {
  RamirezBranch branch;
  branch.alice = alice;
  branch.bob = bob;
  branch.cell = kTable1[static_cast<std::size_t>(alice)][static_cast<std::size_t>(bob)];
  const auto signed_coef = [&](const CollapseTerm& t) { return static_cast<double>(t.sign) * coefficient(p, t.coef); };
  if (branch.cell.amp0.uses_b) {
    // b on |0>: a bit flip puts a on |0>.
    branch.pre_correction = CorrectionOp::X;
    branch.delta0 = signed_coef(branch.cell.amp1);
    branch.delta1 = signed_coef(branch.cell.amp0);
  } else {
    branch.pre_correction = CorrectionOp::Id;
    branch.delta0 = signed_coef(branch.cell.amp0);
    branch.delta1 = signed_coef(branch.cell.amp1);
  }
  return branch;
}

double povm_rho_min(double delta0, double delta1) {
  const double inv0 = 1.0 / (delta0 * delta0);
  const double inv1 = 1.0 / (delta1 * delta1);
  return 2.0 / (inv0 + inv1) * std::max(inv0, inv1);
}

PovmConfig make_povm(double delta0, double delta1, double rho) {
  if (!(delta0 > 0.0) || !(delta1 > 0.0) || !std::isfinite(delta0) || !std::isfinite(delta1)) {
    throw std::invalid_argument("make_povm: delta0 and delta1 must be positive");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("make_povm: rho must be positive");

  PovmConfig cfg;
  cfg.delta0 = delta0;
  cfg.delta1 = delta1;
  cfg.varsigma = 1.0 / (delta0 * delta0) + 1.0 / (delta1 * delta1);
  cfg.rho = rho;
  cfg.rho_min = povm_rho_min(delta0, delta1);
  if (rho < cfg.rho_min - kExactTol) {
    throw AssumptionViolation("Λ₃ not positive semidefinite: rho = " + format_value(rho) +
                              " is below rho_min = " + format_value(cfg.rho_min));
  }

  const double scale = 1.0 / std::sqrt(cfg.varsigma);
  cfg.m1 = {scale / delta0, scale / delta1};
  cfg.m2 = {scale / delta0, -scale / delta1};

  auto outer = [&](const std::array<Amplitude, 2>& m) {
    Matrix out(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) out(i, j) = m[static_cast<std::size_t>(i)] * std::conj(m[static_cast<std::size_t>(j)]) / rho;
    }
    return out;
  };
  Matrix lambda1 = outer(cfg.m1);
  Matrix lambda2 = outer(cfg.m2);
  Matrix lambda3 = Matrix::Identity(2, 2) - lambda1 - lambda2;
  cfg.elements.emplace_back("Lambda1", std::move(lambda1));
  cfg.elements.emplace_back("Lambda2", std::move(lambda2));
  cfg.elements.emplace_back("Lambda3", std::move(lambda3));
  qcore::validate_povm(cfg.elements);
  return cfg;
}

TeleportResult ramirez_teleport(const InputState& zeta, const ChannelParams& p, std::uint64_t seed,
                                const RamirezOptions& options) {
  if (!p.phase_aligned()) {
    throw AssumptionViolation("channel assumption violated: alpha/eta and beta/gamma must share phases");
  }
  Rng rng(seed);
  TeleportResult result;
  Transcript& t = result.transcript;
  const PureState reference = zeta.as_state(kQ4);

  PureState state = qcore::tensor_product(zeta.as_state(kInput), make_cluster_channel(p));

  // Step 1: Alice's Bell measurement.
  const auto alice_outcomes = qcore::bell_measure(state, kInput, kQ1);
  const auto& alice = sample_outcome(alice_outcomes, rng);
  record_measurement(t, "Alice", "bell", {kInput, kQ1}, alice);
  t.record(ClassicalMessage{"Alice", "Chika", bell_bits(kBellOutcomes[alice.index])});
  state = *alice.post_state;

  // Step 2: Bob's Bell measurement.
  const auto bob_outcomes = qcore::bell_measure(state, kQ2, kQ3);
  const auto& bob = sample_outcome(bob_outcomes, rng);
  record_measurement(t, "Bob", "bell", {kQ2, kQ3}, bob);
  t.record(ClassicalMessage{"Bob", "Chika", bell_bits(kBellOutcomes[bob.index])});
  state = *bob.post_state;

  // Step 3: bring Q4 to delta0 a|0> + delta1 b|1> with positive deltas.
  const RamirezBranch branch = table1_outcome(kBellOutcomes[alice.index], kBellOutcomes[bob.index], p);
  state = apply_correction(state, branch.pre_correction, t);
  const double d0 = std::abs(branch.delta0);
  const double d1 = std::abs(branch.delta1);
  if (d0 <= kExactTol || d1 <= kExactTol) {
    // Only one basis amplitude survived; there is nothing to discriminate.
    result.status = TeleportStatus::FailInconclusive;
    result.target_fidelity = receiver_fidelity(state, reference);
    return result;
  }
  if ((branch.delta1 / branch.delta0).real() < 0.0) state = apply_correction(state, CorrectionOp::Z, t);

  // Step 4: ancilla and C-NOT (Q4 -> E).
  state = qcore::tensor_product(state, PureState::basis({kAncilla}, 0));
  t.record(QubitPrepared{"Chika", kAncilla, "0"});
  state = qcore::apply_gate(state, GateMatrix::cnot(), {kQ4, kAncilla});
  t.record(GateApplied{"CNOT", {kQ4, kAncilla}});

  // Step 5: three-outcome POVM on E.
  const double rho = options.rho.value_or(std::max(2.0, povm_rho_min(d0, d1)));
  const PovmConfig cfg = make_povm(d0, d1, rho);
  const auto povm_outcomes = qcore::povm_measure(state, kAncilla, cfg.elements);
  const auto& povm = sample_outcome(povm_outcomes, rng);
  record_measurement(t, "Chika", "povm", {kAncilla}, povm);
  state = *povm.post_state;

  if (povm.index == 2) {
    result.status = TeleportStatus::FailInconclusive;
  } else {
    if (povm.index == 1) state = apply_correction(state, CorrectionOp::Z, t);
    result.status = TeleportStatus::Success;
  }
  result.target_fidelity = receiver_fidelity(state, reference);
  return result;
}

CritiqueReport critique_density_matrix(const InputState& zeta, const ChannelParams& p) {
  const double a2 = std::norm(zeta.a());
  const double b2 = std::norm(zeta.b());
  const double al2 = std::norm(p.alpha());
  const double be2 = std::norm(p.beta());
  const double ga2 = std::norm(p.gamma());
  const double et2 = std::norm(p.eta());
  const double p1 = (a2 * al2 + a2 * ga2 + b2 * be2 + b2 * et2) / 2.0;
  const double p2 = (b2 * al2 + b2 * ga2 + a2 * be2 + a2 * et2) / 2.0;

  const PureState state = qcore::tensor_product(zeta.as_state(kInput), make_cluster_channel(p));
  const std::vector<std::string> pair = {kInput, kQ1};

  Matrix ensemble = Matrix::Zero(4, 4);
  for (const auto& outcome : qcore::bell_measure(state, kInput, kQ1)) {
    if (!outcome.post_state) continue;
    ensemble += outcome.probability * qcore::reduced_density_matrix(*outcome.post_state, pair, DensityBasis::Bell).matrix();
  }
  ensemble = (ensemble + ensemble.adjoint()) / 2.0;

  Matrix closed = Matrix::Zero(4, 4);
  closed.diagonal() << p1, p1, p2, p2;

  CritiqueReport report{
      p1,
      p2,
      DensityMatrix(pair, closed, DensityBasis::Bell),
      DensityMatrix(pair, ensemble, DensityBasis::Bell),
      qcore::reduced_density_matrix(state, pair, DensityBasis::Bell),
      0.0,
      0.0,
  };
  report.max_deviation = qcore::max_abs_diff(report.after_measurement.matrix(), closed);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (i != j) report.max_off_diagonal = std::max(report.max_off_diagonal, std::abs(ensemble(i, j)));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Proposed scheme

BranchInfo table2_branch(BellOutcome bob, const ChannelParams& p) {
  p.require_aligned_and_ordered();
  BranchInfo branch;
  branch.bob = bob;
  const bool phi = bob == BellOutcome::PhiPlus || bob == BellOutcome::PhiMinus;
  const Amplitude small = phi ? p.alpha() : p.beta();
  const Amplitude large = phi ? p.eta() : p.gamma();
  const double norm2 = std::norm(small) + std::norm(large);
  const double v_sign = (bob == BellOutcome::PhiPlus || bob == BellOutcome::PsiMinus) ? -1.0 : 1.0;

  branch.tau_form = phi ? TauForm::Tau1 : TauForm::Tau2;
  branch.prob = norm2 / 2.0;
  if (norm2 <= kNegligibleProbability) {
    // Unreachable branch: pick the |u| = 0 representative.
    branch.u = 0.0;
    branch.v = 1.0;
  } else {
    const double norm = std::sqrt(norm2);
    branch.u = small / norm;
    branch.v = v_sign * large / norm;
  }
  const double c = std::min(1.0, std::abs(branch.u) / std::abs(branch.v));
  branch.n_hat = {std::sqrt(std::max(0.0, 1.0 - c * c)), 0.0, c};
  return branch;
}

PureState tau_state(const BranchInfo& branch) {
  std::vector<Amplitude> amps(4);
  if (branch.tau_form == TauForm::Tau1) {
    amps[0b00] = branch.u;
    amps[0b11] = branch.v;
  } else {
    amps[0b01] = branch.u;
    amps[0b10] = branch.v;
  }
  return PureState::normalized({kQ1, kQ4}, std::move(amps));
}

GateMatrix build_ua(const BranchInfo& branch) {
  const double u = std::abs(branch.u);
  const double v = std::abs(branch.v);
  if (u > v + kExactTol) {
    throw AssumptionViolation("build_ua: |u| = " + format_value(u) + " exceeds |v| = " + format_value(v));
  }
  const double c = v > 0.0 ? std::min(1.0, u / v) : 0.0;
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  Matrix m(2, 2);
  m << c, s, s, -c;
  return GateMatrix("U_A", m);
}

PureState apply_discrimination_circuit(const PureState& state, const GateMatrix& ua, Transcript* transcript) {
  auto note = [&](auto event) {
    if (transcript != nullptr) transcript->record(std::move(event));
  };
  const GateMatrix cnot = GateMatrix::cnot();
  PureState out = qcore::apply_gate(state, cnot, {kQ1, kInput});
  note(GateApplied{"CNOT", {kQ1, kInput}});
  out = qcore::tensor_product(out, PureState::basis({kAncilla}, 0));
  note(QubitPrepared{"Alice", kAncilla, "0"});
  out = qcore::apply_gate(out, cnot, {kInput, kAncilla});
  note(GateApplied{"CNOT", {kInput, kAncilla}});
  out = qcore::apply_gate(out, GateMatrix::controlled(ua, "C-U_A"), {kQ1, kInput});
  note(GateApplied{"C-U_A", {kQ1, kInput}});
  out = qcore::apply_gate(out, cnot, {kInput, kAncilla});
  note(GateApplied{"CNOT", {kInput, kAncilla}});
  return out;
}

CorrectionOp discriminate_correction(int e_bit, int z_a, bool x1_minus, TauForm tau) {
  if (e_bit != 0) throw std::invalid_argument("discriminate_correction: only defined on the E = 0 branch");
  if (z_a != 0 && z_a != 1) throw std::invalid_argument("discriminate_correction: z_a must be 0 or 1");
  // epsilon index: (0,+) -> 1, (0,-) -> 2, (1,-) -> 3, (1,+) -> 4
  std::size_t epsilon = 0;
  if (z_a == 0) {
    epsilon = x1_minus ? 1 : 0;
  } else {
    epsilon = x1_minus ? 2 : 3;
  }
  static constexpr std::array<CorrectionOp, 4> kTau1 = {CorrectionOp::Id, CorrectionOp::Z, CorrectionOp::X,
                                                        CorrectionOp::XZ};
  static constexpr std::array<CorrectionOp, 4> kTau2 = {CorrectionOp::X, CorrectionOp::XZ, CorrectionOp::Id,
                                                        CorrectionOp::Z};
  return tau == TauForm::Tau1 ? kTau1[epsilon] : kTau2[epsilon];
}

CorrectionOp receiver_frame(const BranchInfo& branch) {
  CorrectionOp frame = branch.tau_form == TauForm::Tau2 ? CorrectionOp::X : CorrectionOp::Id;
  if (std::abs(branch.u) > kExactTol && std::abs(branch.v) > kExactTol && (branch.v / branch.u).real() < 0.0) {
    frame = compose(frame, CorrectionOp::Z);
  }
  return frame;
}

std::optional<GateMatrix> sender_alignment(const BranchInfo& branch) {
  if (branch.tau_form == TauForm::Tau2) return GateMatrix::pauli_x();
  return std::nullopt;
}

namespace {

// Bob's measurement and Alice's local alignment, shared by the sampled driver
// and the exact enumeration.
PureState prepare_branch(const PureState& after_bob, const BranchInfo& branch, Transcript* t) {
  if (const auto align = sender_alignment(branch)) {
    if (t != nullptr) t->record(GateApplied{align->name(), {kQ1}});
    return qcore::apply_gate(after_bob, *align, {kQ1});
  }
  return after_bob;
}

}  // namespace

TeleportResult run_proposed_attempt(const PureState& sender, const ChannelParams& p, Rng& rng,
                                    const PureState& reference) {
  p.require_aligned_and_ordered();
  if (sender.num_qubits() != 1) throw InvariantError("run_proposed_attempt: sender must be a single qubit");

  TeleportResult result;
  Transcript& t = result.transcript;
  PureState state = qcore::tensor_product(sender.relabeled({kInput}), make_cluster_channel(p));

  // Step 1: Bob's Bell measurement fixes the collapsed (Q1, Q4) pair.
  const auto bob_outcomes = qcore::bell_measure(state, kQ2, kQ3);
  const auto& bob = sample_outcome(bob_outcomes, rng);
  record_measurement(t, "Bob", "bell", {kQ2, kQ3}, bob);
  const BellOutcome bob_result = kBellOutcomes[bob.index];
  t.record(ClassicalMessage{"Bob", "Alice", bell_bits(bob_result)});
  t.record(ClassicalMessage{"Bob", "Chika", bell_bits(bob_result)});
  const BranchInfo branch = table2_branch(bob_result, p);

  // Steps 2-3: alignment and the discrimination circuit.
  state = prepare_branch(*bob.post_state, branch, &t);
  state = apply_discrimination_circuit(state, build_ua(branch), &t);

  // Step 4: E decides the run.
  const auto e_outcomes = qcore::measure_projective(state, kAncilla, qcore::MeasureBasis::Z);
  const auto& e = sample_outcome(e_outcomes, rng);
  record_measurement(t, "Alice", "z", {kAncilla}, e);
  state = *e.post_state;

  if (e.index == 0) {
    const auto a_outcomes = qcore::measure_projective(state, kInput, qcore::MeasureBasis::Z);
    const auto& a = sample_outcome(a_outcomes, rng);
    record_measurement(t, "Alice", "z", {kInput}, a);
    state = *a.post_state;

    const auto q1_outcomes = qcore::measure_projective(state, kQ1, qcore::MeasureBasis::X);
    const auto& q1 = sample_outcome(q1_outcomes, rng);
    record_measurement(t, "Alice", "x", {kQ1}, q1);
    state = *q1.post_state;

    const int z_a = static_cast<int>(a.index);
    const bool x1_minus = q1.index == 1;
    t.record(ClassicalMessage{"Alice", "Chika", std::to_string(z_a) + (x1_minus ? "1" : "0")});
    const CorrectionOp op = compose(discriminate_correction(0, z_a, x1_minus, branch.tau_form), receiver_frame(branch));
    state = apply_correction(state, op, t);
    result.status = TeleportStatus::Success;
    result.target_fidelity = receiver_fidelity(state, reference);
    return result;
  }

  result.status = TeleportStatus::FailRecoverable;
  result.recovered_sender = qcore::extract_subsystem(state, {kInput});
  result.sender_fidelity_on_fail = qcore::fidelity(*result.recovered_sender, reference);
  const auto q4 = qcore::reduced_density_matrix(state, {kQ4});
  result.receiver_fail_bit = q4(1, 1).real() > 0.5 ? 1 : 0;
  result.target_fidelity = qcore::fidelity(q4, reference);
  return result;
}

TeleportResult proposed_teleport(const InputState& zeta, const ChannelParams& p, std::uint64_t seed) {
  Rng rng(seed);
  const PureState input = zeta.as_state(kInput);
  return run_proposed_attempt(input, p, rng, input);
}

std::vector<ProposedBranchStats> enumerate_proposed(const InputState& zeta, const ChannelParams& p) {
  p.require_aligned_and_ordered();
  const PureState state = qcore::tensor_product(zeta.as_state(kInput), make_cluster_channel(p));
  std::vector<ProposedBranchStats> stats;
  for (const auto& bob : qcore::bell_measure(state, kQ2, kQ3)) {
    ProposedBranchStats row;
    row.bob = kBellOutcomes[bob.index];
    row.bob_probability = bob.probability;
    if (bob.post_state) {
      const BranchInfo branch = table2_branch(row.bob, p);
      const PureState prepared = prepare_branch(*bob.post_state, branch, nullptr);
      const PureState circuit = apply_discrimination_circuit(prepared, build_ua(branch));
      row.success_given_bob = qcore::measure_projective(circuit, kAncilla, qcore::MeasureBasis::Z)[0].probability;
    }
    stats.push_back(row);
  }
  return stats;
}

}  // namespace cluster_teleport::protocols
