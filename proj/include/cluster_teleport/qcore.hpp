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

/// Dense state-vector engine for small labeled qubit registers.
///
/// Basis indices are big-endian in the label list: labels()[0] is the most
/// significant bit. Every value type here is immutable after construction and
/// validates its invariants in the constructor, so a PureState that exists is
/// normalized and a GateMatrix that exists is unitary.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cluster_teleport::qcore {

using Amplitude = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Tolerance for deterministic linear algebra (norms, unitarity, traces).
inline constexpr double kExactTol = 1e-12;
/// Tolerance for accumulated sums (POVM completeness).
inline constexpr double kSumTol = 1e-10;
/// Outcomes below this probability carry no post-measurement state.
inline constexpr double kNegligibleProbability = 1e-24;

/// Raised when a value would violate a type invariant (bad labels, wrong
/// dimensions, non-normalized amplitudes, non-unitary gates, ...).
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PureState {
 public:
  /// Throws InvariantError unless labels are unique, amps.size() == 2^n,
  /// every amplitude is finite and the norm is 1 within kExactTol.
  PureState(std::vector<std::string> labels, std::vector<Amplitude> amps);

  /// Rescales `amps` to unit norm. Throws on a zero vector.
  static PureState normalized(std::vector<std::string> labels, std::vector<Amplitude> amps);
  static PureState basis(std::vector<std::string> labels, std::uint64_t index);
  static PureState qubit(std::string label, Amplitude amp0, Amplitude amp1);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Amplitude>& amplitudes() const { return amps_; }
  Amplitude amplitude(std::uint64_t index) const { return amps_.at(index); }
  std::size_t num_qubits() const { return labels_.size(); }
  std::size_t dim() const { return amps_.size(); }

  bool has_label(const std::string& label) const;
  /// Position of `label` in labels(); throws InvariantError if absent.
  std::size_t position(const std::string& label) const;

  /// Same physical state with the qubits listed in `order`.
  PureState permuted(const std::vector<std::string>& order) const;
  PureState relabeled(std::vector<std::string> labels) const;

 private:
  std::vector<std::string> labels_;
  std::vector<Amplitude> amps_;
};

class GateMatrix {
 public:
  /// Throws InvariantError unless `matrix` is 2^k x 2^k and unitary within kExactTol.
  GateMatrix(std::string name, Matrix matrix);

  static GateMatrix identity();
  static GateMatrix pauli_x();
  static GateMatrix pauli_y();
  static GateMatrix pauli_z();
  static GateMatrix hadamard();
  /// Control is the first target, the flipped qubit the second.
  static GateMatrix cnot();
  /// Block diag(I, u): the first target controls `u` on the remaining targets.
  static GateMatrix controlled(const GateMatrix& u, std::string name = {});

  const std::string& name() const { return name_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t arity() const { return arity_; }

 private:
  std::string name_;
  Matrix matrix_;
  std::size_t arity_;
};

/// Single-qubit POVM element: Hermitian and positive semidefinite.
class PovmElement {
 public:
  PovmElement(std::string name, Matrix entries);

  const std::string& name() const { return name_; }
  const Matrix& matrix() const { return entries_; }
  /// Canonical square-root Kraus operator.
  Matrix kraus() const;

 private:
  std::string name_;
  Matrix entries_;
};

enum class DensityBasis { Computational, Bell };

class DensityMatrix {
 public:
  /// Throws InvariantError unless Hermitian, unit trace and PSD within kExactTol.
  DensityMatrix(std::vector<std::string> labels, Matrix entries,
                DensityBasis basis = DensityBasis::Computational);

  const std::vector<std::string>& labels() const { return labels_; }
  const Matrix& matrix() const { return entries_; }
  DensityBasis basis() const { return basis_; }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  Amplitude operator()(std::size_t row, std::size_t col) const { return entries_(row, col); }

  double purity() const;
  std::vector<double> eigenvalues() const;
  /// Rewrites a two-qubit Bell-basis matrix in the computational basis (and back).
  DensityMatrix in_basis(DensityBasis target) const;

 private:
  std::vector<std::string> labels_;
  Matrix entries_;
  DensityBasis basis_;
};

enum class MeasureBasis { Z, X };

struct MeasurementOutcome {
  std::string label;
  std::size_t index = 0;
  double probability = 0.0;
  /// Renormalized post-measurement state; absent when probability is negligible.
  std::optional<PureState> post_state;
};

PureState tensor_product(const PureState& lhs, const PureState& rhs);

/// Applies `gate` with targets[0] as the gate's most significant qubit.
PureState apply_gate(const PureState& state, const GateMatrix& gate,
                     const std::vector<std::string>& targets);

/// Applies an arbitrary operator without renormalizing.
std::vector<Amplitude> apply_operator(const PureState& state, const Matrix& op,
                                      const std::vector<std::string>& targets);

/// Outcomes in fixed order: Z gives {0, 1}, X gives {+, -}.
std::vector<MeasurementOutcome> measure_projective(const PureState& state, const std::string& target,
                                                   MeasureBasis basis);

/// Outcomes in fixed order {phi+, phi-, psi+, psi-}, with
/// phi± = (|00> ± |11>)/√2 and psi± = (|01> ± |10>)/√2 on (q1, q2).
std::vector<MeasurementOutcome> bell_measure(const PureState& state, const std::string& q1,
                                             const std::string& q2);

/// Rejects element sets whose sum differs from I by more than kSumTol.
void validate_povm(std::span<const PovmElement> elements);

std::vector<MeasurementOutcome> povm_measure(const PureState& state, const std::string& target,
                                             std::span<const PovmElement> elements);

/// Partial trace onto `keep` (keep[0] most significant). The Bell basis is
/// only available for two kept qubits, ordered {phi+, phi-, psi+, psi-}.
DensityMatrix reduced_density_matrix(const PureState& state, const std::vector<std::string>& keep,
                                     DensityBasis basis = DensityBasis::Computational);
DensityMatrix reduced_density_matrix(const DensityMatrix& rho, const std::vector<std::string>& keep);

/// |<reference|state>|^2; labels are ignored, dimensions must agree.
double fidelity(const PureState& state, const PureState& reference);
/// <reference|rho|reference>, evaluated in the computational basis.
double fidelity(const DensityMatrix& rho, const PureState& reference);

/// True when |<x|y>| = 1 within `tol` (equality modulo global phase).
bool equal_up_to_phase(const PureState& x, const PureState& y, double tol = kExactTol);

/// Pure state of the `keep` qubits when they factor out of the register.
/// Throws InvariantError if their reduced state has purity below 1 - tol.
PureState extract_subsystem(const PureState& state, const std::vector<std::string>& keep,
                            double tol = 1e-9);

/// Bell basis vectors as columns, ordered {phi+, phi-, psi+, psi-}.
Matrix bell_basis();

double max_abs_diff(const Matrix& lhs, const Matrix& rhs);

}  // namespace cluster_teleport::qcore
