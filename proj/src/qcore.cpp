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

#include "cluster_teleport/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace cluster_teleport::qcore {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t log2_exact(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

double norm_squared(std::span<const Amplitude> amps) {
  double total = 0.0;
  for (const auto& amp : amps) total += std::norm(amp);
  return total;
}

void require_unique(const std::vector<std::string>& labels, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second) {
      throw InvariantError(std::string(what) + ": duplicate qubit label '" + label + "'");
    }
  }
}

// Bit shifts (from the least significant end) of each target in `state`.
std::vector<std::size_t> target_shifts(const PureState& state, const std::vector<std::string>& targets) {
  require_unique(targets, "targets");
  std::vector<std::size_t> shifts;
  shifts.reserve(targets.size());
  for (const auto& label : targets) {
    shifts.push_back(state.num_qubits() - 1 - state.position(label));
  }
  return shifts;
}

MeasurementOutcome make_outcome(const PureState& state, std::string label, std::size_t index,
                                std::vector<Amplitude> projected) {
  MeasurementOutcome outcome;
  outcome.label = std::move(label);
  outcome.index = index;
  outcome.probability = norm_squared(projected);
  if (outcome.probability > kNegligibleProbability) {
    outcome.post_state = PureState::normalized(state.labels(), std::move(projected));
  }
  return outcome;
}

void check_complete(const std::vector<MeasurementOutcome>& outcomes, double tol) {
  double total = 0.0;
  for (const auto& outcome : outcomes) {
    if (outcome.probability < -tol || outcome.probability > 1.0 + tol) {
      throw std::logic_error("measurement probability outside [0, 1]");
    }
    total += outcome.probability;
  }
  if (std::abs(total - 1.0) > tol) {
    throw std::logic_error("measurement outcomes are not complete");
  }
}

std::vector<MeasurementOutcome> measure_with_projectors(const PureState& state,
                                                        const std::vector<std::string>& targets,
                                                        const std::vector<Matrix>& projectors,
                                                        const std::vector<std::string>& names) {
  std::vector<MeasurementOutcome> outcomes;
  outcomes.reserve(projectors.size());
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    outcomes.push_back(make_outcome(state, names[k], k, apply_operator(state, projectors[k], targets)));
  }
  check_complete(outcomes, kExactTol);
  return outcomes;
}

Matrix projector(const Eigen::VectorXcd& v) { return v * v.adjoint(); }

std::vector<double> hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  const auto& values = solver.eigenvalues();
  return {values.data(), values.data() + values.size()};
}

double hermiticity_defect(const Matrix& m) { return max_abs_diff(m, m.adjoint()); }

std::string format_double(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

}  // namespace

double max_abs_diff(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) {
    throw InvariantError("max_abs_diff: shape mismatch");
  }
  if (lhs.size() == 0) return 0.0;
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

Matrix bell_basis() {
  Matrix b = Matrix::Zero(4, 4);
  // columns: phi+, phi-, psi+, psi-
  b(0, 0) = kInvSqrt2;
  b(3, 0) = kInvSqrt2;
  b(0, 1) = kInvSqrt2;
  b(3, 1) = -kInvSqrt2;
  b(1, 2) = kInvSqrt2;
  b(2, 2) = kInvSqrt2;
  b(1, 3) = kInvSqrt2;
  b(2, 3) = -kInvSqrt2;
  return b;
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(std::vector<std::string> labels, std::vector<Amplitude> amps)
    : labels_(std::move(labels)), amps_(std::move(amps)) {
  if (labels_.empty()) throw InvariantError("PureState: at least one qubit is required");
  if (labels_.size() > 16) throw InvariantError("PureState: too many qubits for a dense vector");
  require_unique(labels_, "PureState");
  if (amps_.size() != (std::size_t{1} << labels_.size())) {
    throw InvariantError("PureState: expected " + std::to_string(std::size_t{1} << labels_.size()) +
                         " amplitudes, got " + std::to_string(amps_.size()));
  }
  for (const auto& amp : amps_) {
    if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag())) {
      throw InvariantError("PureState: non-finite amplitude");
    }
  }
  const double norm = norm_squared(amps_);
  if (std::abs(norm - 1.0) > kExactTol) {
    throw InvariantError("PureState: squared norm " + format_double(norm) + " is not 1");
  }
}

PureState PureState::normalized(std::vector<std::string> labels, std::vector<Amplitude> amps) {
  const double norm = std::sqrt(norm_squared(amps));
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvariantError("PureState: cannot normalize a zero vector");
  for (auto& amp : amps) amp /= norm;
  return PureState(std::move(labels), std::move(amps));
}

PureState PureState::basis(std::vector<std::string> labels, std::uint64_t index) {
  std::vector<Amplitude> amps(std::size_t{1} << labels.size());
  if (index >= amps.size()) throw InvariantError("PureState::basis: index out of range");
  amps[index] = 1.0;
  return PureState(std::move(labels), std::move(amps));
}

PureState PureState::qubit(std::string label, Amplitude amp0, Amplitude amp1) {
  return PureState({std::move(label)}, {amp0, amp1});
}

bool PureState::has_label(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t PureState::position(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InvariantError("unknown qubit label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

PureState PureState::permuted(const std::vector<std::string>& order) const {
  if (order.size() != labels_.size()) throw InvariantError("permuted: label count mismatch");
  require_unique(order, "permuted");
  const std::size_t n = labels_.size();
  // new position j holds old qubit at position old_pos[j]
  std::vector<std::size_t> old_pos(n);
  for (std::size_t j = 0; j < n; ++j) old_pos[j] = position(order[j]);

  std::vector<Amplitude> out(amps_.size());
  for (std::size_t old_index = 0; old_index < amps_.size(); ++old_index) {
    std::size_t new_index = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t bit = (old_index >> (n - 1 - old_pos[j])) & 1U;
      new_index |= bit << (n - 1 - j);
    }
    out[new_index] = amps_[old_index];
  }
  return PureState(order, std::move(out));
}

PureState PureState::relabeled(std::vector<std::string> labels) const {
  if (labels.size() != labels_.size()) throw InvariantError("relabeled: label count mismatch");
  return PureState(std::move(labels), amps_);
}

// ---------------------------------------------------------------------------
// GateMatrix

GateMatrix::GateMatrix(std::string name, Matrix matrix) : name_(std::move(name)), matrix_(std::move(matrix)) {
  const auto dim = static_cast<std::size_t>(matrix_.rows());
  if (matrix_.rows() != matrix_.cols() || !is_power_of_two(dim) || dim < 2) {
    throw InvariantError("GateMatrix '" + name_ + "': must be square with dimension 2^k");
  }
  if (!matrix_.allFinite()) throw InvariantError("GateMatrix '" + name_ + "': non-finite entry");
  const double defect = max_abs_diff(matrix_.adjoint() * matrix_, Matrix::Identity(matrix_.rows(), matrix_.cols()));
  if (defect > kExactTol) {
    throw InvariantError("GateMatrix '" + name_ + "': not unitary (max |U^dag U - I| = " + format_double(defect) + ")");
  }
  arity_ = log2_exact(dim);
}

GateMatrix GateMatrix::identity() { return GateMatrix("I", Matrix::Identity(2, 2)); }

GateMatrix GateMatrix::pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return GateMatrix("X", m);
}

GateMatrix GateMatrix::pauli_y() {
  Matrix m(2, 2);
  m << 0, Amplitude(0, -1), Amplitude(0, 1), 0;
  return GateMatrix("Y", m);
}

GateMatrix GateMatrix::pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return GateMatrix("Z", m);
}

GateMatrix GateMatrix::hadamard() {
  Matrix m(2, 2);
  m << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return GateMatrix("H", m);
}

GateMatrix GateMatrix::cnot() { return controlled(pauli_x(), "CNOT"); }

GateMatrix GateMatrix::controlled(const GateMatrix& u, std::string name) {
  const auto d = u.matrix().rows();
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  m.topLeftCorner(d, d) = Matrix::Identity(d, d);
  m.bottomRightCorner(d, d) = u.matrix();
  if (name.empty()) name = "C" + u.name();
  return GateMatrix(std::move(name), std::move(m));
}

// ---------------------------------------------------------------------------
// PovmElement

PovmElement::PovmElement(std::string name, Matrix entries) : name_(std::move(name)), entries_(std::move(entries)) {
  if (entries_.rows() != 2 || entries_.cols() != 2) {
    throw InvariantError("POVM element '" + name_ + "': must be 2x2");
  }
  if (!entries_.allFinite()) throw InvariantError("POVM element '" + name_ + "': non-finite entry");
  if (hermiticity_defect(entries_) > kExactTol) {
    throw InvariantError("POVM element '" + name_ + "': not Hermitian");
  }
  const auto values = hermitian_eigenvalues(entries_);
  if (values.front() < -kExactTol) {
    throw InvariantError("POVM element '" + name_ + "': not positive semidefinite (eigenvalue " +
                         format_double(values.front()) + ")");
  }
}

Matrix PovmElement::kraus() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_);
  Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix& vecs = solver.eigenvectors();
  return vecs * roots.cast<Amplitude>().asDiagonal() * vecs.adjoint();
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(std::vector<std::string> labels, Matrix entries, DensityBasis basis)
    : labels_(std::move(labels)), entries_(std::move(entries)), basis_(basis) {
  require_unique(labels_, "DensityMatrix");
  const auto dim = static_cast<std::size_t>(entries_.rows());
  if (entries_.rows() != entries_.cols() || dim != (std::size_t{1} << labels_.size())) {
    throw InvariantError("DensityMatrix: dimension does not match labels");
  }
  if (basis_ == DensityBasis::Bell && labels_.size() != 2) {
    throw InvariantError("DensityMatrix: Bell basis requires exactly two qubits");
  }
  if (!entries_.allFinite()) throw InvariantError("DensityMatrix: non-finite entry");
  if (hermiticity_defect(entries_) > kExactTol) throw InvariantError("DensityMatrix: not Hermitian");
  const Amplitude trace = entries_.trace();
  if (std::abs(trace - Amplitude(1.0)) > kExactTol) {
    throw InvariantError("DensityMatrix: trace " + format_double(trace.real()) + " is not 1");
  }
  const auto values = hermitian_eigenvalues(entries_);
  if (values.front() < -kExactTol) {
    throw InvariantError("DensityMatrix: not positive semidefinite (eigenvalue " + format_double(values.front()) + ")");
  }
}

double DensityMatrix::purity() const { return (entries_ * entries_).trace().real(); }

std::vector<double> DensityMatrix::eigenvalues() const { return hermitian_eigenvalues(entries_); }

DensityMatrix DensityMatrix::in_basis(DensityBasis target) const {
  if (target == basis_) return *this;
  if (labels_.size() != 2) throw InvariantError("DensityMatrix: Bell basis requires exactly two qubits");
  const Matrix b = bell_basis();
  Matrix converted = target == DensityBasis::Bell ? Matrix(b.adjoint() * entries_ * b)
                                                  : Matrix(b * entries_ * b.adjoint());
  // Hermitian part only; the similarity transform leaves ~1e-17 skew noise.
  converted = (converted + converted.adjoint()) / 2.0;
  return DensityMatrix(labels_, std::move(converted), target);
}

// ---------------------------------------------------------------------------
// Operations

PureState tensor_product(const PureState& lhs, const PureState& rhs) {
  std::vector<std::string> labels = lhs.labels();
  for (const auto& label : rhs.labels()) {
    if (lhs.has_label(label)) throw InvariantError("tensor_product: duplicate qubit label '" + label + "'");
    labels.push_back(label);
  }
  std::vector<Amplitude> amps;
  amps.reserve(lhs.dim() * rhs.dim());
  for (const auto& l : lhs.amplitudes()) {
    for (const auto& r : rhs.amplitudes()) amps.push_back(l * r);
  }
  // Product of two unit vectors is unit up to rounding; renormalize to keep it exact.
  return PureState::normalized(std::move(labels), std::move(amps));
}

std::vector<Amplitude> apply_operator(const PureState& state, const Matrix& op,
                                      const std::vector<std::string>& targets) {
  const std::size_t k = targets.size();
  if (k == 0 || op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != (std::size_t{1} << k)) {
    throw InvariantError("operator dimension does not match " + std::to_string(k) + " target(s)");
  }
  const auto shifts = target_shifts(state, targets);
  std::size_t target_mask = 0;
  for (auto s : shifts) target_mask |= std::size_t{1} << s;

  const std::size_t sub_dim = std::size_t{1} << k;
  std::vector<std::size_t> offsets(sub_dim, 0);
  for (std::size_t t = 0; t < sub_dim; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      if ((t >> (k - 1 - j)) & 1U) offsets[t] |= std::size_t{1} << shifts[j];
    }
  }

  const auto& in = state.amplitudes();
  std::vector<Amplitude> out(in.size());
  std::vector<Amplitude> gathered(sub_dim);
  for (std::size_t base = 0; base < in.size(); ++base) {
    if (base & target_mask) continue;
    for (std::size_t t = 0; t < sub_dim; ++t) gathered[t] = in[base | offsets[t]];
    for (std::size_t s = 0; s < sub_dim; ++s) {
      Amplitude acc = 0.0;
      for (std::size_t t = 0; t < sub_dim; ++t) acc += op(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) * gathered[t];
      out[base | offsets[s]] = acc;
    }
  }
  return out;
}

PureState apply_gate(const PureState& state, const GateMatrix& gate, const std::vector<std::string>& targets) {
  if (targets.size() != gate.arity()) {
    throw InvariantError("apply_gate: gate '" + gate.name() + "' acts on " + std::to_string(gate.arity()) +
                         " qubit(s), got " + std::to_string(targets.size()) + " target(s)");
  }
  return PureState(state.labels(), apply_operator(state, gate.matrix(), targets));
}

std::vector<MeasurementOutcome> measure_projective(const PureState& state, const std::string& target,
                                                   MeasureBasis basis) {
  Eigen::VectorXcd first(2), second(2);
  std::vector<std::string> names;
  if (basis == MeasureBasis::Z) {
    first << 1, 0;
    second << 0, 1;
    names = {"0", "1"};
  } else {
    first << kInvSqrt2, kInvSqrt2;
    second << kInvSqrt2, -kInvSqrt2;
    names = {"+", "-"};
  }
  return measure_with_projectors(state, {target}, {projector(first), projector(second)}, names);
}

std::vector<MeasurementOutcome> bell_measure(const PureState& state, const std::string& q1, const std::string& q2) {
  if (q1 == q2) throw InvariantError("bell_measure: qubits must be distinct");
  const Matrix b = bell_basis();
  std::vector<Matrix> projectors;
  for (int k = 0; k < 4; ++k) projectors.push_back(projector(b.col(k)));
  return measure_with_projectors(state, {q1, q2}, projectors, {"phi+", "phi-", "psi+", "psi-"});
}

void validate_povm(std::span<const PovmElement> elements) {
  if (elements.empty()) throw InvariantError("POVM: empty element set");
  Matrix total = Matrix::Zero(2, 2);
  for (const auto& element : elements) total += element.matrix();
  const double defect = max_abs_diff(total, Matrix::Identity(2, 2));
  if (defect > kSumTol) {
    const auto values = hermitian_eigenvalues(total);
    throw InvariantError("POVM: elements are not complete (max |sum - I| = " + format_double(defect) +
                         ", eigenvalues of sum " + format_double(values.front()) + ", " +
                         format_double(values.back()) + ")");
  }
}

std::vector<MeasurementOutcome> povm_measure(const PureState& state, const std::string& target,
                                             std::span<const PovmElement> elements) {
  validate_povm(elements);
  std::vector<MeasurementOutcome> outcomes;
  outcomes.reserve(elements.size());
  for (std::size_t k = 0; k < elements.size(); ++k) {
    outcomes.push_back(make_outcome(state, elements[k].name(), k, apply_operator(state, elements[k].kraus(), {target})));
  }
  check_complete(outcomes, kSumTol);
  return outcomes;
}

DensityMatrix reduced_density_matrix(const PureState& state, const std::vector<std::string>& keep, DensityBasis basis) {
  if (keep.empty()) throw InvariantError("reduced_density_matrix: keep set is empty");
  if (basis == DensityBasis::Bell && keep.size() != 2) {
    throw InvariantError("reduced_density_matrix: Bell basis requires exactly two kept qubits");
  }
  const auto keep_shifts = target_shifts(state, keep);
  const std::size_t n = state.num_qubits();
  std::vector<std::size_t> env_shifts;
  for (std::size_t s = n; s-- > 0;) {
    if (std::find(keep_shifts.begin(), keep_shifts.end(), s) == keep_shifts.end()) env_shifts.push_back(s);
  }

  const std::size_t keep_dim = std::size_t{1} << keep.size();
  const std::size_t env_dim = std::size_t{1} << env_shifts.size();
  Matrix psi = Matrix::Zero(static_cast<Eigen::Index>(keep_dim), static_cast<Eigen::Index>(env_dim));
  const auto& amps = state.amplitudes();
  for (std::size_t index = 0; index < amps.size(); ++index) {
    std::size_t row = 0;
    for (auto s : keep_shifts) row = (row << 1) | ((index >> s) & 1U);
    std::size_t col = 0;
    for (auto s : env_shifts) col = (col << 1) | ((index >> s) & 1U);
    psi(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = amps[index];
  }
  Matrix rho = psi * psi.adjoint();
  DensityMatrix reduced(keep, std::move(rho));
  return basis == DensityBasis::Bell ? reduced.in_basis(DensityBasis::Bell) : reduced;
}

DensityMatrix reduced_density_matrix(const DensityMatrix& rho_in, const std::vector<std::string>& keep) {
  if (keep.empty()) throw InvariantError("reduced_density_matrix: keep set is empty");
  require_unique(keep, "reduced_density_matrix");
  const DensityMatrix rho = rho_in.in_basis(DensityBasis::Computational);
  const auto& labels = rho.labels();
  const std::size_t n = labels.size();
  std::vector<std::size_t> keep_shifts;
  for (const auto& label : keep) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw InvariantError("unknown qubit label '" + label + "'");
    keep_shifts.push_back(n - 1 - static_cast<std::size_t>(it - labels.begin()));
  }
  const std::size_t keep_dim = std::size_t{1} << keep.size();
  std::size_t keep_mask = 0;
  for (auto s : keep_shifts) keep_mask |= std::size_t{1} << s;

  auto keep_index = [&](std::size_t index) {
    std::size_t row = 0;
    for (auto s : keep_shifts) row = (row << 1) | ((index >> s) & 1U);
    return row;
  };

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(keep_dim), static_cast<Eigen::Index>(keep_dim));
  const std::size_t dim = rho.dim();
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      if ((i & ~keep_mask) != (j & ~keep_mask)) continue;
      out(static_cast<Eigen::Index>(keep_index(i)), static_cast<Eigen::Index>(keep_index(j))) +=
          rho(i, j);
    }
  }
  return DensityMatrix(keep, std::move(out));
}

double fidelity(const PureState& state, const PureState& reference) {
  if (state.dim() != reference.dim()) throw InvariantError("fidelity: dimension mismatch");
  Amplitude overlap = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    overlap += std::conj(reference.amplitudes()[i]) * state.amplitudes()[i];
  }
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho_in, const PureState& reference) {
  if (rho_in.dim() != reference.dim()) throw InvariantError("fidelity: dimension mismatch");
  const DensityMatrix rho = rho_in.in_basis(DensityBasis::Computational);
  const Eigen::Map<const Eigen::VectorXcd> ref(reference.amplitudes().data(),
                                               static_cast<Eigen::Index>(reference.dim()));
  const Amplitude value = ref.dot(rho.matrix() * ref);
  return std::clamp(value.real(), 0.0, 1.0);
}

bool equal_up_to_phase(const PureState& x, const PureState& y, double tol) {
  if (x.dim() != y.dim()) return false;
  return 1.0 - std::sqrt(fidelity(x, y)) <= tol;
}

PureState extract_subsystem(const PureState& state, const std::vector<std::string>& keep, double tol) {
  const DensityMatrix rho = reduced_density_matrix(state, keep);
  const double purity = rho.purity();
  if (purity < 1.0 - tol) {
    throw InvariantError("extract_subsystem: qubits are entangled with the rest (purity " + format_double(purity) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix());
  Eigen::VectorXcd v = solver.eigenvectors().col(solver.eigenvectors().cols() - 1);
  // Fix the global phase: largest component real and positive.
  Eigen::Index pivot = 0;
  v.cwiseAbs().maxCoeff(&pivot);
  v *= std::conj(v(pivot)) / std::abs(v(pivot));
  return PureState::normalized(keep, std::vector<Amplitude>(v.data(), v.data() + v.size()));
}

}  // namespace cluster_teleport::qcore
