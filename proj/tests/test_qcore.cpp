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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cluster_teleport/qcore.hpp"
#include "generators.hpp"

namespace {

using namespace cluster_teleport::qcore;
using ct_testing::random_state;
using ct_testing::random_unitary;

constexpr double kTol = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

Eigen::VectorXcd as_vector(const PureState& s) {
  return Eigen::Map<const Eigen::VectorXcd>(s.amplitudes().data(), static_cast<Eigen::Index>(s.dim()));
}

double norm_of(const PureState& s) { return as_vector(s).norm(); }

// ---------------------------------------------------------------------------

TEST(PureState, RejectsBadInput) {
  EXPECT_THROW(PureState({"a"}, {1.0, 1.0}), InvariantError);
  EXPECT_THROW(PureState({"a", "a"}, {1.0, 0.0, 0.0, 0.0}), InvariantError);
  EXPECT_THROW(PureState({"a"}, {1.0, 0.0, 0.0}), InvariantError);
  EXPECT_THROW(PureState({"a"}, {std::nan(""), 0.0}), InvariantError);
  EXPECT_THROW(PureState::normalized({"a"}, {0.0, 0.0}), InvariantError);
}

TEST(PureState, BasisIsBigEndian) {
  const auto s = PureState::basis({"x", "y", "z"}, 0b100);
  EXPECT_EQ(s.amplitude(4), Amplitude(1.0));
  const auto x = PureState::basis({"x"}, 1);
  const auto yz = PureState::basis({"y", "z"}, 0);
  EXPECT_EQ(tensor_product(x, yz).amplitudes(), s.amplitudes());
}

TEST(PureState, PermutedMovesBits) {
  std::vector<Amplitude> amps(8);
  amps[0b110] = 1.0;  // a=1, b=1, c=0
  const PureState s({"a", "b", "c"}, amps);
  const auto p = s.permuted({"c", "a", "b"});
  EXPECT_EQ(p.amplitude(0b011), Amplitude(1.0));
  EXPECT_EQ(p.labels(), (std::vector<std::string>{"c", "a", "b"}));
}

TEST(Gate, CnotControlIsFirstTarget) {
  const auto s = PureState::basis({"a", "b"}, 0b01);  // a=0, b=1
  EXPECT_EQ(apply_gate(s, GateMatrix::cnot(), {"b", "a"}).amplitude(0b11), Amplitude(1.0));
  EXPECT_EQ(apply_gate(s, GateMatrix::cnot(), {"a", "b"}).amplitude(0b01), Amplitude(1.0));
}

TEST(Gate, RejectsNonUnitary) {
  Matrix m(2, 2);
  m << 1, 1, 0, 1;
  EXPECT_THROW(GateMatrix("bad", m), InvariantError);
}

TEST(Gate, ControlledBlockStructure) {
  const auto cz = GateMatrix::controlled(GateMatrix::pauli_z());
  Matrix expected = Matrix::Identity(4, 4);
  expected(3, 3) = -1.0;
  EXPECT_LT(max_abs_diff(cz.matrix(), expected), kTol);
}

// Oracle: the explicit Kronecker-product operator on the full register.
TEST(GateProperty, MatchesKroneckerOracleAndPreservesNorm) {
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_state(gen, {"q0", "q1", "q2"});
    const Matrix u = random_unitary(gen, 2);
    const GateMatrix g("U", u);
    const Matrix id = Matrix::Identity(2, 2);

    const auto on_middle = apply_gate(s, g, {"q1"});
    const Eigen::VectorXcd expected = kron(kron(id, u), id) * as_vector(s);
    EXPECT_LT((as_vector(on_middle) - expected).cwiseAbs().maxCoeff(), kTol) << "trial " << trial;
    EXPECT_NEAR(norm_of(on_middle), 1.0, kTol);

    const Matrix u2 = random_unitary(gen, 4);
    const auto on_pair = apply_gate(s, GateMatrix("U2", u2), {"q0", "q2"});
    // (q0, q2) on a register ordered (q0, q1, q2): conjugate by SWAP(q1, q2).
    Matrix swap12 = Matrix::Zero(8, 8);
    for (int i = 0; i < 8; ++i) {
      const int j = (i & 0b100) | ((i & 0b010) >> 1) | ((i & 0b001) << 1);
      swap12(j, i) = 1.0;
    }
    const Eigen::VectorXcd expected2 = swap12 * kron(u2, id) * swap12 * as_vector(s);
    EXPECT_LT((as_vector(on_pair) - expected2).cwiseAbs().maxCoeff(), kTol) << "trial " << trial;
  }
}

TEST(GateProperty, RandomUnitariesPassValidation) {
  std::mt19937_64 gen(102);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index dim = Eigen::Index{2} << (trial % 3);
    const GateMatrix g("U", random_unitary(gen, dim));
    EXPECT_LT(max_abs_diff(g.matrix().adjoint() * g.matrix(), Matrix::Identity(dim, dim)), kTol);
    EXPECT_EQ(g.arity(), static_cast<std::size_t>(trial % 3 + 1));
  }
}

// ---------------------------------------------------------------------------

TEST(Measure, ZAndXOnPlus) {
  const auto plus = PureState::qubit("a", kInvSqrt2, kInvSqrt2);
  const auto z = measure_projective(plus, "a", MeasureBasis::Z);
  ASSERT_EQ(z.size(), 2u);
  EXPECT_EQ(z[0].label, "0");
  EXPECT_NEAR(z[0].probability, 0.5, kTol);
  const auto x = measure_projective(plus, "a", MeasureBasis::X);
  EXPECT_EQ(x[0].label, "+");
  EXPECT_NEAR(x[0].probability, 1.0, kTol);
  EXPECT_FALSE(x[1].post_state.has_value());
}

TEST(Measure, BellStateIsDeterministic) {
  const PureState psi_minus({"a", "b"}, {0.0, kInvSqrt2, -kInvSqrt2, 0.0});
  const auto outcomes = bell_measure(psi_minus, "a", "b");
  ASSERT_EQ(outcomes.size(), 4u);
  EXPECT_EQ(outcomes[3].label, "psi-");
  EXPECT_NEAR(outcomes[3].probability, 1.0, kTol);
  for (int i = 0; i < 3; ++i) EXPECT_LT(outcomes[static_cast<std::size_t>(i)].probability, kTol);
}

// Oracle: Born rule written out against explicit Bell vectors.
TEST(MeasureProperty, CompletenessAndBornRule) {
  std::mt19937_64 gen(103);
  const Matrix bell = bell_basis();
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_state(gen, {"a", "b", "c"});
    double total = 0.0;
    for (const auto& o : measure_projective(s, "b", trial % 2 ? MeasureBasis::X : MeasureBasis::Z)) {
      total += o.probability;
      if (o.post_state) EXPECT_NEAR(norm_of(*o.post_state), 1.0, kTol);
    }
    EXPECT_NEAR(total, 1.0, 1e-10);

    const auto outcomes = bell_measure(s, "a", "c");
    double bell_total = 0.0;
    const auto v = as_vector(s.permuted({"a", "c", "b"}));
    for (std::size_t k = 0; k < 4; ++k) {
      // amplitude of |bell_k>_{ac} |j>_b is sum_{ac} conj(bell(ac, k)) v(ac, j)
      double expected = 0.0;
      for (int j = 0; j < 2; ++j) {
        Amplitude amp = 0.0;
        for (int ac = 0; ac < 4; ++ac) amp += std::conj(bell(ac, static_cast<Eigen::Index>(k))) * v(2 * ac + j);
        expected += std::norm(amp);
      }
      EXPECT_NEAR(outcomes[k].probability, expected, kTol);
      bell_total += outcomes[k].probability;
    }
    EXPECT_NEAR(bell_total, 1.0, 1e-10);
  }
}

TEST(Povm, ValidationRejectsIncompleteSets) {
  Matrix half = Matrix::Identity(2, 2) * 0.5;
  std::vector<PovmElement> elements = {PovmElement("h", half)};
  EXPECT_THROW(validate_povm(elements), InvariantError);
  Matrix neg(2, 2);
  neg << 1, 0, 0, -0.1;
  EXPECT_THROW(PovmElement("n", neg), InvariantError);
}

TEST(Povm, KrausSquaresToElement) {
  Matrix m(2, 2);
  m << 0.3, 0.1, 0.1, 0.2;
  const PovmElement e("e", m);
  EXPECT_LT(max_abs_diff(e.kraus().adjoint() * e.kraus(), m), kTol);
  std::vector<PovmElement> set = {e, PovmElement("rest", Matrix::Identity(2, 2) - m)};
  std::mt19937_64 gen(104);
  const auto s = random_state(gen, {"a", "b"});
  const auto outcomes = povm_measure(s, "b", set);
  // Oracle: Tr(rho_b E).
  const auto rho = reduced_density_matrix(s, {"b"});
  EXPECT_NEAR(outcomes[0].probability, (rho.matrix() * m).trace().real(), kTol);
  EXPECT_NEAR(outcomes[0].probability + outcomes[1].probability, 1.0, 1e-10);
}

// ---------------------------------------------------------------------------

TEST(Density, BellPairReducesToMaximallyMixed) {
  const PureState phi({"a", "b"}, {kInvSqrt2, 0.0, 0.0, kInvSqrt2});
  const auto rho = reduced_density_matrix(phi, {"a"});
  EXPECT_LT(max_abs_diff(rho.matrix(), Matrix::Identity(2, 2) / 2.0), kTol);
  EXPECT_NEAR(rho.purity(), 0.5, kTol);
  const auto in_bell = reduced_density_matrix(phi, {"a", "b"}, DensityBasis::Bell);
  EXPECT_NEAR(in_bell(0, 0).real(), 1.0, kTol);
  EXPECT_LT(max_abs_diff(in_bell.in_basis(DensityBasis::Computational).matrix(),
                         reduced_density_matrix(phi, {"a", "b"}).matrix()),
            kTol);
}

TEST(Density, RejectsNonPhysicalMatrices) {
  Matrix m = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix({"a"}, m), InvariantError);
  Matrix n(2, 2);
  n << 1.2, 0, 0, -0.2;
  EXPECT_THROW(DensityMatrix({"a"}, n), InvariantError);
}

TEST(Density, PartialTraceOfDensityMatrixAgrees) {
  std::mt19937_64 gen(105);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_state(gen, {"a", "b", "c"});
    const auto full = reduced_density_matrix(s, {"a", "b", "c"});
    EXPECT_LT(max_abs_diff(reduced_density_matrix(full, {"c", "a"}).matrix(),
                           reduced_density_matrix(s, {"c", "a"}).matrix()),
              kTol);
  }
}

TEST(Fidelity, PhaseQuotient) {
  std::mt19937_64 gen(106);
  const auto s = random_state(gen, {"a", "b"});
  std::vector<Amplitude> rotated = s.amplitudes();
  for (auto& a : rotated) a *= std::polar(1.0, 0.7);
  const PureState r(s.labels(), rotated);
  EXPECT_TRUE(equal_up_to_phase(s, r));
  EXPECT_NEAR(fidelity(s, r), 1.0, kTol);
  EXPECT_NEAR(fidelity(reduced_density_matrix(s, {"a", "b"}), r), 1.0, kTol);
  EXPECT_FALSE(equal_up_to_phase(PureState::basis({"a"}, 0), PureState::basis({"a"}, 1)));
}

TEST(Extract, RecoversFactorAndRejectsEntangled) {
  std::mt19937_64 gen(107);
  const auto a = random_state(gen, {"a"});
  const auto rest = random_state(gen, {"b", "c"});
  const auto joint = tensor_product(rest, a);
  EXPECT_TRUE(equal_up_to_phase(extract_subsystem(joint, {"a"}), a));
  const PureState phi({"x", "y"}, {kInvSqrt2, 0.0, 0.0, kInvSqrt2});
  EXPECT_THROW(extract_subsystem(phi, {"x"}), InvariantError);
}

// Pre-measurement reduced state of (A, Q1): diagonal carries the closed-form weights.
TEST(Density, InputTimesClusterDiagonal) {
  const double a = 0.6, b = 0.8, al = 0.3, be = 0.4, ga = std::sqrt(0.5), et = 0.5;
  std::vector<Amplitude> chan(16);
  chan[0b0000] = al;
  chan[0b1010] = be;
  chan[0b0101] = ga;
  chan[0b1111] = -et;
  const auto s = tensor_product(PureState::qubit("A", a, b), PureState({"1", "2", "3", "4"}, chan));
  const auto rho = reduced_density_matrix(s, {"A", "1"}, DensityBasis::Bell);
  const double p1 = (a * a * al * al + a * a * ga * ga + b * b * be * be + b * b * et * et) / 2.0;
  const double p2 = (b * b * al * al + b * b * ga * ga + a * a * be * be + a * a * et * et) / 2.0;
  EXPECT_NEAR(rho(0, 0).real(), p1, kTol);
  EXPECT_NEAR(rho(1, 1).real(), p1, kTol);
  EXPECT_NEAR(rho(2, 2).real(), p2, kTol);
  EXPECT_NEAR(rho(3, 3).real(), p2, kTol);
}

}  // namespace
