// Copyright 2026 The qmon Authors
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

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qmon/spin_chain.hpp"

namespace qmon {
namespace {

TEST(PauliOperator, MatchesKroneckerProducts) {
  const int L = 4;
  for (int site = 0; site < L; ++site)
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
      const Matrix got = pauli_operator(site, a, L).dense();
      const Matrix want = oracle::site_op(L, site, to_string(a)[0]);
      EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-15) << "site " << site << " axis " << to_string(a);
    }
}

TEST(Hamiltonian, MatchesKroneckerConstruction) {
  for (Boundary b : {Boundary::periodic, Boundary::open}) {
    LatticeSpec spec{5, b, 0.7, 1.3};
    const Matrix got = build_tfim_hamiltonian(spec).dense();
    const Matrix want = oracle::tfim(5, 0.7, 1.3, b == Boundary::periodic);
    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Hamiltonian, TwoSiteOpenGroundEnergy) {
  // -Z Z - X1 - X2: ground energy -sqrt(5)
  LatticeSpec spec{2, Boundary::open, 1.0, 1.0};
  const GroundState g = find_ground_state(build_tfim_hamiltonian(spec));
  EXPECT_NEAR(g.energy, -std::sqrt(5.0), 1e-12);
  EXPECT_EQ(g.parity, +1);
}

TEST(Hamiltonian, PeriodicGroundEnergyFromDispersion) {
  // even-parity sector of the critical chain: antiperiodic fermion momenta
  for (int L : {6, 8, 10}) {
    double e = 0.0;
    for (int m = 0; m < L; ++m) {
      const double k = std::numbers::pi * (2 * m + 1) / L;
      e -= std::sqrt(2.0 - 2.0 * std::cos(k));
    }
    const GroundState g = find_ground_state(build_tfim_hamiltonian(critical_chain(L)));
    EXPECT_NEAR(g.energy, e, 1e-9) << "L = " << L;
  }
}

TEST(Hamiltonian, LanczosMatchesDenseDiagonalization) {
  LatticeSpec spec{8, Boundary::open, 1.0, 0.6};
  const Matrix H = oracle::tfim(8, 1.0, 0.6, false);
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  const GroundState g = find_ground_state(build_tfim_hamiltonian(spec));
  EXPECT_NEAR(g.energy, es.eigenvalues()[0], 1e-9);
}

TEST(Hamiltonian, RejectsInvalidLattices) {
  EXPECT_THROW(build_tfim_hamiltonian(LatticeSpec{1, Boundary::open, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(build_tfim_hamiltonian(LatticeSpec{2, Boundary::periodic, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(build_tfim_hamiltonian(LatticeSpec{4, Boundary::open, -1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(build_tfim_hamiltonian(critical_chain(30)), CapacityError);
}

TEST(Kernels, ExpectationsMatchDenseOperators) {
  std::mt19937_64 rng(11);
  const int L = 5;
  const Vector psi = oracle::random_state(L, rng);
  for (int i = 0; i < L; ++i)
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
      const double want = psi.dot(oracle::site_op(L, i, to_string(a)[0]) * psi).real();
      EXPECT_NEAR(kernels::expect_pauli(psi, L, i, a), want, 1e-13);
    }
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      if (i == j) continue;
      for (Axis a : {Axis::X, Axis::Z}) {
        const char c = to_string(a)[0];
        const double want = psi.dot(oracle::site_op(L, i, c) * oracle::site_op(L, j, c) * psi).real();
        EXPECT_NEAR(kernels::expect_pauli_pair(psi, L, i, j, a), want, 1e-13);
      }
    }
}

TEST(Kernels, ApplyPauliMatchesDense) {
  std::mt19937_64 rng(12);
  const int L = 4;
  const Vector psi = oracle::random_state(L, rng);
  for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
    Vector v = psi;
    kernels::apply_pauli(v, L, 2, a);
    EXPECT_LT((v - oracle::site_op(L, 2, to_string(a)[0]) * psi).norm(), 1e-14);
  }
}

TEST(PureState, ProductStatesAreEigenstates) {
  const int L = 4;
  for (Axis a : {Axis::X, Axis::Y, Axis::Z})
    for (int sign : {+1, -1}) {
      const PureState s = PureState::product(L, a, sign);
      for (int i = 0; i < L; ++i) EXPECT_NEAR(kernels::expect_pauli(s.amplitudes(), L, i, a), sign, 1e-14);
    }
}

TEST(PureState, RejectsUnnormalizedInput) {
  Vector v = Vector::Ones(8);
  EXPECT_THROW(PureState(3, v), std::invalid_argument);
  EXPECT_THROW(PureState(2, v.normalized()), std::invalid_argument);
  EXPECT_THROW(PureState::normalized(3, Vector::Zero(8)), NumericalError);
}

TEST(DensityOperator, ValidatesConditions) {
  Matrix rho = Matrix::Identity(4, 4) / 4.0;
  EXPECT_NO_THROW(DensityOperator(2, rho));
  Matrix bad_trace = rho * 1.1;
  EXPECT_THROW(DensityOperator(2, bad_trace), std::invalid_argument);
  Matrix non_herm = rho;
  non_herm(0, 1) = 0.1;
  EXPECT_THROW(DensityOperator(2, non_herm), std::invalid_argument);
  Matrix negative = Matrix::Zero(4, 4);
  negative.diagonal() << 0.6, 0.6, 0.1, -0.3;
  EXPECT_THROW(DensityOperator(2, negative), std::invalid_argument);
}

TEST(Propagator, MatchesMatrixExponential) {
  const int L = 4;
  LatticeSpec spec{L, Boundary::periodic, 1.0, 0.8};
  const OperatorMatrix H = build_tfim_hamiltonian(spec);
  std::mt19937_64 rng(3);
  const Vector psi = oracle::random_state(L, rng);
  const double t = 0.37;
  Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::tfim(L, 1.0, 0.8, true));
  const Vector phase = (es.eigenvalues().cast<cplx>() * (-kI * t)).array().exp();
  const Vector want = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint() * psi;
  Vector got = psi;
  Propagator(H, t).apply(got);
  EXPECT_LT((got - want).norm(), 1e-12);
}

TEST(Expectation, DensityMatchesPure) {
  std::mt19937_64 rng(5);
  const PureState s(3, oracle::random_state(3, rng));
  const OperatorMatrix op = build_tfim_hamiltonian(critical_chain(3));
  EXPECT_NEAR(std::abs(expectation(s, op) - expectation(DensityOperator::from_pure(s), op)), 0.0, 1e-13);
}

}  // namespace
}  // namespace qmon
