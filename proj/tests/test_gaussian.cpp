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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qmon/gaussian.hpp"

namespace qmon {
namespace {

Vector exact_ground(int L, Boundary b, double J, double h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::tfim(L, J, h, b == Boundary::periodic));
  return es.eigenvectors().col(0);
}

double dense_x(const Vector& psi, int L, int i) { return psi.dot(oracle::site_op(L, i, 'X') * psi).real(); }

TEST(Majorana, DispersionOfPeriodicChain) {
  const int L = 10;
  const double J = 1.0, h = 0.6;
  const MajoranaCoupling c = jw_tfim_coupling(LatticeSpec{L, Boundary::periodic, J, h});
  std::vector<double> want;
  for (int m = 0; m < L; ++m) {
    const double k = std::numbers::pi * (2 * m + 1) / L;
    want.push_back(2.0 * std::sqrt(J * J + h * h - 2 * J * h * std::cos(k)));
  }
  std::sort(want.begin(), want.end());
  const RealVector got = c.single_particle_energies();
  ASSERT_EQ(got.size(), L);
  for (int k = 0; k < L; ++k) EXPECT_NEAR(got[k], want[k], 1e-12);
}

class GaussianVsExact : public ::testing::TestWithParam<Boundary> {};

TEST_P(GaussianVsExact, GroundStateObservables) {
  const int L = 8;
  const Boundary b = GetParam();
  const LatticeSpec spec{L, b, 1.0, 1.0};
  const MajoranaCoupling c = jw_tfim_coupling(spec);
  const CovarianceMatrix g = gaussian_ground_state(c);
  const Vector psi = exact_ground(L, b, 1.0, 1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::tfim(L, 1.0, 1.0, b == Boundary::periodic), Eigen::EigenvaluesOnly);
  EXPECT_NEAR(c.ground_energy(), es.eigenvalues()[0], 1e-10);
  EXPECT_NEAR(g.energy(c), es.eigenvalues()[0], 1e-10);
  EXPECT_TRUE(g.pure());
  for (int i = 0; i < L; ++i) EXPECT_NEAR(g.x(i), dense_x(psi, L, i), 1e-10);
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j) {
      const double want = psi.dot(oracle::site_op(L, i, 'X') * oracle::site_op(L, j, 'X') * psi).real();
      EXPECT_NEAR(g.xx(i, j), want, 1e-10);
    }
  for (int l = 1; l < L; ++l) EXPECT_NEAR(gaussian_entropy(g, 0, l), oracle::left_block_entropy(psi, L, l), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Boundaries, GaussianVsExact, ::testing::Values(Boundary::periodic, Boundary::open));

TEST(Gaussian, UnitaryStepMatchesExactEvolution) {
  const int L = 6;
  const LatticeSpec spec = critical_chain(L);
  const CovarianceMatrix g0 = gaussian_x_product(L);
  const CovarianceMatrix g = gaussian_unitary_step(g0, jw_tfim_coupling(spec), 0.7);
  Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::tfim(L, 1.0, 1.0, true));
  const Vector phase = (es.eigenvalues().cast<cplx>() * (-kI * 0.7)).array().exp();
  const Vector psi =
      es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint() * PureState::product(L, Axis::X).amplitudes();
  for (int i = 0; i < L; ++i) EXPECT_NEAR(g.x(i), dense_x(psi, L, i), 1e-10);
  for (int l = 1; l < L; ++l) EXPECT_NEAR(gaussian_entropy(g, 0, l), oracle::left_block_entropy(psi, L, l), 1e-9);
}

TEST(Gaussian, MeasurementMatchesKrausUpdate) {
  const int L = 6;
  CovarianceMatrix g = gaussian_ground_state(jw_tfim_coupling(critical_chain(L)));
  Vector psi = exact_ground(L, Boundary::periodic, 1.0, 1.0);
  const double G = 0.45;
  const std::vector<double> draws = {0.1, 0.9, 0.5, 0.3, 0.7, 0.2};
  for (int s = 0; s < L; ++s) {
    const auto r = gaussian_measure_site(g, s, G, draws[s]);
    // O = (1 + X_s)/2; A+ = hi (1 - O) + lo O
    const Matrix O = 0.5 * (Matrix::Identity(psi.size(), psi.size()) + oracle::site_op(L, s, 'X'));
    const double p_plus = 0.5 * (1 + G * (1 - 2 * psi.dot(O * psi).real()));
    const int outcome = draws[s] < p_plus ? +1 : -1;
    EXPECT_EQ(r.outcome, outcome);
    EXPECT_NEAR(r.probability, outcome > 0 ? p_plus : 1 - p_plus, 1e-12);
    const double hi = std::sqrt((1 + G) / 2), lo = std::sqrt((1 - G) / 2);
    const double a = outcome > 0 ? hi : lo, c = outcome > 0 ? lo : hi;
    psi = ((a * (Matrix::Identity(psi.size(), psi.size()) - O) + c * O) * psi).normalized();
  }
  EXPECT_LT(g.purity_defect(), 1e-10);
  for (int i = 0; i < L; ++i) EXPECT_NEAR(g.x(i), dense_x(psi, L, i), 1e-10);
  for (int l = 1; l < L; ++l) EXPECT_NEAR(gaussian_entropy(g, 0, l), oracle::left_block_entropy(psi, L, l), 1e-9);
}

TEST(Gaussian, ProjectiveMeasurementOfProductState) {
  CovarianceMatrix g = gaussian_x_product(4, -1);
  const auto r = gaussian_measure_site(g, 1, 1.0, 0.5);
  // <O> = 0, so + (favouring O = 0) is certain
  EXPECT_EQ(r.outcome, +1);
  EXPECT_NEAR(r.probability, 1.0, 1e-15);
  EXPECT_NEAR(g.x(1), -1.0, 1e-15);
}

TEST(Gaussian, RenyiMatchesSpectrum) {
  const int L = 8;
  const CovarianceMatrix g = gaussian_ground_state(jw_tfim_coupling(critical_chain(L)));
  const Vector psi = exact_ground(L, Boundary::periodic, 1.0, 1.0);
  for (int l = 1; l < L; ++l) {
    const Eigen::Index da = Eigen::Index{1} << l, db = Eigen::Index{1} << (L - l);
    Matrix rho = Matrix::Zero(da, da);
    for (Eigen::Index a = 0; a < da; ++a)
      for (Eigen::Index a2 = 0; a2 < da; ++a2)
        for (Eigen::Index b = 0; b < db; ++b) rho(a, a2) += psi[a * db + b] * std::conj(psi[a2 * db + b]);
    EXPECT_NEAR(gaussian_renyi2(g, 0, l), -std::log((rho * rho).trace().real()), 1e-9);
  }
}

TEST(Gaussian, RejectsInvalidCovariance) {
  RealMatrix g = RealMatrix::Zero(4, 4);
  g(0, 1) = 1.0;
  EXPECT_THROW(CovarianceMatrix(2, g), std::invalid_argument);
  g(1, 0) = -1.0;
  g(2, 3) = 2.0;
  g(3, 2) = -2.0;
  EXPECT_THROW(CovarianceMatrix(2, g), std::invalid_argument);
  EXPECT_THROW(restrict_block(gaussian_x_product(3), 2, 2), std::out_of_range);
}

TEST(Gaussian, ZeroModeIsReported) {
  // open chain at h = 0 has an exact Majorana zero mode
  EXPECT_THROW(gaussian_ground_state(jw_tfim_coupling(LatticeSpec{4, Boundary::open, 1.0, 0.0})), NumericalError);
}

TEST(Gaussian, TrajectoryRejectsZAxis) {
  const auto p = MeasurementProtocol::pulse(Axis::Z, {0}, 0.5);
  EXPECT_THROW(gaussian_trajectory(gaussian_x_product(3), jw_tfim_coupling(critical_chain(3)), p, 1),
               std::invalid_argument);
}

TEST(Gaussian, CovarianceRoundTrip) {
  const CovarianceMatrix g = gaussian_ground_state(jw_tfim_coupling(critical_chain(5)));
  const auto dir = std::filesystem::temp_directory_path() / "qmon_cov_test";
  std::filesystem::create_directories(dir);
  write_covariance(g, 1.5, dir, "cov");
  const CovarianceMatrix back = read_covariance(dir, "cov");
  EXPECT_LT(max_abs(back.matrix() - g.matrix()), 1e-11);
  std::filesystem::remove_all(dir);
}

TEST(Gaussian, BinaryEntropyLimits) {
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.5), std::log(2.0), 1e-15);
}

}  // namespace
}  // namespace qmon
