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
#include "qmon/entanglement.hpp"

namespace qmon {
namespace {

// Partial trace by explicit per-site bit bookkeeping (site 0 = most
// significant bit).
Matrix block_density(const Vector& psi, int L, int start, int len) {
  auto bit = [&](std::uint64_t b, int site) { return (b >> (L - 1 - site)) & 1u; };
  const Eigen::Index da = Eigen::Index{1} << len;
  Matrix rho = Matrix::Zero(da, da);
  for (std::uint64_t x = 0; x < std::uint64_t(psi.size()); ++x)
    for (std::uint64_t y = 0; y < std::uint64_t(psi.size()); ++y) {
      bool same_rest = true;
      std::uint64_t a = 0, a2 = 0;
      for (int s = 0; s < L; ++s) {
        if (s >= start && s < start + len) {
          a = (a << 1) | bit(x, s);
          a2 = (a2 << 1) | bit(y, s);
        } else if (bit(x, s) != bit(y, s)) {
          same_rest = false;
          break;
        }
      }
      if (same_rest) rho(Eigen::Index(a), Eigen::Index(a2)) += psi[x] * std::conj(psi[y]);
    }
  return rho;
}

TEST(ReducedDensity, MatchesExplicitPartialTrace) {
  std::mt19937_64 gen(17);
  const int L = 5;
  const PureState s(L, oracle::random_state(L, gen));
  for (int start = 0; start < L; ++start)
    for (int len = 1; start + len <= L; ++len) {
      const Matrix want = block_density(s.amplitudes(), L, start, len);
      EXPECT_LT((reduced_density(s, start, len).matrix() - want).cwiseAbs().maxCoeff(), 1e-13);
      const DensityOperator mixed = DensityOperator::from_pure(s);
      EXPECT_LT((reduced_density(mixed, start, len).matrix() - want).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(ReducedDensity, BellPairEntropy) {
  Vector v = Vector::Zero(8);
  v[0b000] = v[0b110] = 1.0 / std::sqrt(2.0);  // (|00> + |11>)|0> on sites 0, 1
  const PureState s(3, v);
  EXPECT_NEAR(pure_entropy(s, 0, 1, Quantity::von_neumann), std::log(2.0), 1e-14);
  EXPECT_NEAR(pure_entropy(s, 1, 1, Quantity::renyi2), std::log(2.0), 1e-14);
  EXPECT_NEAR(pure_entropy(s, 2, 1, Quantity::von_neumann), 0.0, 1e-14);
  EXPECT_NEAR(pure_entropy(s, 0, 2, Quantity::von_neumann), 0.0, 1e-13);
}

TEST(ReducedDensity, RejectsBlocksOutsideChain) {
  const PureState s = PureState::product(3, Axis::Z);
  EXPECT_THROW(reduced_density(s, 2, 2), std::out_of_range);
  EXPECT_THROW(reduced_density(s, -1, 1), std::out_of_range);
}

TEST(Spectrum, EntropiesAndNegativeEigenvalues) {
  RealVector ev(3);
  ev << 0.5, 0.5, 0.0;
  EXPECT_NEAR(entropy_of_spectrum(ev), std::log(2.0), 1e-15);
  EXPECT_NEAR(renyi2_of_spectrum(ev), std::log(2.0), 1e-15);
  ev << 0.5, 0.6, -0.1;
  EXPECT_THROW(entropy_of_spectrum(ev), NumericalError);
}

TEST(Curves, PureAndMixedAgree) {
  const int L = 6;
  const PureState g = ground_state(build_tfim_hamiltonian(critical_chain(L)));
  const auto grid = entropy_grid(1, L - 1);
  const EntropyCurve a = ensemble_entropy_curve({g}, Quantity::von_neumann, grid);
  const EntropyCurve b = mixed_entropy_curve(DensityOperator::from_pure(g), Quantity::von_neumann, grid);
  for (int l : grid) EXPECT_NEAR(a.at(l).mean, b.at(l).mean, 1e-11);
  EXPECT_LT(a.mirror_violation(), 1e-11);
  EXPECT_EQ(b.kind, StateKind::mixed);
}

TEST(Curves, AnnealedDefinedForRenyiOnly) {
  const PureState s = PureState::product(4, Axis::X);
  EXPECT_THROW(ensemble_entropy_curve({s}, Quantity::von_neumann, {1, 2}, Boundary::periodic, Averaging::annealed),
               std::invalid_argument);
  const EntropyCurve c =
      ensemble_entropy_curve({s, s}, Quantity::renyi2, {1, 2}, Boundary::periodic, Averaging::annealed);
  EXPECT_NEAR(c.at(2).mean, 0.0, 1e-14);
}

TEST(Curves, CsvHeaderAndStandardError) {
  const EntropyCurve c = curve_from_table(8, Boundary::periodic, Quantity::von_neumann, {1, 2},
                                          {{1.0, 2.0}, {3.0, 2.0}}, 10);
  EXPECT_EQ(c.to_csv().substr(0, 20), "l,mean,stderr,n_traj");
  EXPECT_NEAR(c.at(1).mean, 2.0, 1e-15);
  EXPECT_GT(c.at(1).stderr_, 0.0);
  EXPECT_EQ(c.at(2).stderr_, 0.0);
  EXPECT_EQ(c.at(1).trajectories, 2u);
}

EntropyCurve synthetic(int L, const std::function<double(int, double)>& f) {
  EntropyCurve c;
  c.sites = L;
  for (int l = 1; l < L; ++l) c.samples.push_back({l, f(l, chord_length(l, L, Boundary::periodic)), 0.0, 1});
  return c;
}

TEST(Fits, RecoverLogCoefficient) {
  const EntropyCurve c = synthetic(64, [](int, double x) { return 0.2 * std::log(x) + 0.7; });
  const FitReport r = fit_log_scaling(c, FitModel::log);
  EXPECT_NEAR(r.param("a"), 0.2, 1e-9);
  EXPECT_NEAR(r.param("b"), 0.7, 1e-9);
  EXPECT_LT(r.residual_rms, 1e-12);
}

TEST(Fits, RecoverVolumePlusLog) {
  const EntropyCurve c = synthetic(40, [](int l, double x) { return 0.03 * l + 0.125 * std::log(x) - 0.2; });
  const FitReport r = fit_log_scaling(c, FitModel::volume_plus_log);
  EXPECT_NEAR(r.param("kappa"), 0.03, 1e-9);
  EXPECT_NEAR(r.param("a"), 0.125, 1e-9);
  EXPECT_NEAR(r.param("b"), -0.2, 1e-9);
}

TEST(Fits, RecoverSaturatingForm) {
  const EntropyCurve c = synthetic(48, [](int, double x) { return 0.9 * (1 - std::exp(-x / 3.0)) + 0.05; });
  FitOptions o;
  o.l_min = 1;
  const FitReport r = fit_log_scaling(c, FitModel::saturating, o);
  EXPECT_NEAR(r.param("S_inf"), 0.9, 1e-7);
  EXPECT_NEAR(r.param("b"), 0.05, 1e-7);
  EXPECT_NEAR(r.param("xi"), 3.0, 1e-6);
  EXPECT_GT(saturation_preference(c, o), 100.0);
}

TEST(Fits, WindowAndPointCount) {
  const EntropyCurve c = synthetic(10, [](int, double x) { return std::log(x); });
  FitOptions o;
  o.l_min = 4;
  o.l_max = 6;
  EXPECT_THROW(fit_log_scaling(c, FitModel::log, o), std::invalid_argument);
  o.l_max = 7;
  EXPECT_EQ(fit_log_scaling(c, FitModel::log, o).points, 4);
}

TEST(Fits, BootstrapUncertaintyTracksNoise) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> noise(0.0, 0.05);
  const int L = 32;
  std::vector<int> grid = entropy_grid(1, L / 2);
  std::vector<std::vector<double>> table;
  for (int t = 0; t < 400; ++t) {
    std::vector<double> row;
    for (int l : grid) row.push_back(std::log(chord_length(l, L, Boundary::periodic)) / 6.0 + noise(gen));
    table.push_back(row);
  }
  const EntropyCurve c = curve_from_table(L, Boundary::periodic, Quantity::von_neumann, grid, table, 0);
  FitOptions o;
  o.bootstrap_samples = 200;
  const FitReport r = fit_log_scaling(c, FitModel::log, o);
  ASSERT_EQ(r.bootstrap_sigma.size(), 2u);
  EXPECT_NEAR(r.param("a"), 1.0 / 6.0, 5 * r.uncertainty("a"));
  // independent noise: bootstrap and weighted least squares agree roughly
  EXPECT_GT(r.bootstrap_sigma[0] / r.sigma[0], 0.6);
  EXPECT_LT(r.bootstrap_sigma[0] / r.sigma[0], 1.6);
}

TEST(Fits, ChordLength) {
  EXPECT_NEAR(chord_length(5, 10, Boundary::periodic), 10 / std::numbers::pi, 1e-14);
  EXPECT_NEAR(chord_length(5, 10, Boundary::open), 20 / std::numbers::pi, 1e-14);
}

}  // namespace
}  // namespace qmon
