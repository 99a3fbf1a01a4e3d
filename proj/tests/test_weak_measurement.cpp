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
#include <filesystem>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qmon/weak_measurement.hpp"

namespace qmon {
namespace {

TEST(Kraus, SingleQubitMatrices) {
  // O = (1 + Z)/2 = |0><0|; A+ = diag(lo, hi), A- = diag(hi, lo)
  const double G = 0.3;
  const KrausPair k = kraus_pair(measurement_projector(0, Axis::Z, 1), G);
  const double hi = std::sqrt((1 + G) / 2), lo = std::sqrt((1 - G) / 2);
  const Matrix p = k.plus.dense(), m = k.minus.dense();
  EXPECT_NEAR(p(0, 0).real(), lo, 1e-15);
  EXPECT_NEAR(p(1, 1).real(), hi, 1e-15);
  EXPECT_NEAR(m(0, 0).real(), hi, 1e-15);
  EXPECT_NEAR(m(1, 1).real(), lo, 1e-15);
  EXPECT_NEAR(std::abs(p(0, 1)) + std::abs(p(1, 0)), 0.0, 1e-15);
  EXPECT_LT(k.completeness_defect(), 1e-15);
}

TEST(Kraus, ProbabilitiesMatchBornRule) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int L = 3;
  for (int trial = 0; trial < 50; ++trial) {
    const double G = u(rng);
    const int site = trial % L;
    const Axis a = trial % 2 ? Axis::X : Axis::Z;
    const Vector psi = oracle::random_state(L, rng);
    const Matrix O = 0.5 * (Matrix::Identity(8, 8) + oracle::site_op(L, site, to_string(a)[0]));
    const KrausPair k = kraus_pair(measurement_projector(site, a, L), G);
    EXPECT_LT(k.completeness_defect(), 1e-12);
    const double expO = psi.dot(O * psi).real();
    for (int s : {+1, -1}) {
      const Matrix A = (s > 0 ? k.plus : k.minus).dense();
      const double born = (A * psi).squaredNorm();
      EXPECT_NEAR(outcome_probability(G, expO, s), born, 1e-12);
    }
  }
}

TEST(Kraus, RejectsBadInput) {
  EXPECT_THROW(kraus_pair(measurement_projector(0, Axis::Z, 2), 1.5), std::invalid_argument);
  EXPECT_THROW(kraus_pair(pauli_operator(0, Axis::Z, 2), 0.5), std::invalid_argument);
}

TEST(Sampling, RejectsNearImpossibleBranches) {
  bool rejected = false;
  EXPECT_EQ(sample_outcome(0.3, 0.1, rejected), +1);
  EXPECT_FALSE(rejected);
  EXPECT_EQ(sample_outcome(0.3, 0.5, rejected), -1);
  EXPECT_FALSE(rejected);
  EXPECT_EQ(sample_outcome(1e-16, 0.0, rejected), -1);
  EXPECT_TRUE(rejected);
}

TEST(Sampling, OutcomeFrequencyMatchesProbability) {
  const PureState s = PureState::product(2, Axis::X);
  const OperatorMatrix O = measurement_projector(0, Axis::Z, 2);
  const double G = 0.6;
  const double p_plus = outcome_probability(G, 0.5, +1);
  Rng rng(99);
  int plus = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) plus += weak_measure_step(s, O, G, rng).outcome > 0;
  const double sigma = std::sqrt(p_plus * (1 - p_plus) / n);
  EXPECT_NEAR(double(plus) / n, p_plus, 5 * sigma);
}

TEST(KernelMeasurement, AgreesWithOperatorPath) {
  std::mt19937_64 gen(4);
  const int L = 4;
  for (Axis a : {Axis::X, Axis::Z})
    for (int site = 0; site < L; ++site) {
      const PureState s(L, oracle::random_state(L, gen));
      Rng r1(site + 10), r2(site + 10);
      const MeasurementStep step = weak_measure_step(s, measurement_projector(site, a, L), 0.4, r1);
      Vector psi = s.amplitudes();
      const auto k = kernels::measure_site(psi, L, site, a, 0.4, uniform01(r2));
      EXPECT_EQ(k.outcome, step.outcome);
      EXPECT_NEAR(k.probability, step.probability, 1e-13);
      EXPECT_LT((psi.normalized() - step.state.amplitudes()).norm(), 1e-12);
    }
}

TEST(KernelMeasurement, MeanFieldUsesReference) {
  const int L = 2;
  const PureState s = PureState::product(L, Axis::Z, +1);  // <O_Z> = 1
  Vector psi = s.amplitudes();
  const auto r = kernels::measure_site(psi, L, 0, Axis::Z, 0.5, 0.1, 0.5);
  EXPECT_NEAR(r.probability, 0.5, 1e-15);
  EXPECT_NEAR(r.expect_O, 1.0, 1e-15);
}

TEST(DeltaRho, FirstOrderAgreesWithExactStep) {
  std::mt19937_64 gen(8);
  const int L = 2;
  const PureState s(L, oracle::random_state(L, gen));
  const OperatorMatrix O = measurement_projector(1, Axis::X, L);
  const Matrix rho = s.amplitudes() * s.amplitudes().adjoint();
  std::vector<double> err;
  for (double G : {0.04, 0.02, 0.01}) {
    const KrausPair kg = kraus_pair(O, G);
    for (int w : {+1, -1}) {
      const Vector post = (w > 0 ? kg.plus : kg.minus).apply(s.amplitudes()).normalized();
      const Matrix exact = post * post.adjoint() - rho;
      const Matrix approx = delta_rho_check(s, O, G, w);
      EXPECT_GT(exact.norm(), 0.1 * G);
      EXPECT_LT((exact - approx).norm(), 5 * G * G) << "G = " << G << " W = " << w;
      if (w > 0) err.push_back((exact - approx).norm());
    }
  }
  // residual is second order
  EXPECT_LT(err[2], err[0] / 8.0);
  EXPECT_THROW(delta_rho_check(s, O, 0.2, +1), std::invalid_argument);
}

TEST(Unconditional, CoherencesDecayBySqrtOneMinusGSquared) {
  // sum_s A_s rho A_s^+ = P rho P + Q rho Q + sqrt(1-G^2)(P rho Q + Q rho P)
  std::mt19937_64 gen(31);
  const int L = 2;
  const Vector psi = oracle::random_state(L, gen);
  const Matrix rho = psi * psi.adjoint();
  const double G = 0.7;
  const OperatorMatrix O = measurement_projector(0, Axis::Z, L);
  const KrausPair k = kraus_pair(O, G);
  const Matrix P = O.dense(), Q = Matrix::Identity(4, 4) - P;
  const Matrix Ap = k.plus.dense(), Am = k.minus.dense();
  const Matrix got = Ap * rho * Ap.adjoint() + Am * rho * Am.adjoint();
  const Matrix want = P * rho * P + Q * rho * Q + std::sqrt(1 - G * G) * (P * rho * Q + Q * rho * P);
  EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Protocol, StepStrengthMapping) {
  const auto p = MeasurementProtocol::continuous(Axis::Z, {0}, 0.5, 0.05, 1.0);
  EXPECT_NEAR(p.step_strength(), std::sqrt(1 - std::exp(-4 * 0.5 * 0.05)), 1e-15);
  EXPECT_EQ(p.steps(), 20);
}

TEST(Protocol, Validation) {
  EXPECT_THROW(MeasurementProtocol::pulse(Axis::Y, {0}, 0.2).validate(2), std::invalid_argument);
  EXPECT_THROW(MeasurementProtocol::pulse(Axis::X, {3}, 0.2).validate(2), std::out_of_range);
  EXPECT_THROW(MeasurementProtocol::continuous(Axis::Z, {0}, 5.0, 0.05, 1.0).validate(2), std::invalid_argument);
  EXPECT_NO_THROW(MeasurementProtocol::continuous(Axis::Z, {0}, 1.0, 0.05, 1.0).validate(2));
}

TEST(Protocol, JsonRoundTrip) {
  auto p = MeasurementProtocol::continuous(Axis::X, {0, 2}, 0.3, 0.01, 2.0, Feedback::mean_field);
  p.snapshot_times = {0.5, 1.0};
  const auto q = MeasurementProtocol::from_json(p.to_json());
  EXPECT_EQ(q.to_json(), p.to_json());
}

TEST(Pulse, StrongZPulseCollapsesProductState) {
  const int L = 4;
  const auto p = MeasurementProtocol::pulse(Axis::Z, all_sites(L), 1.0);
  const PulseResult r = finite_time_pulse(PureState::product(L, Axis::X), p, 5);
  for (int i = 0; i < L; ++i) {
    const double z = kernels::expect_pauli(r.state.amplitudes(), L, i, Axis::Z);
    EXPECT_NEAR(std::abs(z), 1.0, 1e-12);
    // outcome +1 favours O = 0, i.e. sigma = -1
    EXPECT_NEAR(z, -double(r.record.outcome(0, i)), 1e-12);
  }
}

TEST(Trajectory, SeedDeterminism) {
  const int L = 4;
  const OperatorMatrix H = build_tfim_hamiltonian(critical_chain(L));
  const auto p = MeasurementProtocol::continuous(Axis::Z, all_sites(L), 0.5, 0.05, 1.0);
  const PureState s = ground_state(H);
  const TrajectoryRecord a = qsd_trajectory(s, H, p, 77);
  const TrajectoryRecord b = qsd_trajectory(s, H, p, 77);
  const TrajectoryRecord c = qsd_trajectory(s, H, p, 78);
  EXPECT_TRUE(a.same_data(b));
  EXPECT_EQ(a.final_state.amplitudes(), b.final_state.amplitudes());
  EXPECT_NE(a.outcomes, c.outcomes);
  EXPECT_EQ(a.outcomes.size(), std::size_t(20 * L));
  EXPECT_LT(a.diagnostics.max_norm_drift, kMaxNormDrift);
  EXPECT_LT(a.diagnostics.max_purity_defect, 1e-12);
}

TEST(Trajectory, NoMeasurementIsUnitary) {
  const int L = 4;
  const OperatorMatrix H = build_tfim_hamiltonian(critical_chain(L));
  const auto p = MeasurementProtocol::continuous(Axis::Z, all_sites(L), 0.0, 0.1, 1.0);
  const PureState s = PureState::product(L, Axis::Z);
  const TrajectoryRecord r = qsd_trajectory(s, H, p, 1);
  Vector want = s.amplitudes();
  Propagator(H, 1.0).apply(want);
  EXPECT_LT((r.final_state.amplitudes() - want).norm(), 1e-10);
}

TEST(Trajectory, SnapshotsAtRequestedTimes) {
  const int L = 3;
  const OperatorMatrix H = build_tfim_hamiltonian(critical_chain(L));
  auto p = MeasurementProtocol::continuous(Axis::X, all_sites(L), 0.5, 0.05, 1.0);
  p.snapshot_times = {0.25, 0.5, 1.0};
  p.record_stride = 5;
  const TrajectoryRecord r = qsd_trajectory(PureState::product(L, Axis::Z), H, p, 3);
  ASSERT_EQ(r.snapshots.size(), 3u);
  EXPECT_NEAR(r.snapshots[0].first, 0.25, 1e-12);
  EXPECT_EQ(r.snapshots[2].second, r.final_state.amplitudes());
  EXPECT_EQ(r.times.size(), 5u);
}

TEST(Record, WriteReadRoundTrip) {
  const int L = 3;
  const OperatorMatrix H = build_tfim_hamiltonian(critical_chain(L));
  auto p = MeasurementProtocol::continuous(Axis::Z, {0, 2}, 0.4, 0.05, 0.5);
  const TrajectoryRecord r = qsd_trajectory(PureState::product(L, Axis::X), H, p, 12);
  const auto dir = std::filesystem::temp_directory_path() / "qmon_record_test";
  std::filesystem::create_directories(dir);
  write_record(r, dir, "traj");
  const TrajectoryRecord back = read_record(dir, "traj");
  EXPECT_EQ(back.outcomes, r.outcomes);
  EXPECT_EQ(back.seed, r.seed);
  ASSERT_EQ(back.z.size(), r.z.size());
  for (std::size_t t = 0; t < r.z.size(); ++t)
    for (int i = 0; i < L; ++i) EXPECT_NEAR(back.z[t][i], r.z[t][i], 1e-11);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace qmon
