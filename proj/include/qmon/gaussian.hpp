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


// Free-Majorana representation of the transverse-field Ising chain.
//
// Jordan-Wigner: gamma_{2j} = (prod_{k<j} X_k) Z_j, gamma_{2j+1} =
// (prod_{k<j} X_k) Y_j, so that X_j = i gamma_{2j} gamma_{2j+1} and
// Z_j Z_{j+1} = i gamma_{2j+1} gamma_{2j+2}. A quadratic Hamiltonian is
// H = (i/4) sum_jk A_jk gamma_j gamma_k with A real antisymmetric, and a
// Gaussian state is fixed by Gamma_jk = (i/2) <[gamma_j, gamma_k]>.
//
// Periodic spin chains are represented in the even-parity sector, where the
// fermions obey antiperiodic boundary conditions.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qmon/io.hpp"
#include "qmon/random.hpp"
#include "qmon/spin_chain.hpp"
#include "qmon/weak_measurement.hpp"

namespace qmon {

inline double max_abs(const RealMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct MajoranaCoupling {
  int sites = 0;
  RealMatrix A;

  MajoranaCoupling() = default;
  MajoranaCoupling(int L, RealMatrix a) : sites(L), A(std::move(a)) {
    if (A.rows() != 2 * L || A.cols() != 2 * L) throw std::invalid_argument("MajoranaCoupling: A must be 2L x 2L");
    if (max_abs(A + A.transpose()) > 1e-12) throw std::invalid_argument("MajoranaCoupling: A is not antisymmetric");
  }

  /// Eigenvalues of iA in ascending order; they come in +- pairs.
  RealVector spectrum() const {
    const Matrix iA = kI * A.cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Matrix> es(iA, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

  /// The L non-negative single-particle energies, ascending.
  RealVector single_particle_energies() const { return spectrum().tail(sites); }

  double ground_energy() const { return -0.5 * single_particle_energies().sum(); }
};

inline MajoranaCoupling jw_tfim_coupling(const LatticeSpec& spec) {
  spec.validate();
  const int L = spec.sites;
  RealMatrix A = RealMatrix::Zero(2 * L, 2 * L);
  auto set = [&](int a, int b, double v) {
    A(a, b) += v;
    A(b, a) -= v;
  };
  for (int j = 0; j < L; ++j) set(2 * j, 2 * j + 1, -2.0 * spec.field);
  for (int j = 0; j + 1 < L; ++j) set(2 * j + 1, 2 * j + 2, -2.0 * spec.coupling);
  if (spec.boundary == Boundary::periodic) set(2 * L - 1, 0, 2.0 * spec.coupling);
  return MajoranaCoupling(L, std::move(A));
}

class CovarianceMatrix {
 public:
  static constexpr double kAntisymmetryTolerance = 1e-10;
  static constexpr double kSingularTolerance = 1e-9;
  static constexpr double kPurityTolerance = 1e-8;

  CovarianceMatrix() = default;
  CovarianceMatrix(int sites, RealMatrix g) : sites_(sites), G_(std::move(g)) {
    if (G_.rows() != 2 * sites_ || G_.cols() != 2 * sites_)
      throw std::invalid_argument("CovarianceMatrix: must be 2L x 2L");
    if (max_abs(G_ + G_.transpose()) > kAntisymmetryTolerance)
      throw std::invalid_argument("CovarianceMatrix: not antisymmetric");
    const Matrix iG = kI * G_.cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Matrix> es(iG, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().size() && es.eigenvalues().cwiseAbs().maxCoeff() > 1.0 + kSingularTolerance)
      throw std::invalid_argument("CovarianceMatrix: singular value above 1");
  }

  int sites() const { return sites_; }
  const RealMatrix& matrix() const { return G_; }
  RealMatrix& mutable_matrix() { return G_; }

  /// max |Gamma Gamma^T - 1|; zero for pure states.
  double purity_defect() const {
    return max_abs(G_ * G_.transpose() - RealMatrix::Identity(G_.rows(), G_.cols()));
  }
  bool pure() const { return purity_defect() < kPurityTolerance; }
  double antisymmetry_defect() const { return max_abs(G_ + G_.transpose()); }

  double x(int i) const { return G_(2 * i, 2 * i + 1); }

  /// <X_i X_j> by Wick's theorem.
  double xx(int i, int j) const {
    if (i == j) return 1.0;
    const int a = 2 * i, b = 2 * i + 1, c = 2 * j, d = 2 * j + 1;
    return G_(a, b) * G_(c, d) - G_(a, c) * G_(b, d) + G_(a, d) * G_(b, c);
  }

  double energy(const MajoranaCoupling& h) const { return 0.25 * (h.A.array() * G_.array()).sum(); }

 private:
  int sites_ = 0;
  RealMatrix G_;
};

inline constexpr double kZeroModeTolerance = 1e-12;

/// Gamma = i sgn(iA), the filled negative-energy modes.
inline CovarianceMatrix gaussian_ground_state(const MajoranaCoupling& h) {
  const Matrix iA = kI * h.A.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(iA);
  const RealVector& ev = es.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (std::abs(ev[k]) < kZeroModeTolerance)
      throw NumericalError("gaussian_ground_state: zero single-particle energy, ambiguous filling");
  const Matrix& U = es.eigenvectors();
  const Matrix S = U * ev.array().sign().matrix().cast<cplx>().asDiagonal() * U.adjoint();
  RealMatrix G = (kI * S).real();
  G = 0.5 * (G - G.transpose()).eval();
  return CovarianceMatrix(h.sites, std::move(G));
}

/// Product state with every spin along +X (Gamma_{2j,2j+1} = 1).
inline CovarianceMatrix gaussian_x_product(int sites, int sign = +1) {
  RealMatrix G = RealMatrix::Zero(2 * sites, 2 * sites);
  for (int j = 0; j < sites; ++j) {
    G(2 * j, 2 * j + 1) = sign;
    G(2 * j + 1, 2 * j) = -sign;
  }
  return CovarianceMatrix(sites, std::move(G));
}

/// exp(A t), orthogonal.
inline RealMatrix gaussian_propagator(const MajoranaCoupling& h, double t) {
  if (t == 0.0) return RealMatrix::Identity(h.A.rows(), h.A.cols());
  return RealMatrix((h.A * t).exp());
}

inline void apply_rotation(CovarianceMatrix& cov, const RealMatrix& R) {
  RealMatrix& G = cov.mutable_matrix();
  G = R * G * R.transpose();
  G = 0.5 * (G - G.transpose()).eval();
}

inline CovarianceMatrix gaussian_unitary_step(const CovarianceMatrix& cov, const MajoranaCoupling& h, double dt) {
  if (cov.sites() != h.sites) throw std::invalid_argument("gaussian_unitary_step: size mismatch");
  CovarianceMatrix out = cov;
  apply_rotation(out, gaussian_propagator(h, dt));
  return out;
}

struct GaussianOutcome {
  int outcome = 0;
  double probability = 0.0;
  bool rejected = false;
};

/// Kraus update for O = (1 + X_site)/2 with a pre-drawn uniform `u`.
inline GaussianOutcome gaussian_measure_site(CovarianceMatrix& cov, int site, double strength, double u,
                                             std::optional<double> reference_O = std::nullopt) {
  check_strength(strength);
  if (site < 0 || site >= cov.sites()) throw std::out_of_range("gaussian_measure_site: site outside the chain");
  RealMatrix& G = cov.mutable_matrix();
  const int p = 2 * site, q = 2 * site + 1;
  const double g = G(p, q);
  GaussianOutcome r;
  const double expO = 0.5 * (1.0 + g);
  const double p_plus = outcome_probability(strength, reference_O.value_or(expO), +1);
  r.outcome = sample_outcome(p_plus, u, r.rejected);
  r.probability = r.outcome > 0 ? p_plus : 1.0 - p_plus;

  const double m = r.outcome > 0 ? -strength : strength;
  const double D = 1.0 + m * g;
  if (!(D > 0.0)) throw NumericalError("gaussian_measure_site: post-measurement state vanished");
  const Eigen::Index n = G.rows();
  const RealVector cp = G.col(p), cq = G.col(q);
  // Gamma_jk += m (Gamma_jq Gamma_kp - Gamma_jp Gamma_kq) / D
  G.noalias() += (m / D) * (cq * cp.transpose() - cp * cq.transpose());
  const double c = std::sqrt(std::max(0.0, 1.0 - strength * strength)) / D;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    G(p, k) = -c * cp[k];
    G(k, p) = c * cp[k];
    G(q, k) = -c * cq[k];
    G(k, q) = c * cq[k];
  }
  G(p, q) = (g + m) / D;
  G(q, p) = -G(p, q);
  G(p, p) = 0.0;
  G(q, q) = 0.0;
  return r;
}

struct GaussianMeasurement {
  CovarianceMatrix cov;
  int outcome = 0;
  double probability = 0.0;
  bool rejected = false;
};

inline GaussianMeasurement gaussian_weak_measure(const CovarianceMatrix& cov, int site, double strength, Rng& rng) {
  GaussianMeasurement m{cov};
  const auto r = gaussian_measure_site(m.cov, site, strength, uniform01(rng));
  m.outcome = r.outcome;
  m.probability = r.probability;
  m.rejected = r.rejected;
  return m;
}

/// Sites [start, start + length), no wrap-around.
inline RealMatrix restrict_block(const CovarianceMatrix& cov, int start, int length) {
  if (start < 0 || length < 0 || start + length > cov.sites())
    throw std::out_of_range("gaussian entropy: block outside the chain");
  return cov.matrix().block(2 * start, 2 * start, 2 * length, 2 * length);
}

/// The 2l values nu >= 0 (each twice) with i Gamma_A having eigenvalues
/// +-nu, from the real symmetric Gamma_A Gamma_A^T.
inline RealVector block_spectrum(const RealMatrix& GA) {
  const RealMatrix sq = GA * GA.transpose();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sq, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

inline double binary_entropy(double p) {
  double s = 0.0;
  if (p > 1e-300) s -= p * std::log(p);
  if (1.0 - p > 1e-300) s -= (1.0 - p) * std::log1p(-p);
  return s;
}

inline double gaussian_entropy(const CovarianceMatrix& cov, int start, int length) {
  if (length == 0 || length == cov.sites()) return 0.0;
  const RealVector nu = block_spectrum(restrict_block(cov, start, length));
  double s = 0.0;
  for (Eigen::Index k = 0; k < nu.size(); ++k) s += binary_entropy(0.5 * (1.0 + std::clamp(nu[k], -1.0, 1.0)));
  return 0.5 * s;
}

inline double gaussian_renyi2(const CovarianceMatrix& cov, int start, int length) {
  if (length == 0 || length == cov.sites()) return 0.0;
  const RealVector nu = block_spectrum(restrict_block(cov, start, length));
  double s = 0.0;
  for (Eigen::Index k = 0; k < nu.size(); ++k) s -= std::log(0.5 * (1.0 + nu[k] * nu[k]));
  return 0.5 * s;
}

/// Trajectory of an X-axis protocol on the covariance. Shares the outcome
/// stream and step structure of the state-vector drivers, so equal seeds
/// give equal outcomes.
struct GaussianRecord {
  std::uint64_t seed = 0;
  MeasurementProtocol protocol;
  int sites = 0;
  int steps = 0;
  std::vector<std::int8_t> outcomes;
  std::vector<double> times;
  std::vector<std::vector<double>> x;        // <X_i> per recorded time
  std::vector<std::vector<double>> entropy;  // S([0, l)), l = 1..L-1, when requested
  TrajectoryDiagnostics diagnostics;
  CovarianceMatrix final_cov;
};

struct GaussianRecordOptions {
  bool entropies = false;
};

namespace detail {

inline void record_gaussian(GaussianRecord& rec, const CovarianceMatrix& cov, double t, bool entropies) {
  std::vector<double> xs(rec.sites);
  for (int i = 0; i < rec.sites; ++i) xs[i] = cov.x(i);
  rec.times.push_back(t);
  rec.x.push_back(std::move(xs));
  if (entropies) {
    std::vector<double> s;
    for (int l = 1; l < rec.sites; ++l) s.push_back(gaussian_entropy(cov, 0, l));
    rec.entropy.push_back(std::move(s));
  }
}

inline void gaussian_sweep(GaussianRecord& rec, CovarianceMatrix& cov, double strength, Rng& rng,
                           const std::vector<double>* ref) {
  const auto& p = rec.protocol;
  for (std::size_t k = 0; k < p.sites.size(); ++k) {
    const double u = uniform01(rng);
    std::optional<double> fixed;
    if (ref) fixed = (*ref)[k];
    const auto r = gaussian_measure_site(cov, p.sites[k], strength, u, fixed);
    rec.outcomes.push_back(static_cast<std::int8_t>(r.outcome));
    rec.diagnostics.min_probability = std::min(rec.diagnostics.min_probability, r.probability);
    if (r.rejected) ++rec.diagnostics.rejected;
  }
  rec.diagnostics.max_purity_defect = std::max(rec.diagnostics.max_purity_defect, cov.purity_defect());
}

}  // namespace detail

inline void require_gaussian_protocol(const MeasurementProtocol& p, int sites) {
  p.validate(sites);
  if (p.axis != Axis::X)
    throw std::invalid_argument("gaussian backend: only X-axis measurements keep the state Gaussian");
}

inline GaussianRecord gaussian_trajectory(const CovarianceMatrix& cov0, const MajoranaCoupling& h,
                                          const MeasurementProtocol& protocol, std::uint64_t seed,
                                          const GaussianRecordOptions& opt = {}) {
  const int L = cov0.sites();
  require_gaussian_protocol(protocol, L);
  if (h.sites != L) throw std::invalid_argument("gaussian_trajectory: coupling size mismatch");
  GaussianRecord rec;
  rec.seed = seed;
  rec.protocol = protocol;
  rec.sites = L;
  rec.steps = protocol.steps();
  Rng rng(seed);
  CovarianceMatrix cov = cov0;
  std::vector<double> ref;
  if (protocol.feedback == Feedback::mean_field) {
    if (!protocol.reference_expectations.empty()) ref = protocol.reference_expectations;
    else
      for (int s : protocol.sites) ref.push_back(0.5 * (1.0 + cov.x(s)));
  }
  const std::vector<double>* refp = ref.empty() ? nullptr : &ref;
  detail::record_gaussian(rec, cov, 0.0, opt.entropies);
  if (protocol.schedule == Schedule::pulse) {
    detail::gaussian_sweep(rec, cov, protocol.strength, rng, refp);
    detail::record_gaussian(rec, cov, 0.0, opt.entropies);
  } else {
    const RealMatrix R = gaussian_propagator(h, protocol.dt / 2.0);
    const double strength = protocol.step_strength();
    for (int step = 1; step <= rec.steps; ++step) {
      apply_rotation(cov, R);
      detail::gaussian_sweep(rec, cov, strength, rng, refp);
      apply_rotation(cov, R);
      if (step % protocol.record_stride == 0 || step == rec.steps)
        detail::record_gaussian(rec, cov, step * protocol.dt, opt.entropies);
    }
  }
  rec.final_cov = cov;
  return rec;
}

/// <stem>.csv rows "j,k,value" for the upper triangle; <stem>.json header.
inline void write_covariance(const CovarianceMatrix& cov, double time, const std::filesystem::path& dir,
                             const std::string& stem) {
  std::string csv = "j,k,value\n";
  const RealMatrix& G = cov.matrix();
  for (Eigen::Index j = 0; j < G.rows(); ++j)
    for (Eigen::Index k = j + 1; k < G.cols(); ++k)
      csv += std::to_string(j) + ',' + std::to_string(k) + ',' + fmt(G(j, k)) + '\n';
  write_file(dir / (stem + ".csv"), csv);
  const json h{{"format", "qmon-covariance/1"},
               {"sites", cov.sites()},
               {"time", time},
               {"purity_defect", cov.purity_defect()},
               {"content_hash", git_blob_hash(csv)}};
  write_file(dir / (stem + ".json"), h.dump(2) + "\n");
}

inline CovarianceMatrix read_covariance(const std::filesystem::path& dir, const std::string& stem) {
  const json h = json::parse(read_file(dir / (stem + ".json")));
  const int L = h.at("sites").get<int>();
  RealMatrix G = RealMatrix::Zero(2 * L, 2 * L);
  std::istringstream in(read_file(dir / (stem + ".csv")));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    const int j = std::stoi(f.at(0)), k = std::stoi(f.at(1));
    const double v = std::stod(f.at(2));
    G(j, k) = v;
    G(k, j) = -v;
  }
  return CovarianceMatrix(L, std::move(G));
}

}  // namespace qmon
