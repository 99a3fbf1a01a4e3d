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


// Markovian master equation
//
//   d rho / dt = -i [H, rho] + sum_a g_a (2 L_a rho L_a^+ - {L_a^+ L_a, rho})
//
// integrated with classical RK4 on the dense density matrix. Every step is
// followed by Hermitian symmetrization and trace renormalization; the size of
// both corrections is logged so callers can assert the consistency
// conditions instead of having them silently absorbed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qmon/io.hpp"
#include "qmon/random.hpp"
#include "qmon/spin_chain.hpp"
#include "qmon/statistics.hpp"
#include "qmon/weak_measurement.hpp"

namespace qmon {

class LindbladModel {
 public:
  LindbladModel() = default;

  LindbladModel(OperatorMatrix H, std::vector<OperatorMatrix> jumps, std::vector<double> rates)
      : H_(std::move(H)), jumps_(std::move(jumps)), rates_(std::move(rates)) {
    if (jumps_.size() != rates_.size()) throw std::invalid_argument("LindbladModel: one rate per jump operator");
    for (double g : rates_)
      if (!(g >= 0.0)) throw std::invalid_argument("LindbladModel: dissipation rates must be non-negative");
    for (const auto& L : jumps_)
      if (L.dimension() != H_.dimension()) throw std::invalid_argument("LindbladModel: operator dimension mismatch");
    for (const auto& L : jumps_) jump_squares_.push_back(SparseMatrix(L.sparse().adjoint()) * L.sparse());
  }

  const OperatorMatrix& hamiltonian() const { return H_; }
  const std::vector<OperatorMatrix>& jumps() const { return jumps_; }
  const std::vector<double>& rates() const { return rates_; }
  const std::vector<SparseMatrix>& jump_squares() const { return jump_squares_; }
  int sites() const { return H_.sites(); }
  Eigen::Index dimension() const { return H_.dimension(); }

  /// 0.1 / (||H|| + sum_a g_a ||L_a^+ L_a||), norms bounded by max row sums.
  double stability_bound() const {
    double s = H_.norm_bound();
    for (std::size_t a = 0; a < jumps_.size(); ++a) {
      double worst = 0.0;
      const SparseMatrix& m = jump_squares_[a];
      for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        double row = 0.0;
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) row += std::abs(it.value());
        worst = std::max(worst, row);
      }
      s += rates_[a] * worst;
    }
    return s > 0.0 ? 0.1 / s : std::numeric_limits<double>::infinity();
  }

  json to_json() const {
    return json{{"sites", sites()}, {"jumps", jumps_.size()}, {"rates", rates_}, {"H_norm_bound", H_.norm_bound()}};
  }

  std::string hash() const {
    std::string bytes;
    auto add = [&](const SparseMatrix& m) {
      for (Eigen::Index k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
          bytes += std::to_string(it.row()) + ',' + std::to_string(it.col()) + ',' + fmt(it.value().real()) + ',' +
                   fmt(it.value().imag()) + ';';
    };
    add(H_.sparse());
    for (std::size_t a = 0; a < jumps_.size(); ++a) {
      bytes += '|' + fmt(rates_[a]) + '|';
      add(jumps_[a].sparse());
    }
    return git_blob_hash(bytes);
  }

 private:
  OperatorMatrix H_;
  std::vector<OperatorMatrix> jumps_;
  std::vector<double> rates_;
  std::vector<SparseMatrix> jump_squares_;
};

inline Matrix lindblad_rhs(const Matrix& rho, const LindbladModel& model) {
  if (rho.rows() != model.dimension() || rho.cols() != model.dimension())
    throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  const SparseMatrix& H = model.hamiltonian().sparse();
  Matrix out = -kI * (H * rho - rho * H);
  for (std::size_t a = 0; a < model.jumps().size(); ++a) {
    const double g = model.rates()[a];
    if (g == 0.0) continue;
    const SparseMatrix& L = model.jumps()[a].sparse();
    const SparseMatrix& K = model.jump_squares()[a];
    const Matrix Lr = L * rho;
    out += g * (2.0 * (Lr * SparseMatrix(L.adjoint())) - K * rho - rho * K);
  }
  return out;
}

inline Matrix lindblad_rhs(const DensityOperator& rho, const LindbladModel& model) {
  return lindblad_rhs(rho.matrix(), model);
}

/// Smallest eigenvalue: full spectrum up to 2^8, Lanczos beyond.
inline double smallest_eigenvalue(const Matrix& rho) {
  if (rho.rows() <= kFullSpectrumDimension) return min_eigenvalue(rho);
  auto apply = [&](const Vector& v) -> Vector { return rho * v; };
  auto none = [](Vector&) {};
  LanczosOptions opt;
  opt.tolerance = 1e-10;
  return lanczos_lowest(apply, none, detail::deterministic_start(rho.rows()), opt).energy;
}

struct EvolutionLog {
  int steps = 0;
  double dt = 0.0;
  double max_trace_drift_rate = 0.0;    // |tr rho - 1| / dt before renormalization
  double max_hermiticity_defect = 0.0;  // before symmetrization
  double min_eigenvalue = 1.0;          // over checkpoints
  int checkpoints = 0;
  bool purity_monotone = true;
  std::vector<double> purity;  // after every step, index 0 = initial

  static constexpr double kTraceDriftLimit = 1e-9;
  static constexpr double kHermiticityLimit = 1e-10;
  static constexpr double kPositivityLimit = -1e-9;

  bool passed() const {
    return max_trace_drift_rate < kTraceDriftLimit && max_hermiticity_defect < kHermiticityLimit &&
           min_eigenvalue >= kPositivityLimit;
  }

  json to_json() const {
    return json{{"steps", steps},
                {"dt", dt},
                {"max_trace_drift_rate", max_trace_drift_rate},
                {"max_hermiticity_defect", max_hermiticity_defect},
                {"min_eigenvalue", min_eigenvalue},
                {"checkpoints", checkpoints},
                {"purity_monotone", purity_monotone},
                {"passed", passed()}};
  }
};

struct EvolveOptions {
  int checkpoint_every = 10;
  double abort_eigenvalue = -1e-6;
  std::function<void(double, const Matrix&)> observer;  // called after every step
};

/// RK4 with steps of at most dt covering [0, T].
inline DensityOperator evolve(const DensityOperator& rho0, const LindbladModel& model, double dt, double T,
                              EvolutionLog* log = nullptr, const EvolveOptions& opt = {}) {
  if (rho0.dimension() != model.dimension()) throw std::invalid_argument("evolve: dimension mismatch");
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("evolve: dt must be positive and T non-negative");
  const double bound = model.stability_bound();
  if (dt > bound * (1.0 + 1e-12))
    throw std::invalid_argument("evolve: dt = " + std::to_string(dt) + " exceeds the stability bound " +
                                std::to_string(bound));
  const int n = T == 0.0 ? 0 : static_cast<int>(std::ceil(T / dt - 1e-9));
  const double h = n ? T / n : 0.0;
  EvolutionLog local;
  EvolutionLog& lg = log ? *log : local;
  lg = EvolutionLog{};
  lg.dt = h;
  Matrix rho = rho0.matrix();
  lg.purity.push_back((rho * rho).trace().real());
  for (int s = 1; s <= n; ++s) {
    const Matrix k1 = lindblad_rhs(rho, model);
    const Matrix k2 = lindblad_rhs(rho + (h / 2) * k1, model);
    const Matrix k3 = lindblad_rhs(rho + (h / 2) * k2, model);
    const Matrix k4 = lindblad_rhs(rho + h * k3, model);
    rho += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    lg.max_hermiticity_defect = std::max(lg.max_hermiticity_defect, hermiticity_defect(rho));
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    lg.max_trace_drift_rate = std::max(lg.max_trace_drift_rate, std::abs(tr - 1.0) / h);
    rho /= tr;
    ++lg.steps;

    const double p = (rho * rho).trace().real();
    if (p > lg.purity.back() + 1e-12) lg.purity_monotone = false;
    lg.purity.push_back(p);

    if (s % opt.checkpoint_every == 0 || s == n) {
      const double e = smallest_eigenvalue(rho);
      ++lg.checkpoints;
      lg.min_eigenvalue = std::min(lg.min_eigenvalue, e);
      if (e < opt.abort_eigenvalue)
        throw NumericalError("evolve: positivity violated, eigenvalue " + std::to_string(e) + " at t = " +
                             std::to_string(s * h));
    }
    if (opt.observer) opt.observer(s * h, rho);
  }
  if (n == 0) lg.min_eigenvalue = smallest_eigenvalue(rho);
  return DensityOperator(rho0.sites(), std::move(rho));
}

/// Single-site Paulis along `axis` on every site, uniform rate.
inline LindbladModel dephasing_model(const LatticeSpec& spec, Axis axis, double rate, bool with_hamiltonian = true) {
  if (!(rate >= 0.0)) throw std::invalid_argument("dephasing_model: negative rate");
  spec.validate();
  OperatorMatrix H = with_hamiltonian ? build_tfim_hamiltonian(spec)
                                      : OperatorMatrix(spec.sites, SparseMatrix(Eigen::Index{1} << spec.sites,
                                                                                Eigen::Index{1} << spec.sites),
                                                       true);
  std::vector<OperatorMatrix> jumps;
  for (int i = 0; i < spec.sites; ++i) jumps.push_back(pauli_operator(i, axis, spec.sites));
  return LindbladModel(std::move(H), std::move(jumps), std::vector<double>(spec.sites, rate));
}

/// Master equation whose solution equals the outcome average of
/// continuous monitoring under `protocol`: jumps sigma^axis on the measured
/// sites at rate gamma/2.
inline LindbladModel qsd_equivalent_lindblad(const OperatorMatrix& H, const MeasurementProtocol& protocol) {
  protocol.validate(H.sites());
  std::vector<OperatorMatrix> jumps;
  for (int s : protocol.sites) jumps.push_back(pauli_operator(s, protocol.axis, H.sites()));
  return LindbladModel(H, std::move(jumps), std::vector<double>(protocol.sites.size(), protocol.rate / 2.0));
}

inline double trace_norm(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

struct DiscrepancyReport {
  std::size_t trajectories = 0;
  double distance = 0.0;  // || mean rho - rho_Lindblad ||_1
  double floor = 0.0;     // bootstrap mean of || resampled mean - mean ||_1
  EvolutionLog lindblad;

  bool within(double factor) const { return distance < factor * floor; }

  json to_json() const {
    return json{{"trajectories", trajectories}, {"distance", distance}, {"floor", floor}, {"lindblad", lindblad.to_json()}};
  }
};

inline Matrix ensemble_mean(const std::vector<PureState>& states) {
  if (states.empty()) throw std::invalid_argument("ensemble_mean: empty ensemble");
  const Eigen::Index d = states.front().dimension();
  Matrix psi(d, static_cast<Eigen::Index>(states.size()));
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].dimension() != d) throw std::invalid_argument("ensemble_mean: mixed dimensions");
    psi.col(static_cast<Eigen::Index>(k)) = states[k].amplitudes();
  }
  return psi * psi.adjoint() / double(states.size());
}

inline DiscrepancyReport trajectory_average_vs_lindblad(const std::vector<PureState>& finals,
                                                        const DensityOperator& rho0, const LindbladModel& model,
                                                        double T, int bootstrap_samples = kDefaultBootstrapSamples) {
  if (finals.empty()) throw std::invalid_argument("trajectory_average_vs_lindblad: empty ensemble");
  if (finals.front().dimension() != model.dimension())
    throw std::invalid_argument("trajectory_average_vs_lindblad: ensemble and model dimensions differ");
  DiscrepancyReport r;
  r.trajectories = finals.size();
  const DensityOperator target = evolve(rho0, model, model.stability_bound(), T, &r.lindblad);
  const Matrix mean = ensemble_mean(finals);
  r.distance = trace_norm(mean - target.matrix());

  const Eigen::Index d = model.dimension();
  const std::size_t n = finals.size();
  Matrix psi(d, static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) psi.col(static_cast<Eigen::Index>(k)) = finals[k].amplitudes();
  const auto dist = bootstrap(n, bootstrap_samples, [&](const std::vector<std::size_t>& idx) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i : idx) w[static_cast<Eigen::Index>(i)] += 1.0;
    const Vector sw = w.cwiseSqrt().cast<cplx>();
    const Matrix m = psi * sw.asDiagonal();
    return trace_norm(m * m.adjoint() / double(n) - mean);
  });
  r.floor = compensated_mean(dist);
  return r;
}

/// Same, checking that all records share one protocol and chain.
inline DiscrepancyReport trajectory_average_vs_lindblad(const std::vector<TrajectoryRecord>& records,
                                                        const DensityOperator& rho0, const LindbladModel& model,
                                                        double T, int bootstrap_samples = kDefaultBootstrapSamples) {
  if (records.empty()) throw std::invalid_argument("trajectory_average_vs_lindblad: empty ensemble");
  const std::string ref = records.front().protocol.to_json().dump();
  std::vector<PureState> finals;
  finals.reserve(records.size());
  for (const auto& r : records) {
    if (r.protocol.to_json().dump() != ref || r.sites != records.front().sites)
      throw std::invalid_argument("trajectory_average_vs_lindblad: records come from mismatched protocols");
    finals.push_back(r.final_state);
  }
  const auto& p = records.front().protocol;
  if (p.schedule == Schedule::continuous && std::abs(p.steps() * p.dt - T) > 1e-9)
    throw std::invalid_argument("trajectory_average_vs_lindblad: record horizon differs from T");
  return trajectory_average_vs_lindblad(finals, rho0, model, T, bootstrap_samples);
}

// ---------------------------------------------------------------------------
// Checkpoints: <stem>.bin holds dim*dim (re, im) little-endian doubles in
// row-major order; <stem>.json holds {"format", "dimension", "sites", "time",
// "model_hash"}.

inline void write_checkpoint(const DensityOperator& rho, double time, const std::string& model_hash,
                             const std::filesystem::path& dir, const std::string& stem) {
  const Eigen::Index d = rho.dimension();
  std::string bytes;
  bytes.resize(static_cast<std::size_t>(d * d) * 2 * sizeof(double));
  char* out = bytes.data();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double re = rho.matrix()(i, j).real(), im = rho.matrix()(i, j).imag();
      std::memcpy(out, &re, sizeof re);
      std::memcpy(out + sizeof re, &im, sizeof im);
      out += 2 * sizeof(double);
    }
  write_file(dir / (stem + ".bin"), bytes);
  const json side{{"format", "qmon-density/1"},
                  {"dimension", d},
                  {"sites", rho.sites()},
                  {"time", time},
                  {"model_hash", model_hash},
                  {"layout", "row-major complex128 (re, im) little-endian"}};
  write_file(dir / (stem + ".json"), side.dump(2) + "\n");
}

struct Checkpoint {
  DensityOperator rho;
  double time = 0.0;
  std::string model_hash;
};

inline Checkpoint read_checkpoint(const std::filesystem::path& dir, const std::string& stem) {
  const json side = json::parse(read_file(dir / (stem + ".json")));
  const auto d = side.at("dimension").get<Eigen::Index>();
  const std::string bytes = read_file(dir / (stem + ".bin"));
  if (bytes.size() != static_cast<std::size_t>(d * d) * 2 * sizeof(double))
    throw std::runtime_error("read_checkpoint: binary size does not match the sidecar dimension");
  Matrix m(d, d);
  const char* in = bytes.data();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      double re, im;
      std::memcpy(&re, in, sizeof re);
      std::memcpy(&im, in + sizeof re, sizeof im);
      m(i, j) = {re, im};
      in += 2 * sizeof(double);
    }
  return {DensityOperator(side.at("sites").get<int>(), std::move(m)), side.at("time").get<double>(),
          side.at("model_hash").get<std::string>()};
}

}  // namespace qmon
