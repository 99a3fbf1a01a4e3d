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


// Two-outcome weak measurements of local projectors and the trajectory
// drivers built on them.
//
// For a projector O and strength G in [0, 1] the Kraus pair is
//
//   A_+ = sqrt((1+G)/2) (1-O) + sqrt((1-G)/2) O
//   A_- = sqrt((1-G)/2) (1-O) + sqrt((1+G)/2) O
//
// with Born probabilities p_+- = (1 +- G (1 - 2<O>)) / 2. The measured
// projector at site x along `axis` is O(x) = (1 + sigma^axis_x) / 2, so the
// "+" outcome leans towards sigma = -1. Outcomes are recorded as W = +-1.
//
// Continuous monitoring at rate gamma uses a strength per step of
//
//   G_step = sqrt(1 - exp(-4 gamma dt))  ~= 2 sqrt(gamma dt),
//
// which makes the outcome-averaged channel of one step exactly the dephasing
// exp(dt * gamma/2 * D[sigma]), i.e. the Lindblad equation with jump sigma at
// rate gamma/2 in the convention d rho/dt = sum rate (2 L rho L^+ - {L^+L, rho}).
// Unitary evolution is interleaved symmetrically: half step, measurement
// sweep over the sites in ascending order, half step.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qmon/io.hpp"
#include "qmon/random.hpp"
#include "qmon/spin_chain.hpp"

namespace qmon {

enum class Schedule { pulse, continuous };
enum class Feedback { trajectory, mean_field };

inline std::string to_string(Schedule s) { return s == Schedule::pulse ? "pulse" : "continuous"; }
inline std::string to_string(Feedback f) { return f == Feedback::trajectory ? "trajectory" : "mean_field"; }

inline Schedule parse_schedule(std::string_view s) {
  if (s == "pulse") return Schedule::pulse;
  if (s == "continuous") return Schedule::continuous;
  throw std::invalid_argument("unknown schedule '" + std::string(s) + "'");
}

inline Feedback parse_feedback(std::string_view s) {
  if (s == "trajectory") return Feedback::trajectory;
  if (s == "mean_field") return Feedback::mean_field;
  throw std::invalid_argument("unknown feedback mode '" + std::string(s) + "'");
}

inline std::vector<int> all_sites(int sites) {
  std::vector<int> v(sites);
  for (int i = 0; i < sites; ++i) v[i] = i;
  return v;
}

struct MeasurementProtocol {
  Axis axis = Axis::X;
  std::vector<int> sites;
  double strength = 0.0;  // pulse strength G
  double rate = 0.0;      // continuous rate gamma
  double dt = 0.01;
  double horizon = 0.0;
  Schedule schedule = Schedule::pulse;
  Feedback feedback = Feedback::trajectory;
  double validity_window = 0.1;  // upper bound on gamma * dt
  int record_stride = 1;
  std::vector<double> snapshot_times;
  // Fixed <O(x)> per measured site for mean-field feedback; taken from the
  // initial state when empty.
  std::vector<double> reference_expectations;

  static MeasurementProtocol pulse(Axis axis, std::vector<int> sites, double strength) {
    MeasurementProtocol p;
    p.axis = axis;
    p.sites = std::move(sites);
    p.strength = strength;
    p.schedule = Schedule::pulse;
    return p;
  }

  static MeasurementProtocol continuous(Axis axis, std::vector<int> sites, double rate, double dt, double horizon,
                                        Feedback feedback = Feedback::trajectory) {
    MeasurementProtocol p;
    p.axis = axis;
    p.sites = std::move(sites);
    p.rate = rate;
    p.dt = dt;
    p.horizon = horizon;
    p.schedule = Schedule::continuous;
    p.feedback = feedback;
    return p;
  }

  void validate(int chain_sites) const {
    if (axis == Axis::Y) throw std::invalid_argument("MeasurementProtocol: only X or Z measurements are supported");
    for (int s : sites)
      if (s < 0 || s >= chain_sites)
        throw std::out_of_range("MeasurementProtocol: measured site " + std::to_string(s) + " outside the chain");
    if (!(strength >= 0.0 && strength <= 1.0)) throw std::invalid_argument("MeasurementProtocol: strength outside [0, 1]");
    if (!(rate >= 0.0)) throw std::invalid_argument("MeasurementProtocol: negative rate");
    if (!(dt > 0.0)) throw std::invalid_argument("MeasurementProtocol: dt must be positive");
    if (schedule == Schedule::continuous) {
      if (!(horizon >= 0.0)) throw std::invalid_argument("MeasurementProtocol: negative horizon");
      if (rate * dt > validity_window)
        throw std::invalid_argument("MeasurementProtocol: gamma*dt = " + std::to_string(rate * dt) +
                                    " exceeds the weak-measurement window " + std::to_string(validity_window));
    }
    if (record_stride < 1) throw std::invalid_argument("MeasurementProtocol: record_stride must be >= 1");
    if (!reference_expectations.empty() && reference_expectations.size() != sites.size())
      throw std::invalid_argument("MeasurementProtocol: one reference expectation per measured site expected");
  }

  int steps() const {
    return schedule == Schedule::pulse ? 1 : static_cast<int>(std::llround(horizon / dt));
  }

  double step_strength() const {
    return schedule == Schedule::pulse ? strength : std::sqrt(-std::expm1(-4.0 * rate * dt));
  }

  json to_json() const {
    return json{{"axis", to_string(axis)},
                {"sites", sites},
                {"strength", strength},
                {"rate", rate},
                {"dt", dt},
                {"horizon", horizon},
                {"schedule", to_string(schedule)},
                {"feedback", to_string(feedback)},
                {"validity_window", validity_window},
                {"record_stride", record_stride},
                {"snapshot_times", snapshot_times},
                {"reference_expectations", reference_expectations}};
  }

  static MeasurementProtocol from_json(const json& j) {
    MeasurementProtocol p;
    p.axis = parse_axis(j.at("axis").get<std::string>());
    p.sites = j.at("sites").get<std::vector<int>>();
    p.strength = j.value("strength", 0.0);
    p.rate = j.value("rate", 0.0);
    p.dt = j.value("dt", 0.01);
    p.horizon = j.value("horizon", 0.0);
    p.schedule = parse_schedule(j.value("schedule", std::string("pulse")));
    p.feedback = parse_feedback(j.value("feedback", std::string("trajectory")));
    p.validity_window = j.value("validity_window", 0.1);
    p.record_stride = j.value("record_stride", 1);
    p.snapshot_times = j.value("snapshot_times", std::vector<double>{});
    p.reference_expectations = j.value("reference_expectations", std::vector<double>{});
    return p;
  }
};

struct KrausPair {
  OperatorMatrix plus;
  OperatorMatrix minus;

  double completeness_defect() const {
    SparseMatrix s = SparseMatrix(SparseMatrix(plus.sparse().adjoint()) * plus.sparse());
    s += SparseMatrix(SparseMatrix(minus.sparse().adjoint()) * minus.sparse());
    SparseMatrix id(s.rows(), s.cols());
    id.setIdentity();
    s -= id;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < s.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(s, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
  }
};

inline void check_strength(double strength) {
  if (!(strength >= 0.0 && strength <= 1.0))
    throw std::invalid_argument("measurement strength " + std::to_string(strength) + " outside [0, 1]");
}

inline void check_projector(const OperatorMatrix& O) {
  if (!O.hermitian()) throw std::invalid_argument("measured operator is not Hermitian");
  SparseMatrix d = SparseMatrix(O.sparse() * O.sparse());
  d -= O.sparse();
  for (Eigen::Index k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it)
      if (std::abs(it.value()) > 1e-12) throw std::invalid_argument("measured operator is not a projector (O^2 != O)");
}

/// (1 + sigma^axis_site) / 2
inline OperatorMatrix measurement_projector(int site, Axis axis, int sites) {
  const OperatorMatrix id = OperatorMatrix::identity(sites);
  return cplx(0.5) * (id + pauli_operator(site, axis, sites));
}

inline KrausPair kraus_pair(const OperatorMatrix& O, double strength) {
  check_projector(O);
  check_strength(strength);
  const double hi = std::sqrt((1.0 + strength) / 2.0);
  const double lo = std::sqrt((1.0 - strength) / 2.0);
  const OperatorMatrix id = OperatorMatrix::identity(O.sites());
  const OperatorMatrix rest = id - O;
  return {cplx(hi) * rest + cplx(lo) * O, cplx(lo) * rest + cplx(hi) * O};
}

/// p_outcome = (1 + outcome * G * (1 - 2 <O>)) / 2
inline double outcome_probability(double strength, double expect_O, int outcome) {
  return 0.5 * (1.0 + outcome * strength * (1.0 - 2.0 * expect_O));
}

/// Branch probabilities below this are treated as numerically impossible: the
/// draw is rejected and the complementary branch taken.
inline constexpr double kMinBranchProbability = 1e-15;

struct MeasurementStep {
  PureState state;
  int outcome = 0;
  double probability = 0.0;
  bool rejected = false;
};

inline int sample_outcome(double p_plus, double u, bool& rejected) {
  int outcome = u < p_plus ? +1 : -1;
  const double p = outcome > 0 ? p_plus : 1.0 - p_plus;
  rejected = p < kMinBranchProbability;
  if (rejected) outcome = -outcome;
  return outcome;
}

/// One Born-rule weak measurement of the projector O on `state`.
inline MeasurementStep weak_measure_step(const PureState& state, const OperatorMatrix& O, double strength, Rng& rng) {
  if (state.dimension() != O.dimension()) throw std::invalid_argument("weak_measure_step: dimension mismatch");
  const KrausPair k = kraus_pair(O, strength);
  const double expO = expectation(state, O).real();
  const double p_plus = outcome_probability(strength, expO, +1);
  MeasurementStep step;
  step.outcome = sample_outcome(p_plus, uniform01(rng), step.rejected);
  step.probability = step.outcome > 0 ? p_plus : 1.0 - p_plus;
  const Vector post = (step.outcome > 0 ? k.plus : k.minus).apply(state.amplitudes());
  step.state = PureState::normalized(state.sites(), post);
  return step;
}

/// First-order increment of rho = |psi><psi| for the given outcome W:
///   -(G^2 / 2) [M, [M, rho]] - G W {M, rho},   M = O - <O>.
/// Matches the exact Kraus step up to O(G^2) corrections in the stochastic
/// term; intended as a test oracle for small G.
inline Matrix delta_rho_check(const PureState& state, const OperatorMatrix& O, double strength, int outcome) {
  check_projector(O);
  if (strength > 0.05) throw std::invalid_argument("delta_rho_check: first-order expansion needs G <= 0.05");
  if (outcome != 1 && outcome != -1) throw std::invalid_argument("delta_rho_check: outcome must be +1 or -1");
  const Vector& a = state.amplitudes();
  const Matrix rho = a * a.adjoint();
  const double expO = expectation(state, O).real();
  const Matrix M = O.dense() - expO * Matrix::Identity(rho.rows(), rho.cols());
  const Matrix comm = M * rho - rho * M;
  const Matrix dbl = M * comm - comm * M;
  const Matrix anti = M * rho + rho * M;
  return -(strength * strength / 2.0) * dbl - strength * double(outcome) * anti;
}

namespace kernels {

struct SiteOutcome {
  int outcome = 0;
  double probability = 0.0;
  double expect_O = 0.0;
  bool rejected = false;
};

/// In-place weak measurement of (1 + sigma^axis_site)/2 with a pre-drawn
/// uniform `u`. With `reference_O` set, outcome probabilities use that fixed
/// expectation instead of the state's own (mean-field feedback).
inline SiteOutcome measure_site(Vector& psi, int sites, int site, Axis axis, double strength, double u,
                                std::optional<double> reference_O = std::nullopt) {
  SiteOutcome r;
  r.expect_O = 0.5 * (1.0 + expect_pauli(psi, sites, site, axis));
  const double p_plus = outcome_probability(strength, reference_O.value_or(r.expect_O), +1);
  r.outcome = sample_outcome(p_plus, u, r.rejected);
  r.probability = r.outcome > 0 ? p_plus : 1.0 - p_plus;
  const double hi = std::sqrt((1.0 + strength) / 2.0);
  const double lo = std::sqrt((1.0 - strength) / 2.0);
  // weight on the O = 0 (sigma = -1) and O = 1 (sigma = +1) subspaces
  const double w_down = r.outcome > 0 ? hi : lo;
  const double w_up = r.outcome > 0 ? lo : hi;
  const std::uint64_t m = site_mask(sites, site);
  const auto dim = static_cast<std::uint64_t>(psi.size());
  if (axis == Axis::Z) {
    for (std::uint64_t b = 0; b < dim; ++b) psi[b] *= (b & m) ? w_down : w_up;
  } else {
    // A = c0 + c1 X
    const double c0 = 0.5 * (w_up + w_down);
    const double c1 = 0.5 * (w_up - w_down);
    for (std::uint64_t b = 0; b < dim; ++b) {
      if (b & m) continue;
      const cplx a0 = psi[b];
      const cplx a1 = psi[b | m];
      psi[b] = c0 * a0 + c1 * a1;
      psi[b | m] = c1 * a0 + c0 * a1;
    }
  }
  const double n = psi.norm();
  if (!(n > 0.0)) throw NumericalError("measure_site: post-measurement state vanished");
  psi /= n;
  return r;
}

}  // namespace kernels

struct TrajectoryDiagnostics {
  double max_norm_drift = 0.0;     // largest |norm - 1| after a unitary step
  double max_purity_defect = 0.0;  // largest |tr rho^2 - 1| after renormalization
  double min_probability = 1.0;    // smallest sampled branch probability
  std::size_t rejected = 0;
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  MeasurementProtocol protocol;
  int sites = 0;
  int steps = 0;
  std::vector<std::int8_t> outcomes;  // steps x measured sites, row-major
  std::vector<double> times;
  std::vector<std::vector<double>> z;  // per recorded time: <Z_i>, all sites
  std::vector<std::vector<double>> x;  // per recorded time: <X_i>, all sites
  std::vector<std::pair<double, Vector>> snapshots;
  TrajectoryDiagnostics diagnostics;
  PureState final_state;

  int outcome(int step, std::size_t k) const { return outcomes.at(step * protocol.sites.size() + k); }

  bool same_data(const TrajectoryRecord& o) const {
    return seed == o.seed && sites == o.sites && steps == o.steps && outcomes == o.outcomes && times == o.times &&
           z == o.z && x == o.x;
  }
};

namespace detail {

inline void record_observables(TrajectoryRecord& rec, const Vector& psi, double t) {
  std::vector<double> zs(rec.sites), xs(rec.sites);
  for (int i = 0; i < rec.sites; ++i) {
    zs[i] = kernels::expect_pauli(psi, rec.sites, i, Axis::Z);
    xs[i] = kernels::expect_pauli(psi, rec.sites, i, Axis::X);
  }
  rec.times.push_back(t);
  rec.z.push_back(std::move(zs));
  rec.x.push_back(std::move(xs));
}

inline std::vector<double> reference_expectations(const MeasurementProtocol& p, const Vector& psi, int sites) {
  if (!p.reference_expectations.empty()) return p.reference_expectations;
  std::vector<double> ref;
  for (int s : p.sites) ref.push_back(0.5 * (1.0 + kernels::expect_pauli(psi, sites, s, p.axis)));
  return ref;
}

inline void sweep(TrajectoryRecord& rec, Vector& psi, double strength, Rng& rng, const std::vector<double>* ref) {
  const auto& p = rec.protocol;
  for (std::size_t k = 0; k < p.sites.size(); ++k) {
    const double u = uniform01(rng);
    std::optional<double> fixed;
    if (ref) fixed = (*ref)[k];
    const auto r = kernels::measure_site(psi, rec.sites, p.sites[k], p.axis, strength, u, fixed);
    rec.outcomes.push_back(static_cast<std::int8_t>(r.outcome));
    rec.diagnostics.min_probability = std::min(rec.diagnostics.min_probability, r.probability);
    if (r.rejected) ++rec.diagnostics.rejected;
  }
  const double purity = std::pow(psi.squaredNorm(), 2);
  rec.diagnostics.max_purity_defect = std::max(rec.diagnostics.max_purity_defect, std::abs(purity - 1.0));
}

}  // namespace detail

struct PulseResult {
  PureState state;
  TrajectoryRecord record;
};

/// A single measurement sweep of strength G over the protocol sites, in
/// ascending order. The record holds the observables before and after.
inline PulseResult finite_time_pulse(const PureState& state, const MeasurementProtocol& protocol, std::uint64_t seed) {
  protocol.validate(state.sites());
  if (protocol.schedule != Schedule::pulse) throw std::invalid_argument("finite_time_pulse: protocol is not a pulse");
  TrajectoryRecord rec;
  rec.seed = seed;
  rec.protocol = protocol;
  rec.sites = state.sites();
  rec.steps = 1;
  Rng rng(seed);
  Vector psi = state.amplitudes();
  detail::record_observables(rec, psi, 0.0);
  std::vector<double> ref;
  if (protocol.feedback == Feedback::mean_field) ref = detail::reference_expectations(protocol, psi, rec.sites);
  detail::sweep(rec, psi, protocol.strength, rng, ref.empty() ? nullptr : &ref);
  detail::record_observables(rec, psi, 0.0);
  rec.final_state = PureState::normalized(rec.sites, psi);
  return {rec.final_state, std::move(rec)};
}

/// Norm drift per unitary step above which a trajectory is aborted.
inline constexpr double kMaxNormDrift = 1e-6;

/// Continuous monitoring: steps of exp(-iH dt/2), a weak-measurement sweep of
/// strength G_step, exp(-iH dt/2).
inline TrajectoryRecord qsd_trajectory(const PureState& state0, const OperatorMatrix& H,
                                       const MeasurementProtocol& protocol, std::uint64_t seed) {
  const int L = state0.sites();
  protocol.validate(L);
  if (protocol.schedule != Schedule::continuous)
    throw std::invalid_argument("qsd_trajectory: protocol is not continuous");
  if (H.dimension() != state0.dimension()) throw std::invalid_argument("qsd_trajectory: Hamiltonian dimension mismatch");
  TrajectoryRecord rec;
  rec.seed = seed;
  rec.protocol = protocol;
  rec.sites = L;
  rec.steps = protocol.steps();
  rec.outcomes.reserve(static_cast<std::size_t>(rec.steps) * protocol.sites.size());
  Rng rng(seed);
  const Propagator half(H, protocol.dt / 2.0);
  const double strength = protocol.step_strength();
  Vector psi = state0.amplitudes();
  std::vector<double> ref;
  if (protocol.feedback == Feedback::mean_field) ref = detail::reference_expectations(protocol, psi, L);

  std::vector<double> snaps = protocol.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto take_snapshots = [&](int step) {
    const double t = step * protocol.dt;
    while (next_snap < snaps.size() && snaps[next_snap] <= t + 1e-12) {
      rec.snapshots.emplace_back(t, psi);
      ++next_snap;
    }
  };
  auto unitary = [&] {
    half.apply(psi);
    const double drift = std::abs(psi.norm() - 1.0);
    rec.diagnostics.max_norm_drift = std::max(rec.diagnostics.max_norm_drift, drift);
    if (drift > kMaxNormDrift)
      throw NumericalError("qsd_trajectory: norm drift " + std::to_string(drift) + " per step; reduce dt");
  };

  detail::record_observables(rec, psi, 0.0);
  take_snapshots(0);
  for (int step = 1; step <= rec.steps; ++step) {
    unitary();
    detail::sweep(rec, psi, strength, rng, ref.empty() ? nullptr : &ref);
    unitary();
    psi.normalize();
    if (step % protocol.record_stride == 0 || step == rec.steps)
      detail::record_observables(rec, psi, step * protocol.dt);
    take_snapshots(step);
  }
  rec.final_state = PureState::normalized(L, psi);
  return rec;
}

// ---------------------------------------------------------------------------
// Serialization: <stem>.json header, <stem>_observables.csv,
// <stem>_outcomes.csv and, when snapshots exist, <stem>_snapshots.csv.

inline json record_header(const TrajectoryRecord& rec) {
  const json proto = rec.protocol.to_json();
  return json{{"format", "qmon-trajectory/1"},
              {"seed", rec.seed},
              {"sites", rec.sites},
              {"steps", rec.steps},
              {"protocol", proto},
              {"config_hash", git_blob_hash(proto.dump())},
              {"diagnostics",
               {{"max_norm_drift", rec.diagnostics.max_norm_drift},
                {"max_purity_defect", rec.diagnostics.max_purity_defect},
                {"min_probability", rec.diagnostics.min_probability},
                {"rejected", rec.diagnostics.rejected}}}};
}

inline std::string observables_csv(const TrajectoryRecord& rec) {
  std::string out = "time";
  for (int i = 0; i < rec.sites; ++i) out += ",Z" + std::to_string(i);
  for (int i = 0; i < rec.sites; ++i) out += ",X" + std::to_string(i);
  out += '\n';
  for (std::size_t r = 0; r < rec.times.size(); ++r) {
    out += fmt(rec.times[r]);
    for (double v : rec.z[r]) out += ',' + fmt(v);
    for (double v : rec.x[r]) out += ',' + fmt(v);
    out += '\n';
  }
  return out;
}

inline std::string outcomes_csv(const TrajectoryRecord& rec) {
  const std::size_t k = rec.protocol.sites.size();
  std::string out = "step";
  for (int s : rec.protocol.sites) out += ",W" + std::to_string(s);
  out += '\n';
  for (int step = 0; k > 0 && step < rec.steps; ++step) {
    out += std::to_string(step + 1);
    for (std::size_t j = 0; j < k; ++j) out += rec.outcome(step, j) > 0 ? ",1" : ",-1";
    out += '\n';
  }
  return out;
}

inline void write_record(const TrajectoryRecord& rec, const std::filesystem::path& dir, const std::string& stem) {
  write_file(dir / (stem + ".json"), record_header(rec).dump(2) + "\n");
  write_file(dir / (stem + "_observables.csv"), observables_csv(rec));
  write_file(dir / (stem + "_outcomes.csv"), outcomes_csv(rec));
  if (!rec.snapshots.empty()) {
    std::string s = "time,index,re,im\n";
    for (const auto& [t, v] : rec.snapshots)
      for (Eigen::Index i = 0; i < v.size(); ++i)
        s += fmt(t) + ',' + std::to_string(i) + ',' + fmt(v[i].real()) + ',' + fmt(v[i].imag()) + '\n';
    write_file(dir / (stem + "_snapshots.csv"), s);
  }
}

/// Reads back header, observables and outcomes (not the final state).
inline TrajectoryRecord read_record(const std::filesystem::path& dir, const std::string& stem) {
  const json h = json::parse(read_file(dir / (stem + ".json")));
  TrajectoryRecord rec;
  rec.seed = h.at("seed").get<std::uint64_t>();
  rec.sites = h.at("sites").get<int>();
  rec.steps = h.at("steps").get<int>();
  rec.protocol = MeasurementProtocol::from_json(h.at("protocol"));
  const auto& d = h.at("diagnostics");
  rec.diagnostics.max_norm_drift = d.at("max_norm_drift");
  rec.diagnostics.max_purity_defect = d.at("max_purity_defect");
  rec.diagnostics.min_probability = d.at("min_probability");
  rec.diagnostics.rejected = d.at("rejected");

  std::istringstream obs(read_file(dir / (stem + "_observables.csv")));
  std::string line;
  std::getline(obs, line);
  while (std::getline(obs, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != static_cast<std::size_t>(1 + 2 * rec.sites)) throw std::runtime_error("observables csv: bad row");
    rec.times.push_back(std::stod(f[0]));
    std::vector<double> zs, xs;
    for (int i = 0; i < rec.sites; ++i) zs.push_back(std::stod(f[1 + i]));
    for (int i = 0; i < rec.sites; ++i) xs.push_back(std::stod(f[1 + rec.sites + i]));
    rec.z.push_back(std::move(zs));
    rec.x.push_back(std::move(xs));
  }
  std::istringstream outc(read_file(dir / (stem + "_outcomes.csv")));
  std::getline(outc, line);
  while (std::getline(outc, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    for (std::size_t j = 1; j < f.size(); ++j) rec.outcomes.push_back(static_cast<std::int8_t>(std::stoi(f[j])));
  }
  return rec;
}

}  // namespace qmon
