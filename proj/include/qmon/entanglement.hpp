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


// Reduced density matrices, entanglement entropies, trajectory-ensemble
// entropy curves, and scaling fits.
//
// Fit models, with x = chord(l):
//   log              S = a ln x + b
//   volume_plus_log  S = kappa l + a ln x + b
//   saturating       S = S_inf (1 - exp(-x / xi)) + b
// chord(l) = (L/pi) sin(pi l / L) on periodic chains, (2L/pi) sin(pi l / L)
// on open chains, and l itself when chord substitution is switched off.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qmon/gaussian.hpp"
#include "qmon/io.hpp"
#include "qmon/parallel.hpp"
#include "qmon/spin_chain.hpp"
#include "qmon/statistics.hpp"

namespace qmon {

// ---------------------------------------------------------------------------
// Reduced states

namespace detail {

inline void check_block(int sites, int start, int length) {
  if (start < 0 || length < 0 || start + length > sites)
    throw std::out_of_range("subsystem [" + std::to_string(start) + ", " + std::to_string(start + length) +
                            ") outside a chain of " + std::to_string(sites) + " sites");
}

/// psi reshaped as Psi(a, r): a indexes the block, r the rest.
inline Matrix schmidt_matrix(const Vector& psi, int sites, int start, int length) {
  const int low = sites - start - length;  // bits below the block
  const std::uint64_t dim_a = std::uint64_t{1} << length;
  const std::uint64_t dim_r = std::uint64_t{1} << (sites - length);
  const std::uint64_t low_mask = (std::uint64_t{1} << low) - 1;
  Matrix m(static_cast<Eigen::Index>(dim_a), static_cast<Eigen::Index>(dim_r));
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(psi.size()); ++b) {
    const std::uint64_t a = (b >> low) & (dim_a - 1);
    const std::uint64_t r = ((b >> (low + length)) << low) | (b & low_mask);
    m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(r)) = psi[static_cast<Eigen::Index>(b)];
  }
  return m;
}

inline RealVector hermitian_spectrum(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace detail

inline DensityOperator reduced_density(const PureState& state, int start, int length,
                                       const BackendLimits& limits = kDefaultLimits) {
  detail::check_block(state.sites(), start, length);
  if (length > limits.dense_sites)
    throw CapacityError("reduced_density: block of " + std::to_string(length) + " sites exceeds the dense limit");
  const Matrix psi = detail::schmidt_matrix(state.amplitudes(), state.sites(), start, length);
  Matrix rho = psi * psi.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(length, std::move(rho));
}

inline DensityOperator reduced_density(const DensityOperator& rho, int start, int length,
                                       const BackendLimits& limits = kDefaultLimits) {
  const int L = rho.sites();
  detail::check_block(L, start, length);
  if (length > limits.dense_sites)
    throw CapacityError("reduced_density: block of " + std::to_string(length) + " sites exceeds the dense limit");
  const int low = L - start - length;
  const std::uint64_t dim_a = std::uint64_t{1} << length;
  const std::uint64_t dim_r = std::uint64_t{1} << (L - length);
  const std::uint64_t low_mask = (std::uint64_t{1} << low) - 1;
  auto index = [&](std::uint64_t a, std::uint64_t r) {
    return static_cast<Eigen::Index>(((r >> low) << (low + length)) | (a << low) | (r & low_mask));
  };
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim_a), static_cast<Eigen::Index>(dim_a));
  const Matrix& m = rho.matrix();
  for (std::uint64_t a = 0; a < dim_a; ++a)
    for (std::uint64_t a2 = 0; a2 < dim_a; ++a2) {
      cplx acc = 0.0;
      for (std::uint64_t r = 0; r < dim_r; ++r) acc += m(index(a, r), index(a2, r));
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a2)) = acc;
    }
  out = 0.5 * (out + out.adjoint()).eval();
  out /= out.trace().real();
  return DensityOperator(length, std::move(out));
}

inline constexpr double kEigenvalueCutoff = 1e-14;
inline constexpr double kNegativeEigenvalue = -1e-9;

/// -sum lambda ln lambda over a spectrum.
inline double entropy_of_spectrum(const RealVector& ev) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    const double l = ev[k];
    if (l < kNegativeEigenvalue) throw NumericalError("entropy: negative eigenvalue " + std::to_string(l));
    if (l >= kEigenvalueCutoff) s -= l * std::log(l);
  }
  return s;
}

inline double renyi2_of_spectrum(const RealVector& ev) {
  double p = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev[k] < kNegativeEigenvalue) throw NumericalError("entropy: negative eigenvalue " + std::to_string(ev[k]));
    if (ev[k] > 0.0) p += ev[k] * ev[k];
  }
  return -std::log(p);
}

inline double von_neumann(const DensityOperator& rhoA) {
  return entropy_of_spectrum(detail::hermitian_spectrum(rhoA.matrix()));
}

inline double renyi2(const DensityOperator& rhoA) {
  return renyi2_of_spectrum(detail::hermitian_spectrum(rhoA.matrix()));
}

/// Schmidt spectrum of [start, start+length), from the smaller side.
inline RealVector entanglement_spectrum(const PureState& state, int start, int length) {
  detail::check_block(state.sites(), start, length);
  const Matrix psi = detail::schmidt_matrix(state.amplitudes(), state.sites(), start, length);
  return detail::hermitian_spectrum(psi.rows() <= psi.cols() ? Matrix(psi * psi.adjoint())
                                                             : Matrix(psi.adjoint() * psi));
}

enum class Quantity { von_neumann, renyi2 };
enum class StateKind { pure_trajectory, mixed };
enum class Averaging { quenched, annealed };

inline std::string to_string(Quantity q) { return q == Quantity::von_neumann ? "vonNeumann" : "renyi2"; }
inline std::string to_string(StateKind k) { return k == StateKind::pure_trajectory ? "pure-trajectory" : "mixed"; }
inline std::string to_string(Averaging a) { return a == Averaging::quenched ? "quenched" : "annealed"; }

inline Quantity parse_quantity(std::string_view s) {
  if (s == "vonNeumann" || s == "von_neumann") return Quantity::von_neumann;
  if (s == "renyi2") return Quantity::renyi2;
  throw std::invalid_argument("unknown entropy quantity '" + std::string(s) + "'");
}

inline double pure_entropy(const PureState& s, int start, int length, Quantity q) {
  if (length == 0 || length == s.sites()) return 0.0;
  const RealVector ev = entanglement_spectrum(s, start, length);
  return q == Quantity::von_neumann ? entropy_of_spectrum(ev) : renyi2_of_spectrum(ev);
}

inline double gaussian_quantity(const CovarianceMatrix& c, int start, int length, Quantity q) {
  return q == Quantity::von_neumann ? gaussian_entropy(c, start, length) : gaussian_renyi2(c, start, length);
}

// ---------------------------------------------------------------------------
// Curves

struct EntropySample {
  int length = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t trajectories = 0;
};

struct EntropyCurve {
  int sites = 0;
  Boundary boundary = Boundary::periodic;
  Quantity quantity = Quantity::von_neumann;
  StateKind kind = StateKind::pure_trajectory;
  Averaging averaging = Averaging::quenched;
  std::vector<EntropySample> samples;
  // per-trajectory values, table[t][k] for samples[k]; kept for resampling
  std::vector<std::vector<double>> table;

  void validate() const {
    for (std::size_t k = 1; k < samples.size(); ++k)
      if (samples[k].length <= samples[k - 1].length)
        throw std::invalid_argument("EntropyCurve: lengths must be strictly increasing");
    for (const auto& s : samples)
      if (!(s.stderr_ >= 0.0)) throw std::invalid_argument("EntropyCurve: negative standard error");
  }

  /// Largest violation of S(l) = S(L-l) in units of the combined standard
  /// error (0 when no mirrored pair is present). Absolute when errors vanish.
  double mirror_violation() const {
    double worst = 0.0;
    for (const auto& a : samples)
      for (const auto& b : samples)
        if (a.length < b.length && a.length + b.length == sites) {
          const double se = std::hypot(a.stderr_, b.stderr_);
          const double d = std::abs(a.mean - b.mean);
          worst = std::max(worst, se > 0.0 ? d / se : d);
        }
    return worst;
  }

  const EntropySample& at(int length) const {
    for (const auto& s : samples)
      if (s.length == length) return s;
    throw std::out_of_range("EntropyCurve: no sample at l = " + std::to_string(length));
  }

  std::string to_csv() const {
    std::string out = "l,mean,stderr,n_traj\n";
    for (const auto& s : samples)
      out += std::to_string(s.length) + ',' + fmt(s.mean) + ',' + fmt(s.stderr_) + ',' +
             std::to_string(s.trajectories) + '\n';
    return out;
  }

  json header() const {
    return json{{"sites", sites},
                {"boundary", to_string(boundary)},
                {"quantity", to_string(quantity)},
                {"state_kind", to_string(kind)},
                {"averaging", to_string(averaging)}};
  }
};

inline std::vector<int> entropy_grid(int first, int last) {
  std::vector<int> g;
  for (int l = first; l <= last; ++l) g.push_back(l);
  return g;
}

/// Quenched curve from a table of per-trajectory entropies.
inline EntropyCurve curve_from_table(int sites, Boundary boundary, Quantity q, const std::vector<int>& grid,
                                     std::vector<std::vector<double>> table,
                                     int bootstrap_samples = kDefaultBootstrapSamples) {
  if (table.empty()) throw std::invalid_argument("entropy curve: empty ensemble");
  EntropyCurve c;
  c.sites = sites;
  c.boundary = boundary;
  c.quantity = q;
  const std::size_t n = table.size();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> col(n);
    for (std::size_t t = 0; t < n; ++t) col[t] = table[t].at(k);
    EntropySample s;
    s.length = grid[k];
    s.mean = compensated_mean(col);
    s.trajectories = n;
    const auto means = bootstrap(n, bootstrap_samples, [&](const std::vector<std::size_t>& idx) {
      CompensatedSum acc;
      for (std::size_t i : idx) acc.add(col[i]);
      return acc.value() / static_cast<double>(n);
    });
    s.stderr_ = sample_stddev(means);
    c.samples.push_back(s);
  }
  c.table = std::move(table);
  c.validate();
  return c;
}

/// Per-trajectory entropies of blocks [start, start+l), averaged. Annealed
/// averaging (Renyi-2 only) reports -ln(mean tr rho_A^2).
inline EntropyCurve ensemble_entropy_curve(const std::vector<PureState>& states, Quantity q,
                                           const std::vector<int>& grid, Boundary boundary = Boundary::periodic,
                                           Averaging averaging = Averaging::quenched, int start = 0) {
  if (states.empty()) throw std::invalid_argument("ensemble_entropy_curve: empty ensemble");
  const int L = states.front().sites();
  for (const auto& s : states)
    if (s.sites() != L) throw std::invalid_argument("ensemble_entropy_curve: inhomogeneous ensemble");
  if (averaging == Averaging::annealed && q != Quantity::renyi2)
    throw std::invalid_argument("ensemble_entropy_curve: annealed averaging is defined for renyi2 only");
  std::vector<std::vector<double>> table(states.size(), std::vector<double>(grid.size()));
  parallel_for(states.size(), [&](std::size_t t) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double s = pure_entropy(states[t], start, grid[k], q);
      table[t][k] = averaging == Averaging::annealed ? std::exp(-s) : s;
    }
  });
  EntropyCurve c = curve_from_table(L, boundary, q, grid, std::move(table));
  if (averaging == Averaging::annealed) {
    // samples hold mean tr rho^2 +- se; map through -ln
    for (auto& s : c.samples) {
      s.stderr_ = s.stderr_ / s.mean;
      s.mean = -std::log(s.mean);
    }
    c.averaging = Averaging::annealed;
  }
  return c;
}

inline EntropyCurve ensemble_entropy_curve(const std::vector<CovarianceMatrix>& covs, Quantity q,
                                           const std::vector<int>& grid, Boundary boundary = Boundary::periodic,
                                           int start = 0) {
  if (covs.empty()) throw std::invalid_argument("ensemble_entropy_curve: empty ensemble");
  const int L = covs.front().sites();
  std::vector<std::vector<double>> table(covs.size(), std::vector<double>(grid.size()));
  parallel_for(covs.size(), [&](std::size_t t) {
    for (std::size_t k = 0; k < grid.size(); ++k) table[t][k] = gaussian_quantity(covs[t], start, grid[k], q);
  });
  return curve_from_table(L, boundary, q, grid, std::move(table));
}

/// Curve of a single mixed state (no ensemble, zero errors).
inline EntropyCurve mixed_entropy_curve(const DensityOperator& rho, Quantity q, const std::vector<int>& grid,
                                        Boundary boundary = Boundary::periodic, int start = 0) {
  std::vector<double> row;
  for (int l : grid) {
    if (l == 0) {
      row.push_back(0.0);
      continue;
    }
    const DensityOperator r = reduced_density(rho, start, l);
    row.push_back(q == Quantity::von_neumann ? von_neumann(r) : renyi2(r));
  }
  EntropyCurve c = curve_from_table(rho.sites(), boundary, q, grid, {row}, 1);
  c.kind = StateKind::mixed;
  return c;
}

// ---------------------------------------------------------------------------
// Fits

enum class FitModel { log, volume_plus_log, saturating };

inline std::string to_string(FitModel m) {
  switch (m) {
    case FitModel::log: return "log";
    case FitModel::volume_plus_log: return "volume_plus_log";
    case FitModel::saturating: return "saturating";
  }
  return "?";
}

inline FitModel parse_fit_model(std::string_view s) {
  if (s == "log") return FitModel::log;
  if (s == "volume_plus_log") return FitModel::volume_plus_log;
  if (s == "saturating") return FitModel::saturating;
  throw std::invalid_argument("unknown fit model '" + std::string(s) + "'");
}

struct FitOptions {
  int l_min = 4;
  int l_max = -1;  // inclusive; -1 = no upper cut
  bool chord = true;
  int bootstrap_samples = 0;  // refits over resampled trajectories when > 0
};

struct FitReport {
  FitModel model = FitModel::log;
  std::vector<std::string> names;
  std::vector<double> params;
  RealMatrix covariance;
  std::vector<double> sigma;            // sqrt(diag covariance)
  std::vector<double> bootstrap_sigma;  // empty unless requested
  double chi2 = 0.0;
  double residual_rms = 0.0;  // unweighted
  int points = 0;

  double param(std::string_view name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return params[k];
    throw std::out_of_range("FitReport: no parameter " + std::string(name));
  }

  double uncertainty(std::string_view name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return bootstrap_sigma.empty() ? sigma[k] : bootstrap_sigma[k];
    throw std::out_of_range("FitReport: no parameter " + std::string(name));
  }

  json to_json() const {
    json p = json::object(), s = json::object();
    for (std::size_t k = 0; k < names.size(); ++k) {
      p[names[k]] = params[k];
      s[names[k]] = bootstrap_sigma.empty() ? sigma[k] : bootstrap_sigma[k];
    }
    std::vector<std::vector<double>> cov(covariance.rows(), std::vector<double>(covariance.cols()));
    for (Eigen::Index i = 0; i < covariance.rows(); ++i)
      for (Eigen::Index j = 0; j < covariance.cols(); ++j) cov[i][j] = covariance(i, j);
    return json{{"model", to_string(model)}, {"params", p},   {"sigma", s},
                {"cov", cov},                {"chi2", chi2},  {"residual_rms", residual_rms},
                {"points", points},          {"sigma_source", bootstrap_sigma.empty() ? "least_squares" : "bootstrap"}};
  }
};

inline double chord_length(int l, int sites, Boundary b) {
  const double s = std::sin(std::numbers::pi * l / sites) * sites / std::numbers::pi;
  return b == Boundary::periodic ? s : 2.0 * s;
}

namespace detail {

struct FitData {
  RealVector l, x, y, w;
};

inline FitData fit_data(const EntropyCurve& c, const std::vector<double>& means, const FitOptions& o) {
  std::vector<double> l, x, y, se;
  for (std::size_t k = 0; k < c.samples.size(); ++k) {
    const int len = c.samples[k].length;
    if (len < o.l_min || (o.l_max >= 0 && len > o.l_max)) continue;
    l.push_back(len);
    x.push_back(o.chord ? chord_length(len, c.sites, c.boundary) : double(len));
    y.push_back(means[k]);
    se.push_back(c.samples[k].stderr_);
  }
  const bool weighted = !se.empty() && std::all_of(se.begin(), se.end(), [](double s) { return s > 0.0; });
  FitData d;
  const auto n = static_cast<Eigen::Index>(l.size());
  d.l.resize(n);
  d.x.resize(n);
  d.y.resize(n);
  d.w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.l[i] = l[i];
    d.x[i] = x[i];
    d.y[i] = y[i];
    d.w[i] = weighted ? 1.0 / (se[i] * se[i]) : 1.0;
  }
  return d;
}

inline RealMatrix linear_design(const FitData& d, FitModel m) {
  const Eigen::Index n = d.x.size();
  RealMatrix X(n, m == FitModel::volume_plus_log ? 3 : 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    int c = 0;
    if (m == FitModel::volume_plus_log) X(i, c++) = d.l[i];
    X(i, c++) = std::log(d.x[i]);
    X(i, c++) = 1.0;
  }
  return X;
}

struct LinearSolution {
  RealVector beta;
  RealMatrix cov;
  double chi2 = 0.0;
};

/// Weighted least squares by column-pivoted QR of W^1/2 X.
inline LinearSolution solve_weighted(const RealMatrix& X, const RealVector& y, const RealVector& w) {
  const RealVector sw = w.cwiseSqrt();
  const RealMatrix Xw = sw.asDiagonal() * X;
  const RealVector yw = sw.asDiagonal() * y;
  Eigen::ColPivHouseholderQR<RealMatrix> qr(Xw);
  qr.setThreshold(1e-12);
  if (qr.rank() < X.cols()) throw std::invalid_argument("fit: rank-deficient design matrix");
  LinearSolution s;
  s.beta = qr.solve(yw);
  s.chi2 = (Xw * s.beta - yw).squaredNorm();
  const RealMatrix info = Xw.transpose() * Xw;
  s.cov = info.inverse();
  return s;
}

}  // namespace detail

namespace detail {

inline FitReport fit_means(const EntropyCurve& c, const std::vector<double>& means, FitModel model,
                           const FitOptions& o) {
  const FitData d = fit_data(c, means, o);
  const Eigen::Index n = d.x.size();
  const int min_points = 4;
  if (n < min_points) throw std::invalid_argument("fit: fewer than 4 points beyond the UV cutoff");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(d.x[i] > 0.0)) throw std::invalid_argument("fit: non-positive scaling variable");
  FitReport r;
  r.model = model;
  r.points = static_cast<int>(n);
  const bool weighted = (d.w.array() != 1.0).any();
  // when weights are unit, scale the covariance by the residual variance
  auto finish = [&](const RealVector& pred, RealMatrix cov, int nparams) {
    r.residual_rms = std::sqrt((pred - d.y).squaredNorm() / double(n));
    r.chi2 = ((pred - d.y).array().square() * d.w.array()).sum();
    if (!weighted && n > nparams) cov *= r.chi2 / double(n - nparams);
    r.covariance = cov;
    for (Eigen::Index k = 0; k < cov.rows(); ++k) r.sigma.push_back(std::sqrt(std::max(0.0, cov(k, k))));
  };

  if (model != FitModel::saturating) {
    const RealMatrix X = linear_design(d, model);
    const LinearSolution s = solve_weighted(X, d.y, d.w);
    if (model == FitModel::volume_plus_log) r.names = {"kappa", "a", "b"};
    else r.names = {"a", "b"};
    r.params.assign(s.beta.data(), s.beta.data() + s.beta.size());
    finish(X * s.beta, s.cov, static_cast<int>(X.cols()));
    return r;
  }

  // Variable projection: for fixed xi the model is linear in (S_inf, b).
  auto design = [&](double xi) {
    RealMatrix X(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      X(i, 0) = -std::expm1(-d.x[i] / xi);
      X(i, 1) = 1.0;
    }
    return X;
  };
  auto cost = [&](double lnxi) {
    try {
      return solve_weighted(design(std::exp(lnxi)), d.y, d.w).chi2;
    } catch (const std::invalid_argument&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const double lo = std::log(0.02 * d.x.minCoeff()), hi = std::log(100.0 * d.x.maxCoeff());
  const int grid = 400;
  double best = lo, best_cost = cost(lo);
  for (int k = 1; k <= grid; ++k) {
    const double t = lo + (hi - lo) * k / grid;
    const double c2 = cost(t);
    if (c2 < best_cost) best_cost = c2, best = t;
  }
  double a = std::max(lo, best - (hi - lo) / grid), b = std::min(hi, best + (hi - lo) / grid);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = cost(x1), f2 = cost(x2);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (f1 < f2) {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - phi * (b - a), f1 = cost(x1);
    } else {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + phi * (b - a), f2 = cost(x2);
    }
  }
  const double xi = std::exp(0.5 * (a + b));
  const LinearSolution s = solve_weighted(design(xi), d.y, d.w);
  const double S_inf = s.beta[0], off = s.beta[1];
  RealMatrix J(n, 3);
  RealVector pred(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = std::exp(-d.x[i] / xi);
    pred[i] = S_inf * (1.0 - e) + off;
    J(i, 0) = 1.0 - e;
    J(i, 1) = 1.0;
    J(i, 2) = -S_inf * e * d.x[i] / (xi * xi);
  }
  const RealMatrix info = J.transpose() * d.w.asDiagonal() * J;
  Eigen::FullPivLU<RealMatrix> lu(info);
  RealMatrix cov = lu.isInvertible() ? RealMatrix(lu.inverse())
                                     : RealMatrix::Constant(3, 3, std::numeric_limits<double>::infinity());
  r.names = {"S_inf", "b", "xi"};
  r.params = {S_inf, off, xi};
  finish(pred, cov, 3);
  return r;
}

}  // namespace detail

inline FitReport fit_log_scaling(const EntropyCurve& curve, FitModel model, const FitOptions& opt = {}) {
  curve.validate();
  std::vector<double> means;
  for (const auto& s : curve.samples) means.push_back(s.mean);
  FitReport r = detail::fit_means(curve, means, model, opt);
  if (opt.bootstrap_samples > 0 && curve.table.size() > 1 && curve.averaging == Averaging::quenched) {
    const std::size_t n = curve.table.size();
    std::vector<std::vector<double>> draws(r.params.size());
    Rng rng(kBootstrapSeed);
    std::vector<double> m(curve.samples.size());
    for (int b = 0; b < opt.bootstrap_samples; ++b) {
      std::vector<CompensatedSum> acc(m.size());
      for (std::size_t t = 0; t < n; ++t) {
        const auto& row = curve.table[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n))];
        for (std::size_t k = 0; k < m.size(); ++k) acc[k].add(row[k]);
      }
      for (std::size_t k = 0; k < m.size(); ++k) m[k] = acc[k].value() / static_cast<double>(n);
      const FitReport rb = detail::fit_means(curve, m, model, opt);
      for (std::size_t k = 0; k < rb.params.size(); ++k) draws[k].push_back(rb.params[k]);
    }
    for (const auto& d : draws) r.bootstrap_sigma.push_back(sample_stddev(d));
  }
  return r;
}

/// rms(log fit) / rms(saturating fit); above 1 favours saturation.
inline double saturation_preference(const EntropyCurve& curve, const FitOptions& opt = {}) {
  const FitReport log = fit_log_scaling(curve, FitModel::log, opt);
  const FitReport sat = fit_log_scaling(curve, FitModel::saturating, opt);
  return sat.residual_rms > 0.0 ? log.residual_rms / sat.residual_rms : std::numeric_limits<double>::infinity();
}

}  // namespace qmon
