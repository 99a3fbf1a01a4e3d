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


// One-loop replica flow of the measurement couplings (gamma1 complex,
// gamma2 real) and of the decoherence couplings (gamma1, gamma2, gamma3).
// Flows run toward the infrared, i.e. towards decreasing ln(mu).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "qmon/core.hpp"
#include "qmon/io.hpp"

namespace qmon {

enum class FlowMode { measurement, decoherence };

inline std::string to_string(FlowMode m) { return m == FlowMode::measurement ? "measurement" : "decoherence"; }

inline FlowMode parse_flow_mode(std::string_view s) {
  if (s == "measurement") return FlowMode::measurement;
  if (s == "decoherence") return FlowMode::decoherence;
  throw std::invalid_argument("unknown flow mode '" + std::string(s) + "'");
}

struct CouplingVector {
  cplx gamma1{0.0, 0.0};
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double n = 1.0;
  FlowMode mode = FlowMode::measurement;

  void validate() const {
    if (!(n > 0.0)) throw std::invalid_argument("CouplingVector: replica number n must be positive");
    if (!(gamma2 >= 0.0) || !(gamma3 >= 0.0))
      throw std::invalid_argument("CouplingVector: gamma2 and gamma3 must start non-negative");
    if (mode == FlowMode::measurement && gamma3 != 0.0)
      throw std::invalid_argument("CouplingVector: gamma3 is only defined for decoherence flows");
  }

  bool finite() const {
    return std::isfinite(gamma1.real()) && std::isfinite(gamma1.imag()) && std::isfinite(gamma2) &&
           std::isfinite(gamma3);
  }

  double magnitude() const { return std::max({std::abs(gamma1), std::abs(gamma2), std::abs(gamma3)}); }

  /// The slow coupling that sets the gamma1 fixed point.
  double slow() const { return mode == FlowMode::measurement ? gamma2 : gamma3; }
};

/// d gamma / d ln(mu). d2 and d3 stay complex; only their real parts move gamma2, gamma3.
struct CouplingDerivative {
  cplx d1, d2, d3;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline CouplingDerivative beta_measurement(const CouplingVector& c) {
  if (c.mode != FlowMode::measurement) throw std::invalid_argument("beta_measurement: wrong mode");
  const double n = c.n;
  const cplx g1 = c.gamma1, g2 = c.gamma2;
  CouplingDerivative d;
  d.d1 = -(4.0 * (n - 2.0) * kI / kTwoPi) * g1 * g1 + (n * kI / kTwoPi) * g2 * g2;
  d.d2 = (4.0 * (n - 1.0) * kI / kTwoPi) * std::conj(g1) * g2 - (4.0 * (n - 1.0) * kI / kTwoPi) * g1 * g2;
  d.d3 = 0.0;
  return d;
}

inline CouplingDerivative beta_decoherence(const CouplingVector& c) {
  if (c.mode != FlowMode::decoherence) throw std::invalid_argument("beta_decoherence: wrong mode");
  const double n = c.n;
  const cplx g1 = c.gamma1, g2 = c.gamma2, g3 = c.gamma3;
  const cplx g1c = std::conj(g1);
  CouplingDerivative d;
  d.d1 = -(4.0 * (n - 2.0) * kI / kTwoPi) * g1 * g1 + ((n - 2.0) * kI / kTwoPi) * g2 * g2 +
         (2.0 * kI / kTwoPi) * g2 * g3;
  d.d2 = (4.0 * (n - 2.0) * kI / kTwoPi) * g1c * g2 - (4.0 * (n - 2.0) * kI / kTwoPi) * g1 * g2 +
         (4.0 * kI / kTwoPi) * g1c * g3 - (4.0 * kI / kTwoPi) * g1 * g3;
  d.d3 = (4.0 * (n - 1.0) * kI / kTwoPi) * g1c * g2 - (4.0 * (n - 1.0) * kI / kTwoPi) * g1 * g2;
  return d;
}

inline CouplingDerivative beta(const CouplingVector& c) {
  return c.mode == FlowMode::measurement ? beta_measurement(c) : beta_decoherence(c);
}

/// -4(n-1)/(2 pi) g^2, the drift of the slow coupling on the gamma1 fixed line.
inline double slow_drift_prediction(double n, double g) { return -4.0 * (n - 1.0) / kTwoPi * g * g; }

struct FlowPoint {
  double ln_mu = 0.0;
  CouplingVector c;
};

struct FlowTrace {
  std::vector<FlowPoint> points;
  bool diverged = false;
  double ln_mu_divergence = 0.0;
  static constexpr const char* kDirection = "infrared (decreasing ln mu)";

  void validate() const {
    for (std::size_t k = 1; k < points.size(); ++k)
      if (!(points[k].ln_mu < points[k - 1].ln_mu)) throw std::logic_error("FlowTrace: ln mu not strictly decreasing");
    for (const auto& p : points)
      if (!p.c.finite()) throw std::logic_error("FlowTrace: non-finite coupling");
  }

  std::string to_csv() const {
    const bool three = !points.empty() && points.front().c.mode == FlowMode::decoherence;
    std::string out = three ? "ln_mu,re_gamma1,im_gamma1,gamma2,gamma3\n" : "ln_mu,re_gamma1,im_gamma1,gamma2\n";
    for (const auto& p : points) {
      out += fmt(p.ln_mu) + ',' + fmt(p.c.gamma1.real()) + ',' + fmt(p.c.gamma1.imag()) + ',' + fmt(p.c.gamma2);
      if (three) out += ',' + fmt(p.c.gamma3);
      out += '\n';
    }
    return out;
  }
};

struct FlowOptions {
  double max_change = 0.1;    // per accepted step
  double divergence = 1e3;    // |gamma| beyond which the flow is cut
  double min_step = 1e-12;
};

namespace detail {

inline CouplingVector advance(const CouplingVector& c, const CouplingDerivative& d, double s) {
  CouplingVector o = c;
  o.gamma1 += s * d.d1;
  o.gamma2 += s * d.d2.real();
  o.gamma3 += s * d.d3.real();
  return o;
}

/// One RK4 step of size h in ln(mu) (h < 0 flows to the infrared).
inline CouplingVector rk4(const CouplingVector& c, double h) {
  const auto k1 = beta(c);
  const auto k2 = beta(advance(c, k1, h / 2));
  const auto k3 = beta(advance(c, k2, h / 2));
  const auto k4 = beta(advance(c, k3, h));
  CouplingDerivative m;
  m.d1 = (k1.d1 + 2.0 * k2.d1 + 2.0 * k3.d1 + k4.d1) / 6.0;
  m.d2 = (k1.d2 + 2.0 * k2.d2 + 2.0 * k3.d2 + k4.d2) / 6.0;
  m.d3 = (k1.d3 + 2.0 * k2.d3 + 2.0 * k3.d3 + k4.d3) / 6.0;
  return advance(c, m, h);
}

inline double change(const CouplingVector& a, const CouplingVector& b) {
  return std::max({std::abs(a.gamma1 - b.gamma1), std::abs(a.gamma2 - b.gamma2), std::abs(a.gamma3 - b.gamma3)});
}

}  // namespace detail

/// Fourth-order flow from ln(mu) = 0 down to -span in nominal steps of
/// `step`, halving any step whose coupling change exceeds max_change.
inline FlowTrace integrate_flow(const CouplingVector& c0, double span, double step, const FlowOptions& opt = {}) {
  c0.validate();
  if (!(step > 0.0)) throw std::invalid_argument("integrate_flow: step must be positive");
  if (!(span >= 0.0)) throw std::invalid_argument("integrate_flow: span must be non-negative");
  FlowTrace tr;
  tr.points.push_back({0.0, c0});
  CouplingVector c = c0;
  double s = 0.0;  // distance travelled toward the IR
  while (s < span - 1e-12) {
    double h = std::min(step, span - s);
    CouplingVector next = detail::rk4(c, -h);
    while (detail::change(c, next) > opt.max_change || !next.finite()) {
      h /= 2;
      if (h < opt.min_step) throw NumericalError("integrate_flow: step underflow at ln mu = " + std::to_string(-s));
      next = detail::rk4(c, -h);
    }
    s += h;
    c = next;
    tr.points.push_back({-s, c});
    if (c.magnitude() > opt.divergence) {
      tr.diverged = true;
      tr.ln_mu_divergence = -s;
      break;
    }
  }
  tr.validate();
  return tr;
}

struct FixedPoint {
  cplx gamma1;
  cplx eigenvalue;  // d(delta)/d ln(mu) = eigenvalue * delta
  bool attracting = false;  // toward the infrared
  double residual = 0.0;
  int iterations = 0;
};

/// Root of d gamma1 / d ln(mu) with the slow couplings frozen, by damped
/// complex Newton iteration from c0.gamma1.
inline FixedPoint find_fixed_point(const CouplingVector& c0, int max_iterations = 200) {
  c0.validate();
  auto f = [&](cplx g) {
    CouplingVector c = c0;
    c.gamma1 = g;
    return beta(c).d1;
  };
  // both beta functions are -4(n-2) i/(2 pi) g^2 + const in gamma1
  auto fprime = [&](cplx g) { return -2.0 * 4.0 * (c0.n - 2.0) * kI / kTwoPi * g; };
  FixedPoint fp;
  cplx g = c0.gamma1;
  double r = std::abs(f(g));
  for (int it = 0; it < max_iterations && r > 1e-13; ++it) {
    const cplx dp = fprime(g);
    if (std::abs(dp) < 1e-300) throw NumericalError("find_fixed_point: vanishing derivative; move the starting point");
    const cplx delta = -f(g) / dp;
    double lambda = 1.0;
    cplx trial = g + delta;
    while (std::abs(f(trial)) > (1.0 - 1e-4 * lambda) * r && lambda > 1e-8) {
      lambda /= 2;
      trial = g + lambda * delta;
    }
    g = trial;
    r = std::abs(f(g));
    fp.iterations = it + 1;
  }
  fp.gamma1 = g;
  fp.residual = r;
  if (!(r < 1e-10)) throw NumericalError("find_fixed_point: Newton did not converge (|beta| = " + std::to_string(r) + ")");
  fp.eigenvalue = fprime(g);
  fp.attracting = fp.eigenvalue.real() > 0.0;
  return fp;
}

struct DriftReport {
  bool converged = false;
  double ln_mu_converged = 0.0;     // first point after which the fixed line holds
  double max_fixed_line_distance = 0.0;
  double max_drift_error = 0.0;     // relative, measured vs -4(n-1)/(2 pi) g^2
  double max_ratio_error = 0.0;     // decoherence only: |gamma2/gamma3 - 1|
  std::size_t samples = 0;

  json to_json() const {
    return json{{"converged", converged},
                {"ln_mu_converged", ln_mu_converged},
                {"max_fixed_line_distance", max_fixed_line_distance},
                {"max_drift_error", max_drift_error},
                {"max_ratio_error", max_ratio_error},
                {"samples", samples}};
  }
};

/// Checks |gamma1 + i g/2| < tolerance from some point on (g the slow
/// coupling) and compares the finite-difference slope of g with the
/// predicted drift over the remaining trace.
inline DriftReport analyze_slow_drift(const FlowTrace& tr, double tolerance = 1e-3) {
  DriftReport r;
  const auto& p = tr.points;
  auto distance = [](const CouplingVector& c) { return std::abs(c.gamma1 + kI * c.slow() / 2.0); };
  std::size_t first = p.size();
  for (std::size_t k = p.size(); k-- > 0;) {
    if (distance(p[k].c) >= tolerance) break;
    first = k;
  }
  if (first + 1 >= p.size()) return r;
  r.converged = true;
  r.ln_mu_converged = p[first].ln_mu;
  for (std::size_t k = first; k < p.size(); ++k) {
    r.max_fixed_line_distance = std::max(r.max_fixed_line_distance, distance(p[k].c));
    if (p[k].c.mode == FlowMode::decoherence)
      r.max_ratio_error = std::max(r.max_ratio_error, std::abs(p[k].c.gamma2 / p[k].c.gamma3 - 1.0));
    if (k + 1 < p.size()) {
      const double dl = p[k + 1].ln_mu - p[k].ln_mu;
      const double measured = (p[k + 1].c.slow() - p[k].c.slow()) / dl;
      const double mid = 0.5 * (p[k + 1].c.slow() + p[k].c.slow());
      const double predicted = slow_drift_prediction(p[k].c.n, mid);
      if (predicted != 0.0) r.max_drift_error = std::max(r.max_drift_error, std::abs(measured / predicted - 1.0));
      ++r.samples;
    }
  }
  return r;
}

/// Flows from a grid of initial conditions; one CSV per flow plus index.json.
inline std::vector<FlowTrace> flow_portrait(const std::vector<CouplingVector>& starts, double span, double step,
                                            const std::filesystem::path& dir = {}) {
  std::vector<FlowTrace> out;
  json index = json::array();
  for (std::size_t k = 0; k < starts.size(); ++k) {
    out.push_back(integrate_flow(starts[k], span, step));
    if (!dir.empty()) {
      const std::string name = "flow_" + std::to_string(k) + ".csv";
      write_file(dir / name, out.back().to_csv());
      const auto& c = starts[k];
      index.push_back({{"file", name},
                       {"mode", to_string(c.mode)},
                       {"n", c.n},
                       {"gamma1", {c.gamma1.real(), c.gamma1.imag()}},
                       {"gamma2", c.gamma2},
                       {"gamma3", c.gamma3},
                       {"diverged", out.back().diverged},
                       {"ln_mu_divergence", out.back().ln_mu_divergence}});
    }
  }
  if (!dir.empty()) write_file(dir / "index.json", index.dump(2) + "\n");
  return out;
}

}  // namespace qmon
