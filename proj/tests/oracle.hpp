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

// Brute-force reference constructions shared by the tests. Nothing here calls
// into the library's kernels.

#pragma once

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat pauli(char which) {
  Mat m(2, 2);
  switch (which) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m = Mat::Identity(2, 2);
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// sigma^which on `site` (site 0 = leftmost tensor factor) of an L-site chain.
inline Mat site_op(int L, int site, char which) {
  Mat out = Mat::Identity(1, 1);
  for (int s = 0; s < L; ++s) out = kron(out, s == site ? pauli(which) : pauli('I'));
  return out;
}

inline Mat tfim(int L, double J, double h, bool periodic) {
  const Eigen::Index d = Eigen::Index{1} << L;
  Mat H = Mat::Zero(d, d);
  for (int i = 0; i + 1 < L; ++i) H -= J * site_op(L, i, 'Z') * site_op(L, i + 1, 'Z');
  if (periodic) H -= J * site_op(L, L - 1, 'Z') * site_op(L, 0, 'Z');
  for (int i = 0; i < L; ++i) H -= h * site_op(L, i, 'X');
  return H;
}

inline Vec random_state(int L, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec v(Eigen::Index{1} << L);
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = cplx(n(rng), n(rng));
  return v.normalized();
}

/// Von Neumann entropy of the first `l` sites from an explicit partial trace
/// over the remaining L - l tensor factors.
inline double left_block_entropy(const Vec& psi, int L, int l) {
  const Eigen::Index da = Eigen::Index{1} << l, db = Eigen::Index{1} << (L - l);
  Mat rho = Mat::Zero(da, da);
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index a2 = 0; a2 < da; ++a2)
      for (Eigen::Index b = 0; b < db; ++b) rho(a, a2) += psi[a * db + b] * std::conj(psi[a2 * db + b]);
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  double s = 0.0;
  for (Eigen::Index k = 0; k < da; ++k) {
    const double p = es.eigenvalues()[k];
    if (p > 1e-15) s -= p * std::log(p);
  }
  return s;
}

}  // namespace oracle
