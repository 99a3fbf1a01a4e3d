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

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qmon {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr cplx kI{0.0, 1.0};

/// Raised when a numerical contract (positivity, convergence, norm
/// conservation) is broken at runtime.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a requested system does not fit the configured backend.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

enum class Axis { X, Y, Z };
enum class Boundary { periodic, open };

inline std::string to_string(Axis a) {
  switch (a) {
    case Axis::X: return "X";
    case Axis::Y: return "Y";
    case Axis::Z: return "Z";
  }
  return "?";
}

inline std::string to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "open";
}

inline Axis parse_axis(std::string_view s) {
  if (s == "X" || s == "x") return Axis::X;
  if (s == "Y" || s == "y") return Axis::Y;
  if (s == "Z" || s == "z") return Axis::Z;
  throw std::invalid_argument("unknown axis '" + std::string(s) + "'");
}

inline Boundary parse_boundary(std::string_view s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "open") return Boundary::open;
  throw std::invalid_argument("unknown boundary '" + std::string(s) + "'");
}

/// Limits of the state-vector backend. Operators are always stored in sparse
/// row form; dense materialization (full diagonalization, Lindblad
/// integration) is only allowed up to `dense_sites`.
struct BackendLimits {
  int dense_sites = 14;
  int max_sites = 24;
};

inline constexpr BackendLimits kDefaultLimits{};

}  // namespace qmon
