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

// Hilbert space, Pauli algebra and transverse-field Ising Hamiltonians on
// spin-1/2 chains.
//
// Basis convention: site 0 is the most significant bit of the computational
// index, and bit value 0 is the Z = +1 eigenstate. So for L = 3 the index 4
// (binary 100) is |1 0 0>, i.e. site 0 flipped.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qmon/core.hpp"

namespace qmon {

struct LatticeSpec {
  int sites = 2;
  Boundary boundary = Boundary::periodic;
  double coupling = 1.0;  // J
  double field = 1.0;     // h

  void validate() const {
    if (sites < 2) throw std::invalid_argument("LatticeSpec: need at least 2 sites");
    if (!(coupling > 0.0)) throw std::invalid_argument("LatticeSpec: coupling J must be positive");
    if (!std::isfinite(field)) throw std::invalid_argument("LatticeSpec: field must be finite");
    if (boundary == Boundary::periodic && sites < 3)
      throw std::invalid_argument("LatticeSpec: periodic chains need at least 3 sites");
  }

  /// Nearest-neighbour bonds (i, i+1), plus (L-1, 0) when periodic.
  std::vector<std::pair<int, int>> bonds() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i + 1 < sites; ++i) out.emplace_back(i, i + 1);
    if (boundary == Boundary::periodic) out.emplace_back(sites - 1, 0);
    return out;
  }
};

/// The critical chain used throughout: J = h = 1, periodic.
inline LatticeSpec critical_chain(int sites, Boundary b = Boundary::periodic) {
  return LatticeSpec{sites, b, 1.0, 1.0};
}

namespace kernels {

inline std::uint64_t site_mask(int sites, int site) {
  return std::uint64_t{1} << (sites - 1 - site);
}

inline std::uint64_t full_mask(int sites) {
  return (std::uint64_t{1} << sites) - 1;
}

/// psi <- sigma^axis_site psi
inline void apply_pauli(Vector& psi, int sites, int site, Axis axis) {
  const std::uint64_t m = site_mask(sites, site);
  const auto dim = static_cast<std::uint64_t>(psi.size());
  switch (axis) {
    case Axis::Z:
      for (std::uint64_t b = 0; b < dim; ++b)
        if (b & m) psi[b] = -psi[b];
      break;
    case Axis::X:
      for (std::uint64_t b = 0; b < dim; ++b)
        if (!(b & m)) std::swap(psi[b], psi[b | m]);
      break;
    case Axis::Y:
      // Y|0> = i|1>, Y|1> = -i|0>
      for (std::uint64_t b = 0; b < dim; ++b) {
        if (b & m) continue;
        const cplx a0 = psi[b];
        const cplx a1 = psi[b | m];
        psi[b] = -kI * a1;
        psi[b | m] = kI * a0;
      }
      break;
  }
}

/// <psi| sigma^axis_site |psi>, assuming a normalized psi.
inline double expect_pauli(const Vector& psi, int sites, int site, Axis axis) {
  const std::uint64_t m = site_mask(sites, site);
  const auto dim = static_cast<std::uint64_t>(psi.size());
  double acc = 0.0;
  switch (axis) {
    case Axis::Z:
      for (std::uint64_t b = 0; b < dim; ++b)
        acc += (b & m ? -1.0 : 1.0) * std::norm(psi[b]);
      break;
    case Axis::X:
      for (std::uint64_t b = 0; b < dim; ++b)
        if (!(b & m)) acc += 2.0 * (std::conj(psi[b]) * psi[b | m]).real();
      break;
    case Axis::Y:
      for (std::uint64_t b = 0; b < dim; ++b)
        if (!(b & m)) acc += 2.0 * (std::conj(psi[b]) * psi[b | m]).imag();
      break;
  }
  return acc;
}

/// <psi| sigma^axis_i sigma^axis_j |psi> for X or Z.
inline double expect_pauli_pair(const Vector& psi, int sites, int i, int j, Axis axis) {
  if (i == j) return 1.0;
  const std::uint64_t mi = site_mask(sites, i);
  const std::uint64_t mj = site_mask(sites, j);
  const auto dim = static_cast<std::uint64_t>(psi.size());
  double acc = 0.0;
  if (axis == Axis::Z) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      const bool odd = ((b & mi) != 0) != ((b & mj) != 0);
      acc += (odd ? -1.0 : 1.0) * std::norm(psi[b]);
    }
  } else if (axis == Axis::X) {
    const std::uint64_t m = mi | mj;
    for (std::uint64_t b = 0; b < dim; ++b) acc += (std::conj(psi[b]) * psi[b ^ m]).real();
  } else {
    throw std::invalid_argument("expect_pauli_pair: Y pairs are not supported");
  }
  return acc;
}

}  // namespace kernels

/// Complex operator on the 2^L-dimensional chain space, stored in sparse row
/// form. `hermitian()` is only set after a numerical check.
class OperatorMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-12;

  OperatorMatrix() = default;

  OperatorMatrix(int sites, SparseMatrix data, bool hermitian)
      : sites_(sites), data_(std::move(data)), hermitian_(hermitian) {
    const Eigen::Index dim = Eigen::Index{1} << sites_;
    if (data_.rows() != dim || data_.cols() != dim)
      throw std::invalid_argument("OperatorMatrix: matrix is not 2^L x 2^L");
    data_.makeCompressed();
    if (hermitian_ && hermiticity_defect() >= kHermitianTolerance)
      throw std::invalid_argument("OperatorMatrix: flagged Hermitian but A != A^dagger");
  }

  /// Builds the operator and sets the Hermitian flag from a numerical check.
  static OperatorMatrix checked(int sites, SparseMatrix data) {
    OperatorMatrix op(sites, std::move(data), false);
    op.hermitian_ = op.hermiticity_defect() < kHermitianTolerance;
    return op;
  }

  static OperatorMatrix identity(int sites) {
    const Eigen::Index dim = Eigen::Index{1} << sites;
    SparseMatrix id(dim, dim);
    id.setIdentity();
    return OperatorMatrix(sites, std::move(id), true);
  }

  int sites() const { return sites_; }
  Eigen::Index dimension() const { return data_.rows(); }
  bool hermitian() const { return hermitian_; }
  const SparseMatrix& sparse() const { return data_; }

  Matrix dense(const BackendLimits& limits = kDefaultLimits) const {
    if (sites_ > limits.dense_sites)
      throw CapacityError("dense operator requested for L=" + std::to_string(sites_) +
                          " but the dense backend limit is L=" +
                          std::to_string(limits.dense_sites));
    return Matrix(data_);
  }

  Vector apply(const Vector& v) const {
    if (v.size() != dimension()) throw std::invalid_argument("OperatorMatrix::apply: dimension mismatch");
    return data_ * v;
  }

  double hermiticity_defect() const {
    SparseMatrix diff = data_ - SparseMatrix(data_.adjoint());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
  }

  /// Max absolute row sum; an upper bound on the spectral norm for Hermitian
  /// operators.
  double norm_bound() const {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < data_.outerSize(); ++k) {
      double row = 0.0;
      for (SparseMatrix::InnerIterator it(data_, k); it; ++it) row += std::abs(it.value());
      worst = std::max(worst, row);
    }
    return worst;
  }

  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    check_same(a, b);
    return checked(a.sites_, SparseMatrix(a.data_ * b.data_));
  }
  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    check_same(a, b);
    return checked(a.sites_, SparseMatrix(a.data_ + b.data_));
  }
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    check_same(a, b);
    return checked(a.sites_, SparseMatrix(a.data_ - b.data_));
  }
  friend OperatorMatrix operator*(cplx s, const OperatorMatrix& a) {
    return checked(a.sites_, SparseMatrix(s * a.data_));
  }

 private:
  static void check_same(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.sites_ != b.sites_) throw std::invalid_argument("OperatorMatrix: dimension mismatch");
  }

  int sites_ = 0;
  SparseMatrix data_;
  bool hermitian_ = false;
};

inline void check_sites(int sites, const BackendLimits& limits = kDefaultLimits) {
  if (sites < 1) throw std::invalid_argument("chain needs at least one site");
  if (sites > limits.max_sites)
    throw CapacityError("L=" + std::to_string(sites) + " exceeds the state-vector backend limit L=" +
                        std::to_string(limits.max_sites));
}

inline OperatorMatrix pauli_operator(int site, Axis axis, int sites) {
  check_sites(sites);
  if (site < 0 || site >= sites)
    throw std::out_of_range("pauli_operator: site " + std::to_string(site) + " outside [0, " +
                            std::to_string(sites) + ")");
  const std::uint64_t dim = std::uint64_t{1} << sites;
  const std::uint64_t m = kernels::site_mask(sites, site);
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(dim);
  for (std::uint64_t b = 0; b < dim; ++b) {
    const bool up = (b & m) == 0;
    switch (axis) {
      case Axis::Z: t.emplace_back(b, b, up ? 1.0 : -1.0); break;
      case Axis::X: t.emplace_back(b ^ m, b, 1.0); break;
      case Axis::Y: t.emplace_back(b ^ m, b, up ? kI : -kI); break;
    }
  }
  SparseMatrix s(dim, dim);
  s.setFromTriplets(t.begin(), t.end());
  return OperatorMatrix(sites, std::move(s), true);
}

/// The Z2 generator prod_i X_i.
inline OperatorMatrix parity_operator(int sites) {
  check_sites(sites);
  const std::uint64_t dim = std::uint64_t{1} << sites;
  const std::uint64_t all = kernels::full_mask(sites);
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(dim);
  for (std::uint64_t b = 0; b < dim; ++b) t.emplace_back(b ^ all, b, 1.0);
  SparseMatrix s(dim, dim);
  s.setFromTriplets(t.begin(), t.end());
  return OperatorMatrix(sites, std::move(s), true);
}

/// H = -J sum_<ij> Z_i Z_j - h sum_i X_i.
inline OperatorMatrix build_tfim_hamiltonian(const LatticeSpec& spec,
                                             const BackendLimits& limits = kDefaultLimits) {
  spec.validate();
  check_sites(spec.sites, limits);
  const int L = spec.sites;
  const std::uint64_t dim = std::uint64_t{1} << L;
  const auto bonds = spec.bonds();
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(dim * (L + 1));
  for (std::uint64_t b = 0; b < dim; ++b) {
    double diag = 0.0;
    for (auto [i, j] : bonds) {
      const bool si = (b & kernels::site_mask(L, i)) != 0;
      const bool sj = (b & kernels::site_mask(L, j)) != 0;
      diag -= spec.coupling * (si == sj ? 1.0 : -1.0);
    }
    t.emplace_back(b, b, diag);
    if (spec.field != 0.0)
      for (int i = 0; i < L; ++i) t.emplace_back(b ^ kernels::site_mask(L, i), b, -spec.field);
  }
  SparseMatrix s(dim, dim);
  s.setFromTriplets(t.begin(), t.end());
  return OperatorMatrix(L, std::move(s), true);
}

/// Normalized amplitude vector on 2^L states.
class PureState {
 public:
  static constexpr double kNormTolerance = 1e-10;

  PureState() = default;

  PureState(int sites, Vector amplitudes) : sites_(sites), amp_(std::move(amplitudes)) {
    if (amp_.size() != (Eigen::Index{1} << sites_))
      throw std::invalid_argument("PureState: amplitude vector is not of length 2^L");
    if (norm_defect() >= kNormTolerance)
      throw std::invalid_argument("PureState: amplitudes not normalized (|norm-1| = " +
                                  std::to_string(norm_defect()) + ")");
  }

  static PureState normalized(int sites, Vector v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("PureState: cannot normalize a zero vector");
    v /= n;
    return PureState(sites, std::move(v));
  }

  static PureState basis(int sites, std::uint64_t index) {
    check_sites(sites);
    Vector v = Vector::Zero(Eigen::Index{1} << sites);
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return PureState(sites, std::move(v));
  }

  /// Product of single-site eigenstates of sigma^axis with eigenvalue `sign`.
  static PureState product(int sites, Axis axis, int sign = +1) {
    check_sites(sites);
    cplx a0, a1;  // single-site amplitudes on |0>, |1>
    const double r = 1.0 / std::sqrt(2.0);
    switch (axis) {
      case Axis::Z: a0 = sign > 0 ? 1.0 : 0.0; a1 = sign > 0 ? 0.0 : 1.0; break;
      case Axis::X: a0 = r; a1 = sign > 0 ? r : -r; break;
      case Axis::Y: a0 = r; a1 = sign > 0 ? kI * r : -kI * r; break;
    }
    const Eigen::Index dim = Eigen::Index{1} << sites;
    Vector v(dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
      cplx amp = 1.0;
      for (int s = 0; s < sites; ++s) amp *= (b & kernels::site_mask(sites, s)) ? a1 : a0;
      v[b] = amp;
    }
    return normalized(sites, std::move(v));
  }

  int sites() const { return sites_; }
  Eigen::Index dimension() const { return amp_.size(); }
  const Vector& amplitudes() const { return amp_; }
  double norm_defect() const { return std::abs(amp_.norm() - 1.0); }

 private:
  int sites_ = 0;
  Vector amp_;
};

/// Defects of the three density-operator conditions: unit trace, Hermiticity,
/// non-negativity.
struct DensityDefects {
  double trace = 0.0;
  double hermiticity = 0.0;
  double min_eigenvalue = 0.0;
  bool spectrum_checked = false;
};

/// Largest matrix dimension for which the full spectrum is computed when
/// checking positivity.
inline constexpr Eigen::Index kFullSpectrumDimension = 256;

inline double hermiticity_defect(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

inline double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Trace-one Hermitian positive semidefinite matrix.
class DensityOperator {
 public:
  static constexpr double kTraceTolerance = 1e-9;
  static constexpr double kHermitianTolerance = 1e-10;
  static constexpr double kPositivityTolerance = -1e-9;

  DensityOperator() = default;

  DensityOperator(int sites, Matrix rho) : sites_(sites), rho_(std::move(rho)) {
    const Eigen::Index dim = Eigen::Index{1} << sites_;
    if (rho_.rows() != dim || rho_.cols() != dim)
      throw std::invalid_argument("DensityOperator: matrix is not 2^L x 2^L");
    const DensityDefects d = defects();
    if (d.trace >= kTraceTolerance)
      throw std::invalid_argument("DensityOperator: |tr rho - 1| = " + std::to_string(d.trace));
    if (d.hermiticity >= kHermitianTolerance)
      throw std::invalid_argument("DensityOperator: not Hermitian (defect " + std::to_string(d.hermiticity) + ")");
    if (d.spectrum_checked && d.min_eigenvalue < kPositivityTolerance)
      throw std::invalid_argument("DensityOperator: negative eigenvalue " + std::to_string(d.min_eigenvalue));
  }

  static DensityOperator from_pure(const PureState& psi) {
    const Vector& a = psi.amplitudes();
    return DensityOperator(psi.sites(), a * a.adjoint());
  }

  int sites() const { return sites_; }
  Eigen::Index dimension() const { return rho_.rows(); }
  const Matrix& matrix() const { return rho_; }

  DensityDefects defects() const {
    DensityDefects d;
    d.trace = std::abs(rho_.trace() - 1.0);
    d.hermiticity = hermiticity_defect(rho_);
    if (rho_.rows() <= kFullSpectrumDimension) {
      d.min_eigenvalue = min_eigenvalue(rho_);
      d.spectrum_checked = true;
    }
    return d;
  }

  double purity() const { return (rho_ * rho_).trace().real(); }

 private:
  int sites_ = 0;
  Matrix rho_;
};

inline cplx expectation(const PureState& psi, const OperatorMatrix& op) {
  if (psi.dimension() != op.dimension()) throw std::invalid_argument("expectation: dimension mismatch");
  return psi.amplitudes().dot(op.apply(psi.amplitudes()));
}

/// tr(rho op)
inline cplx expectation(const DensityOperator& rho, const OperatorMatrix& op) {
  if (rho.dimension() != op.dimension()) throw std::invalid_argument("expectation: dimension mismatch");
  const Matrix& r = rho.matrix();
  const SparseMatrix& s = op.sparse();
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < s.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(s, i); it; ++it) acc += it.value() * r(it.col(), it.row());
  return acc;
}

/// Lowest eigenpair from restarted Lanczos with full reorthogonalization.
/// `project` maps a vector into the invariant subspace of interest.
struct Eigenpair {
  double energy = 0.0;
  Vector vector;
  double residual = 0.0;
};

struct LanczosOptions {
  int krylov = 80;
  double tolerance = 1e-11;
  int max_restarts = 400;
};

template <class Apply, class Project>
Eigenpair lanczos_lowest(Apply&& apply, Project&& project, Vector start, const LanczosOptions& opt = {}) {
  project(start);
  double n0 = start.norm();
  if (!(n0 > 0.0)) throw NumericalError("lanczos: start vector vanishes in the target subspace");
  start /= n0;
  const Eigen::Index dim = start.size();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(opt.krylov, dim));
  Eigenpair best;
  for (int restart = 0; restart < opt.max_restarts; ++restart) {
    std::vector<Vector> basis;
    basis.reserve(m_max);
    std::vector<double> alpha, beta;
    basis.push_back(start);
    bool invariant = false;
    for (int j = 0; j < m_max; ++j) {
      Vector w = apply(basis[j]);
      project(w);
      alpha.push_back(basis[j].dot(w).real());
      for (int pass = 0; pass < 2; ++pass)
        for (const Vector& v : basis) w -= v.dot(w) * v;
      const double b = w.norm();
      if (b < 1e-13 * (1.0 + std::abs(alpha.back()))) {
        invariant = true;
        beta.push_back(0.0);
        break;
      }
      beta.push_back(b);
      if (j + 1 < m_max) basis.push_back(w / b);
    }
    const int m = static_cast<int>(alpha.size());
    RealMatrix T = RealMatrix::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(T);
    const RealVector s = es.eigenvectors().col(0);
    Vector y = Vector::Zero(dim);
    for (int j = 0; j < m; ++j) y += s[j] * basis[j];
    project(y);
    y.normalize();
    best.energy = es.eigenvalues()[0];
    best.residual = invariant ? 0.0 : std::abs(beta[m - 1] * s[m - 1]);
    best.vector = y;
    if (invariant || best.residual < opt.tolerance) {
      // Refine the estimate with the Rayleigh quotient of the final vector.
      Vector hy = apply(y);
      best.energy = y.dot(hy).real();
      best.residual = (hy - best.energy * y).norm();
      if (best.residual < std::max(opt.tolerance, 1e-9)) return best;
    }
    start = y;
  }
  throw NumericalError("lanczos: no convergence (residual " + std::to_string(best.residual) + ")");
}

namespace detail {

inline Vector deterministic_start(Eigen::Index dim) {
  std::mt19937_64 gen(0x5eed5eedULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = cplx(u(gen), 0.25 * u(gen));
  return v;
}

inline void canonical_phase(Vector& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const cplx a = v[k];
  if (std::abs(a) > 0.0) v *= std::conj(a) / std::abs(a);
}

inline bool commutes_with_parity(const OperatorMatrix& H) {
  const OperatorMatrix P = parity_operator(H.sites());
  SparseMatrix c = H.sparse() * P.sparse() - P.sparse() * H.sparse();
  for (Eigen::Index k = 0; k < c.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(c, k); it; ++it)
      if (std::abs(it.value()) > 1e-12) return false;
  return true;
}

}  // namespace detail

/// Ground state plus its energy and Z2 parity sector (+1 even, -1 odd).
struct GroundState {
  PureState state;
  double energy = 0.0;
  int parity = +1;
};

/// Energies closer than this are treated as degenerate; the even-parity state
/// wins the tie.
inline constexpr double kDegeneracyTolerance = 1e-10;

inline GroundState find_ground_state(const OperatorMatrix& H, const LanczosOptions& opt = {}) {
  if (!H.hermitian()) throw std::invalid_argument("ground_state: Hamiltonian is not Hermitian");
  const int L = H.sites();
  const Eigen::Index dim = H.dimension();
  auto apply = [&](const Vector& v) -> Vector { return H.sparse() * v; };
  Vector start = detail::deterministic_start(dim);

  if (!detail::commutes_with_parity(H)) {
    Eigenpair e = lanczos_lowest(apply, [](Vector&) {}, start, opt);
    detail::canonical_phase(e.vector);
    return {PureState::normalized(L, e.vector), e.energy, 0};
  }
  const std::uint64_t all = kernels::full_mask(L);
  auto sector = [all](int sign) {
    return [all, sign](Vector& v) {
      for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(v.size()); ++b) {
        const std::uint64_t p = b ^ all;
        if (p < b) continue;
        const cplx a = 0.5 * (v[b] + double(sign) * v[p]);
        v[b] = a;
        v[p] = double(sign) * a;
      }
    };
  };
  Eigenpair even = lanczos_lowest(apply, sector(+1), start, opt);
  Eigenpair odd = lanczos_lowest(apply, sector(-1), start, opt);
  const bool take_odd = odd.energy < even.energy - kDegeneracyTolerance;
  Eigenpair& pick = take_odd ? odd : even;
  detail::canonical_phase(pick.vector);
  return {PureState::normalized(L, pick.vector), pick.energy, take_odd ? -1 : +1};
}

inline PureState ground_state(const OperatorMatrix& H) { return find_ground_state(H).state; }

/// exp(-i H t) applied by a Taylor series that is summed until the next term
/// drops below machine precision, with sub-steps so that ||H t|| <= 1.
class Propagator {
 public:
  Propagator() = default;
  Propagator(const OperatorMatrix& H, double t) : H_(H.sparse()), t_(t) {
    const double bound = H.norm_bound() * std::abs(t);
    substeps_ = std::max(1, static_cast<int>(std::ceil(bound)));
    tau_ = t / substeps_;
  }

  void apply(Vector& psi) const {
    if (H_.rows() == 0 || t_ == 0.0) return;
    Vector term(psi.size()), acc(psi.size());
    for (int s = 0; s < substeps_; ++s) {
      term = psi;
      acc = psi;
      for (int k = 1; k < 60; ++k) {
        term = (H_ * term) * (-kI * tau_ / double(k));
        acc += term;
        if (term.norm() < 1e-17 * acc.norm()) break;
      }
      psi.swap(acc);
    }
  }

  double time() const { return t_; }

 private:
  SparseMatrix H_;
  double t_ = 0.0;
  double tau_ = 0.0;
  int substeps_ = 1;
};

}  // namespace qmon
