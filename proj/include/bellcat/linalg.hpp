#pragma once

// Dense complex kernel shared by every other module. Everything is a free
// function templated on the real scalar so float / long double builds work
// through the same code path; double is the default everywhere.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "bellcat/error.hpp"

namespace bellcat {

template <typename Real = double>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real = double>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real = double>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;

template <typename Real>
inline constexpr Real kDefaultRankTol = Real(1e-10);

template <typename Real = double>
CMatrix<Real> identity(Eigen::Index n) {
  return CMatrix<Real>::Identity(n, n);
}

template <typename Real = double>
CMatrix<Real> pauli_x() {
  CMatrix<Real> m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

template <typename Real = double>
CMatrix<Real> pauli_y() {
  using C = std::complex<Real>;
  CMatrix<Real> m(2, 2);
  m << C(0), C(0, -1), C(0, 1), C(0);
  return m;
}

template <typename Real = double>
CMatrix<Real> pauli_z() {
  CMatrix<Real> m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Largest singular value.
template <typename Real>
Real op_norm(const CMatrix<Real>& m) {
  if (m.size() == 0) return Real(0);
  Eigen::BDCSVD<CMatrix<Real>> svd(m);
  return svd.singularValues()(0);
}

template <typename Real>
bool is_finite(const CMatrix<Real>& m) {
  return m.allFinite();
}

template <typename Real>
bool is_square(const CMatrix<Real>& m) {
  return m.rows() == m.cols();
}

template <typename Real>
bool is_hermitian(const CMatrix<Real>& m, Real tol) {
  return is_square(m) && op_norm<Real>(m - m.adjoint()) <= tol;
}

template <typename Real>
bool is_unitary(const CMatrix<Real>& m, Real tol) {
  return is_square(m) &&
         op_norm<Real>(m.adjoint() * m - CMatrix<Real>::Identity(m.rows(), m.rows())) <= tol;
}

template <typename Real>
bool is_projection(const CMatrix<Real>& m, Real tol) {
  return is_square(m) && op_norm<Real>(m * m - m) + op_norm<Real>(m - m.adjoint()) <= tol;
}

template <typename Real>
CMatrix<Real> commutator(const CMatrix<Real>& a, const CMatrix<Real>& b) {
  return a * b - b * a;
}

template <typename Real>
struct HermitianEigen {
  RVector<Real> values;   // ascending
  CMatrix<Real> vectors;  // columns, unitary
};

template <typename Real>
HermitianEigen<Real> herm_eig(const CMatrix<Real>& m, Real tol = Real(1e-10)) {
  if (!is_finite(m)) throw Error(ErrorCode::NonFinite, "herm_eig: non-finite entries");
  if (!is_hermitian(m, tol)) throw Error(ErrorCode::NotHermitian, "herm_eig: matrix is not Hermitian");
  const CMatrix<Real> h = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(h);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Applies a real function to the spectrum of a Hermitian matrix.
template <typename Real, typename Fn>
CMatrix<Real> herm_apply(const CMatrix<Real>& m, Fn&& fn, Real tol = Real(1e-10)) {
  const auto eig = herm_eig(m, tol);
  RVector<Real> mapped = eig.values.unaryExpr(fn);
  return eig.vectors * mapped.template cast<std::complex<Real>>().asDiagonal() * eig.vectors.adjoint();
}

/// Operator sign with sign(0) := +1.
template <typename Real>
CMatrix<Real> operator_sign(const CMatrix<Real>& m, Real tol = Real(1e-10)) {
  return herm_apply(m, [](Real x) { return x >= Real(0) ? Real(1) : Real(-1); }, tol);
}

/// Square root of a positive semidefinite matrix; eigenvalues below zero
/// (rounding) are clamped.
template <typename Real>
CMatrix<Real> psd_sqrt(const CMatrix<Real>& m, Real tol = Real(1e-10)) {
  return herm_apply(m, [](Real x) { return std::sqrt(std::max(x, Real(0))); }, tol);
}

template <typename Real>
struct PolarDecomposition {
  CMatrix<Real> isometry;  // V, partial isometry
  CMatrix<Real> modulus;   // |T| = (T*T)^{1/2}
  Eigen::Index rank = 0;
};

/// T = V |T| with V assembled from the singular pairs above
/// rank_tol * sigma_max. Throws ZeroOperator when sigma_max <= rank_tol.
template <typename Real>
PolarDecomposition<Real> polar_partial_isometry(const CMatrix<Real>& t,
                                                Real rank_tol = kDefaultRankTol<Real>) {
  if (!is_finite(t)) throw Error(ErrorCode::NonFinite, "polar: non-finite entries");
  if (!is_square(t)) throw Error(ErrorCode::DimensionMismatch, "polar: matrix is not square");
  Eigen::JacobiSVD<CMatrix<Real>> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector<Real>& sigma = svd.singularValues();
  const Real sigma_max = sigma.size() ? sigma(0) : Real(0);
  if (sigma_max <= rank_tol) throw Error(ErrorCode::ZeroOperator, "polar: operator vanishes");

  const Eigen::Index n = t.rows();
  PolarDecomposition<Real> out;
  out.isometry = CMatrix<Real>::Zero(n, n);
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) <= rank_tol * sigma_max) break;  // sorted descending
    out.isometry += svd.matrixU().col(i) * svd.matrixV().col(i).adjoint();
    ++out.rank;
  }
  const CMatrix<Real>& w = svd.matrixV();
  out.modulus = w * sigma.template cast<std::complex<Real>>().asDiagonal() * w.adjoint();
  return out;
}

template <typename Real>
CMatrix<Real> tensor(const CMatrix<Real>& a, const CMatrix<Real>& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

/// The tensor factor that is traced out.
enum class Subsystem { A, B };

template <typename Real>
CMatrix<Real> partial_trace(const CMatrix<Real>& m, Eigen::Index dim_a, Eigen::Index dim_b,
                            Subsystem traced) {
  if (dim_a < 1 || dim_b < 1 || m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b) {
    throw Error(ErrorCode::DimensionMismatch,
                "partial_trace: matrix of dim " + std::to_string(m.rows()) + " is not " +
                    std::to_string(dim_a) + "x" + std::to_string(dim_b));
  }
  if (traced == Subsystem::B) {
    CMatrix<Real> out = CMatrix<Real>::Zero(dim_a, dim_a);
    for (Eigen::Index i = 0; i < dim_a; ++i)
      for (Eigen::Index j = 0; j < dim_a; ++j)
        out(i, j) = m.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
    return out;
  }
  CMatrix<Real> out = CMatrix<Real>::Zero(dim_b, dim_b);
  for (Eigen::Index i = 0; i < dim_a; ++i) out += m.block(i * dim_b, i * dim_b, dim_b, dim_b);
  return out;
}

}  // namespace bellcat
