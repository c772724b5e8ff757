#pragma once

// Seeded samplers. All draws go through a caller-owned std::mt19937_64 so a
// fixed seed reproduces the same matrices on the same toolchain.

#include <cstdint>
#include <random>

#include "bellcat/algebra.hpp"

namespace bellcat {

using Rng = std::mt19937_64;

/// Deterministic per-stream generator, e.g. one stream per restart.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

template <typename Real = double>
CMatrix<Real> random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<Real> normal(Real(0), Real(1));
  CMatrix<Real> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = std::complex<Real>(normal(rng), normal(rng));
  return m;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal absorbed into Q.
template <typename Real = double>
CMatrix<Real> haar_unitary(Eigen::Index n, Rng& rng) {
  const CMatrix<Real> z = random_ginibre<Real>(n, n, rng);
  Eigen::HouseholderQR<CMatrix<Real>> qr(z);
  CMatrix<Real> q = qr.householderQ() * CMatrix<Real>::Identity(n, n);
  const CMatrix<Real> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<Real> d = r(i, i);
    const Real mag = std::abs(d);
    if (mag > Real(0)) q.col(i) *= d / mag;
  }
  return q;
}

template <typename Real = double>
CMatrix<Real> random_hermitian(Eigen::Index n, Rng& rng) {
  const CMatrix<Real> g = random_ginibre<Real>(n, n, rng);
  return (g + g.adjoint()) / Real(2);
}

/// U P U* with P the diagonal projection onto the first `rank` basis vectors.
template <typename Real = double>
CMatrix<Real> random_projection(Eigen::Index n, Eigen::Index rank, Rng& rng) {
  const CMatrix<Real> u = haar_unitary<Real>(n, rng);
  CVector<Real> diag = CVector<Real>::Zero(n);
  diag.head(rank).setOnes();
  return u * diag.asDiagonal() * u.adjoint();
}

/// Traceless-as-possible dichotomic observable: U diag(+1.., -1..) U*.
template <typename Real = double>
CMatrix<Real> random_dichotomic(Eigen::Index n, Rng& rng) {
  const CMatrix<Real> u = haar_unitary<Real>(n, rng);
  CVector<Real> diag = CVector<Real>::Constant(n, Real(-1));
  diag.head((n + 1) / 2).setOnes();
  return u * diag.asDiagonal() * u.adjoint();
}

/// Hermitian observable with spectrum drawn uniformly from [-1, 1].
template <typename Real = double>
CMatrix<Real> random_contraction(Eigen::Index n, Rng& rng) {
  std::uniform_real_distribution<Real> uniform(Real(-1), Real(1));
  const CMatrix<Real> u = haar_unitary<Real>(n, rng);
  CVector<Real> diag(n);
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = uniform(rng);
  return u * diag.asDiagonal() * u.adjoint();
}

template <typename Real = double>
CVector<Real> random_ket(Eigen::Index n, Rng& rng) {
  const CVector<Real> v = random_ginibre<Real>(n, 1, rng);
  return v / v.norm();
}

/// Density matrix G G* / trace with G an n x rank Ginibre matrix.
template <typename Real = double>
DensityState<Real> random_state(Eigen::Index n, Rng& rng, Eigen::Index rank = -1) {
  if (rank < 1) rank = n;
  const CMatrix<Real> g = random_ginibre<Real>(n, rank, rng);
  CMatrix<Real> rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityState<Real>(std::move(rho));
}

}  // namespace bellcat
