#pragma once

// States on full matrix algebras, represented by density matrices in the
// defining representation, and the closure operations on a state space.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bellcat/linalg.hpp"

namespace bellcat {

template <typename Real>
inline constexpr Real kStateTol = Real(1e-10);

/// Dimensions of the two commuting tensor factors A (x) B.
struct BipartiteSplit {
  Eigen::Index dim_a = 2;
  Eigen::Index dim_b = 2;

  BipartiteSplit() = default;
  BipartiteSplit(Eigen::Index a, Eigen::Index b) : dim_a(a), dim_b(b) {
    if (a < 2 || b < 2)
      throw Error(ErrorCode::InvalidSplit, "factor dimensions must be >= 2, got " +
                                               std::to_string(a) + "x" + std::to_string(b));
  }

  Eigen::Index total() const { return dim_a * dim_b; }
  bool operator==(const BipartiteSplit&) const = default;
};

template <typename Real = double>
class DensityState {
 public:
  using Matrix = CMatrix<Real>;

  /// Validates Hermiticity, positivity and unit trace to `tol`.
  explicit DensityState(Matrix rho, Real tol = kStateTol<Real>) : rho_(std::move(rho)) {
    if (!is_finite(rho_)) throw Error(ErrorCode::NonFinite, "state has non-finite entries");
    if (!is_hermitian(rho_, tol)) throw Error(ErrorCode::InvalidState, "density matrix is not Hermitian");
    const Real tr_err = std::abs(rho_.trace() - std::complex<Real>(1));
    if (tr_err > tol)
      throw Error(ErrorCode::InvalidState, "trace differs from 1 by " + std::to_string(double(tr_err)));
    rho_ = (rho_ + rho_.adjoint()).eval() / Real(2);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues()(0) < -tol)
      throw Error(ErrorCode::InvalidState,
                  "negative eigenvalue " + std::to_string(double(solver.eigenvalues()(0))));
  }

  static DensityState pure(const CVector<Real>& ket) {
    const Real norm = ket.norm();
    if (!(norm > Real(0))) throw Error(ErrorCode::InvalidState, "zero state vector");
    const CVector<Real> unit = ket / norm;
    return DensityState(unit * unit.adjoint());
  }

  static DensityState maximally_mixed(Eigen::Index dim) {
    return DensityState(Matrix::Identity(dim, dim) / Real(dim));
  }

  const Matrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }

  Real purity() const { return (rho_ * rho_).trace().real(); }

 private:
  Matrix rho_;
};

template <typename Real>
DensityState<Real> product_state(const DensityState<Real>& a, const DensityState<Real>& b) {
  return DensityState<Real>(tensor(a.matrix(), b.matrix()));
}

/// omega(X) = trace(rho X).
template <typename Real>
std::complex<Real> evaluate(const DensityState<Real>& state, const CMatrix<Real>& x) {
  if (x.rows() != state.dim() || x.cols() != state.dim())
    throw Error(ErrorCode::DimensionMismatch, "observable dim " + std::to_string(x.rows()) +
                                                  " vs state dim " + std::to_string(state.dim()));
  // trace(rho X) without forming the product.
  return (state.matrix().transpose().array() * x.array()).sum();
}

template <typename Real>
DensityState<Real> convex_combine(std::span<const DensityState<Real>> states,
                                  std::span<const Real> weights) {
  if (states.empty() || states.size() != weights.size())
    throw Error(ErrorCode::BadWeights, "need one weight per state");
  Real total = 0;
  for (Real w : weights) {
    if (!(w >= Real(0))) throw Error(ErrorCode::BadWeights, "negative weight");
    total += w;
  }
  if (std::abs(total - Real(1)) > Real(1e-12)) throw Error(ErrorCode::BadWeights, "weights do not sum to 1");
  const Eigen::Index dim = states.front().dim();
  CMatrix<Real> rho = CMatrix<Real>::Zero(dim, dim);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != dim) throw Error(ErrorCode::DimensionMismatch, "convex_combine: unequal dims");
    rho += weights[i] * states[i].matrix();
  }
  return DensityState<Real>(std::move(rho));
}

template <typename Real>
DensityState<Real> convex_combine(const std::vector<DensityState<Real>>& states,
                                  const std::vector<Real>& weights) {
  return convex_combine(std::span<const DensityState<Real>>(states), std::span<const Real>(weights));
}

/// omega_A(.) = omega(A* . A) / omega(A* A).
template <typename Real>
DensityState<Real> twist(const DensityState<Real>& state, const CMatrix<Real>& a) {
  if (a.rows() != state.dim() || a.cols() != state.dim())
    throw Error(ErrorCode::DimensionMismatch, "twist: operator dimension mismatch");
  const CMatrix<Real> out = a * state.matrix() * a.adjoint();
  const Real weight = out.trace().real();
  if (!(weight > Real(1e-12))) throw Error(ErrorCode::NullTwist, "omega(A*A) vanishes");
  return DensityState<Real>(out / weight);
}

/// Returns B = A^{1/2} with B*B = A when A is positive to `tol`, nothing otherwise.
template <typename Real>
std::optional<CMatrix<Real>> positive_root(const CMatrix<Real>& a, Real tol = kStateTol<Real>) {
  if (!is_finite(a) || !is_hermitian(a, tol)) return std::nullopt;
  const auto eig = herm_eig(a, tol);
  if (eig.values(0) < -tol) return std::nullopt;
  return psd_sqrt(a, tol);
}

template <typename Real>
bool is_positive_element(const CMatrix<Real>& a, Real tol = kStateTol<Real>) {
  return positive_root(a, tol).has_value();
}

/// Every member positive and the members summing to the identity.
template <typename Real>
bool measurement_family_check(std::span<const CMatrix<Real>> family, Real tol = kStateTol<Real>) {
  if (family.empty()) return false;
  const Eigen::Index dim = family.front().rows();
  CMatrix<Real> sum = CMatrix<Real>::Zero(dim, dim);
  for (const auto& member : family) {
    if (member.rows() != dim || member.cols() != dim)
      throw Error(ErrorCode::DimensionMismatch, "measurement family: unequal dims");
    if (!is_positive_element(member, tol)) return false;
    sum += member;
  }
  return op_norm<Real>(sum - CMatrix<Real>::Identity(dim, dim)) <= tol;
}

template <typename Real>
bool measurement_family_check(const std::vector<CMatrix<Real>>& family, Real tol = kStateTol<Real>) {
  return measurement_family_check(std::span<const CMatrix<Real>>(family), tol);
}

}  // namespace bellcat
