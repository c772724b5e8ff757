#pragma once

// Unital *-monomorphisms M_n -> M_{nk} in the normal form A -> U (A (x) 1_k) U*,
// their composition, and the dual (pullback) action on states.

#include <string>
#include <type_traits>

#include "bellcat/bell.hpp"

namespace bellcat {

template <typename Real>
inline constexpr Real kUnitaryTol = Real(1e-10);

template <typename Real = double>
class Monomorphism {
 public:
  using Matrix = CMatrix<Real>;

  Monomorphism(Eigen::Index source_dim, Eigen::Index multiplicity, Matrix conjugator,
               Real tol = kUnitaryTol<Real>)
      : source_dim_(source_dim), multiplicity_(multiplicity), conjugator_(std::move(conjugator)) {
    if (source_dim_ < 1 || multiplicity_ < 1)
      throw Error(ErrorCode::DimensionMismatch, "monomorphism dims must be positive");
    if (conjugator_.rows() != target_dim() || conjugator_.cols() != target_dim())
      throw Error(ErrorCode::DimensionMismatch,
                  "conjugator dim " + std::to_string(conjugator_.rows()) + " != " + std::to_string(target_dim()));
    if (!is_finite(conjugator_) || !is_unitary(conjugator_, tol))
      throw Error(ErrorCode::NotUnitary, "conjugator is not unitary");
  }

  static Monomorphism identity(Eigen::Index n) { return Monomorphism(n, 1, Matrix::Identity(n, n)); }

  /// The ampliation A -> A (x) 1_k.
  static Monomorphism ampliation(Eigen::Index n, Eigen::Index k) {
    return Monomorphism(n, k, Matrix::Identity(n * k, n * k));
  }

  Eigen::Index source_dim() const { return source_dim_; }
  Eigen::Index multiplicity() const { return multiplicity_; }
  Eigen::Index target_dim() const { return source_dim_ * multiplicity_; }
  const Matrix& conjugator() const { return conjugator_; }

 private:
  Eigen::Index source_dim_;
  Eigen::Index multiplicity_;
  Matrix conjugator_;
};

// A function object rather than a function template: with std::complex
// scalars, argument-dependent lookup would otherwise also find std::apply.
struct ApplyFn {
  template <typename Real>
  CMatrix<Real> operator()(const Monomorphism<Real>& gamma, const std::type_identity_t<CMatrix<Real>>& a) const {
    if (a.rows() != gamma.source_dim() || a.cols() != gamma.source_dim())
      throw Error(ErrorCode::DimensionMismatch, "apply: operator dim " + std::to_string(a.rows()) +
                                                    " vs source dim " + std::to_string(gamma.source_dim()));
    const auto& u = gamma.conjugator();
    const Eigen::Index k = gamma.multiplicity();
    return u * tensor<Real>(a, CMatrix<Real>::Identity(k, k)) * u.adjoint();
  }
};
inline constexpr ApplyFn apply{};

/// outer o inner: U = U_outer (U_inner (x) 1_{k_outer}), k = k_inner k_outer.
template <typename Real>
Monomorphism<Real> compose(const Monomorphism<Real>& outer, const Monomorphism<Real>& inner) {
  if (outer.source_dim() != inner.target_dim())
    throw Error(ErrorCode::DimensionMismatch, "compose: outer source " + std::to_string(outer.source_dim()) +
                                                  " != inner target " + std::to_string(inner.target_dim()));
  const Eigen::Index ko = outer.multiplicity();
  CMatrix<Real> u = outer.conjugator() * tensor<Real>(inner.conjugator(), CMatrix<Real>::Identity(ko, ko));
  return Monomorphism<Real>(inner.source_dim(), inner.multiplicity() * ko, std::move(u));
}

/// Permutation taking basis order (a, b, ka, kb) to (a, ka, b, kb).
template <typename Real>
CMatrix<Real> interleave_permutation(Eigen::Index na, Eigen::Index nb, Eigen::Index ka, Eigen::Index kb) {
  const Eigen::Index dim = na * nb * ka * kb;
  CMatrix<Real> p = CMatrix<Real>::Zero(dim, dim);
  for (Eigen::Index a = 0; a < na; ++a)
    for (Eigen::Index b = 0; b < nb; ++b)
      for (Eigen::Index i = 0; i < ka; ++i)
        for (Eigen::Index j = 0; j < kb; ++j) {
          const Eigen::Index from = ((a * nb + b) * ka + i) * kb + j;
          const Eigen::Index to = ((a * ka + i) * nb + b) * kb + j;
          p(to, from) = 1;
        }
  return p;
}

/// gamma_A (x) gamma_B in normal form on M_{nA nB}.
template <typename Real>
Monomorphism<Real> tensor(const Monomorphism<Real>& ga, const Monomorphism<Real>& gb) {
  CMatrix<Real> u = tensor<Real>(ga.conjugator(), gb.conjugator()) *
                    interleave_permutation<Real>(ga.source_dim(), gb.source_dim(), ga.multiplicity(),
                                                 gb.multiplicity());
  return Monomorphism<Real>(ga.source_dim() * gb.source_dim(), ga.multiplicity() * gb.multiplicity(),
                            std::move(u));
}

/// Dual map on states: sigma = Tr_k[U* rho' U], so sigma(A) = rho'(gamma(A)).
template <typename Real>
DensityState<Real> pullback(const Monomorphism<Real>& gamma, const DensityState<Real>& target) {
  if (target.dim() != gamma.target_dim())
    throw Error(ErrorCode::DimensionMismatch, "pullback: state dim " + std::to_string(target.dim()) +
                                                  " vs target dim " + std::to_string(gamma.target_dim()));
  const auto& u = gamma.conjugator();
  const CMatrix<Real> rotated = u.adjoint() * target.matrix() * u;
  return DensityState<Real>(partial_trace<Real>(rotated, gamma.source_dim(), gamma.multiplicity(), Subsystem::B));
}

/// |pullback(g2 o g1) - pullback(g1) o pullback(g2)| in operator norm.
template <typename Real>
Real check_contravariance(const Monomorphism<Real>& g1, const Monomorphism<Real>& g2,
                          const DensityState<Real>& state) {
  const DensityState<Real> direct = pullback(compose(g2, g1), state);
  const DensityState<Real> nested = pullback(g1, pullback(g2, state));
  return op_norm<Real>(direct.matrix() - nested.matrix());
}

/// {gamma_A(A_i), gamma_B(B_j)} on the embedded split.
template <typename Real>
AdmissibleQuadruple<Real> push_quadruple(const Monomorphism<Real>& ga, const Monomorphism<Real>& gb,
                                         const AdmissibleQuadruple<Real>& q) {
  if (ga.source_dim() != q.split().dim_a || gb.source_dim() != q.split().dim_b)
    throw Error(ErrorCode::DimensionMismatch, "push_quadruple: morphisms do not match the split");
  return AdmissibleQuadruple<Real>(BipartiteSplit(ga.target_dim(), gb.target_dim()), apply(ga, q.a1()),
                                   apply(ga, q.a2()), apply(gb, q.b1()), apply(gb, q.b2()));
}

template <typename Real = double>
struct ChshPullback {
  Real lhs;  // CHSH of the pulled-back state with the original quadruple
  Real rhs;  // target state on the Bell operator of the embedded quadruple
};

template <typename Real>
ChshPullback<Real> chsh_pullback_check(const Monomorphism<Real>& ga, const Monomorphism<Real>& gb,
                                       const AdmissibleQuadruple<Real>& q, const DensityState<Real>& target) {
  if (target.dim() != ga.target_dim() * gb.target_dim())
    throw Error(ErrorCode::DimensionMismatch, "chsh_pullback_check: target state dim mismatch");
  const Real lhs = chsh_value(pullback(tensor(ga, gb), target), q);
  const Real rhs = chsh_value(target, push_quadruple(ga, gb, q));
  return {lhs, rhs};
}

}  // namespace bellcat
