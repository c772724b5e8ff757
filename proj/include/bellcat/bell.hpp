#pragma once

// CHSH machinery: admissible quadruples, the Bell operator, the constructive
// maximal-violation procedure built on the polar decomposition of
// T = E F (1 - E), the squared-operator norm identity, and an alternating
// (see-saw) optimizer for the CHSH supremum of a fixed state.

#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <utility>
#include <vector>

#include "bellcat/algebra.hpp"
#include "bellcat/random.hpp"

namespace bellcat {

template <typename Real>
inline const Real kTsirelsonBound = Real(2) * std::sqrt(Real(2));
template <typename Real>
inline constexpr Real kClassicalBound = Real(2);

template <typename Real>
inline constexpr Real kAdmissibleTol = Real(1e-10);
template <typename Real>
inline constexpr Real kDichotomicTol = Real(1e-9);
template <typename Real>
inline constexpr Real kNonCommutingTol = Real(1e-8);

/// Two pairs of observables with spectrum in [-1, 1] on the factors of a
/// bipartite split. The factors commute because B-side observables enter
/// only as 1 (x) B.
template <typename Real = double>
class AdmissibleQuadruple {
 public:
  using Matrix = CMatrix<Real>;

  AdmissibleQuadruple(BipartiteSplit split, Matrix a1, Matrix a2, Matrix b1, Matrix b2,
                      Real tol = kAdmissibleTol<Real>)
      : split_(split), a1_(std::move(a1)), a2_(std::move(a2)), b1_(std::move(b1)), b2_(std::move(b2)) {
    check(a1_, split_.dim_a, "A1", tol);
    check(a2_, split_.dim_a, "A2", tol);
    check(b1_, split_.dim_b, "B1", tol);
    check(b2_, split_.dim_b, "B2", tol);
  }

  const BipartiteSplit& split() const { return split_; }
  const Matrix& a1() const { return a1_; }
  const Matrix& a2() const { return a2_; }
  const Matrix& b1() const { return b1_; }
  const Matrix& b2() const { return b2_; }

  bool is_dichotomic(Real tol = kDichotomicTol<Real>) const {
    const auto squares_to_one = [tol](const Matrix& m) {
      return op_norm<Real>(m * m - Matrix::Identity(m.rows(), m.rows())) <= tol;
    };
    return squares_to_one(a1_) && squares_to_one(a2_) && squares_to_one(b1_) && squares_to_one(b2_);
  }

 private:
  static void check(Matrix& m, Eigen::Index dim, const char* name, Real tol) {
    if (m.rows() != dim || m.cols() != dim)
      throw Error(ErrorCode::InvalidQuadruple, std::string(name) + " has dim " + std::to_string(m.rows()) +
                                                   ", expected " + std::to_string(dim));
    if (!is_finite(m)) throw Error(ErrorCode::InvalidQuadruple, std::string(name) + " has non-finite entries");
    if (!is_hermitian(m, tol)) throw Error(ErrorCode::InvalidQuadruple, std::string(name) + " is not Hermitian");
    m = (m + m.adjoint()).eval() / Real(2);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    if (ev(0) < Real(-1) - tol || ev(ev.size() - 1) > Real(1) + tol)
      throw Error(ErrorCode::InvalidQuadruple, std::string(name) + " has spectrum outside [-1, 1]");
  }

  BipartiteSplit split_;
  Matrix a1_, a2_, b1_, b2_;
};

/// A1 B1 + A1 B2 + A2 B1 - A2 B2 on the tensor product.
template <typename Real>
CMatrix<Real> bell_operator(const AdmissibleQuadruple<Real>& q) {
  return tensor<Real>(q.a1(), q.b1() + q.b2()) + tensor<Real>(q.a2(), q.b1() - q.b2());
}

template <typename Real>
Real chsh_value(const DensityState<Real>& state, const AdmissibleQuadruple<Real>& q) {
  if (state.dim() != q.split().total())
    throw Error(ErrorCode::DimensionMismatch, "state dim " + std::to_string(state.dim()) +
                                                  " vs split " + std::to_string(q.split().total()));
  return evaluate(state, bell_operator(q)).real();
}

/// C^2 - (4 - [A1,A2] (x) [B1,B2]); vanishes for dichotomic quadruples.
template <typename Real>
Real squared_bell_defect(const AdmissibleQuadruple<Real>& q) {
  const CMatrix<Real> c = bell_operator(q);
  const Eigen::Index n = c.rows();
  const CMatrix<Real> rhs = Real(4) * CMatrix<Real>::Identity(n, n) -
                            tensor<Real>(commutator(q.a1(), q.a2()), commutator(q.b1(), q.b2()));
  return op_norm<Real>(c * c - rhs);
}

/// 2 sqrt(1 + |[A1,A2]| |[B1,B2]| / 4), exact for dichotomic quadruples.
template <typename Real>
Real landau_norm(const AdmissibleQuadruple<Real>& q) {
  if (!q.is_dichotomic()) throw Error(ErrorCode::NotDichotomic, "landau_norm needs A^2 = B^2 = 1");
  const Real ca = op_norm<Real>(commutator(q.a1(), q.a2()));
  const Real cb = op_norm<Real>(commutator(q.b1(), q.b2()));
  return Real(2) * std::sqrt(Real(1) + ca * cb / Real(4));
}

// Intermediate operators of the maximal-violation construction, kept for
// inspection and testing.
template <typename Real = double>
struct ConstructionTrace {
  CMatrix<Real> e, f;          // input projections
  CMatrix<Real> t;             // E F (1 - E), nilpotent
  CMatrix<Real> v;             // partial isometry of T
  CMatrix<Real> x, y, z;       // V*V, V V*, X + Y
  CMatrix<Real> abar1, abar2;  // V + V*, i (V* - V)
};

template <typename Real = double>
struct SwlPair {
  CMatrix<Real> a1, a2;
  ConstructionTrace<Real> trace;
};

/// Builds dichotomic A1, A2 with |[A1, A2]| = 2 from two non-commuting
/// projections E, F.
template <typename Real>
SwlPair<Real> swl_construct(const CMatrix<Real>& e, const CMatrix<Real>& f,
                            Real tol = kNonCommutingTol<Real>) {
  if (e.rows() != f.rows() || e.cols() != f.cols())
    throw Error(ErrorCode::DimensionMismatch, "swl_construct: E and F differ in dimension");
  if (!is_projection(e, tol)) throw Error(ErrorCode::NotProjection, "E is not an orthogonal projection");
  if (!is_projection(f, tol)) throw Error(ErrorCode::NotProjection, "F is not an orthogonal projection");
  if (op_norm<Real>(commutator(e, f)) <= tol)
    throw Error(ErrorCode::CommutingProjections, "E and F commute, T = EF(1-E) vanishes");

  using Matrix = CMatrix<Real>;
  using C = std::complex<Real>;
  const Matrix one = Matrix::Identity(e.rows(), e.rows());

  ConstructionTrace<Real> tr;
  tr.e = e;
  tr.f = f;
  tr.t = e * f * (one - e);
  try {
    tr.v = polar_partial_isometry<Real>(tr.t).isometry;
  } catch (const Error& err) {
    if (err.code() == ErrorCode::ZeroOperator)
      throw Error(ErrorCode::CommutingProjections, "T = EF(1-E) vanishes numerically");
    throw;
  }
  tr.x = tr.v.adjoint() * tr.v;
  tr.y = tr.v * tr.v.adjoint();
  tr.z = tr.x + tr.y;
  tr.abar1 = tr.v + tr.v.adjoint();
  tr.abar2 = C(0, 1) * (tr.v.adjoint() - tr.v);

  SwlPair<Real> out;
  out.a1 = tr.abar1 + tr.z - one;
  out.a2 = tr.abar2 + tr.z - one;
  out.trace = std::move(tr);
  return out;
}

template <typename Real = double>
struct MaximalState {
  DensityState<Real> state;
  Real value;
};

/// Pure state on the eigenvector of C whose eigenvalue has the largest modulus.
template <typename Real>
MaximalState<Real> maximal_state(const AdmissibleQuadruple<Real>& q) {
  const auto eig = herm_eig<Real>(bell_operator(q), Real(1e-9));
  const Eigen::Index last = eig.values.size() - 1;
  const Eigen::Index pick = std::abs(eig.values(last)) >= std::abs(eig.values(0)) ? last : 0;
  auto state = DensityState<Real>::pure(eig.vectors.col(pick));
  const Real value = chsh_value(state, q);
  return {std::move(state), value};
}

/// Tr_B[rho (1 (x) X)].
template <typename Real>
CMatrix<Real> partial_expectation_b(const CMatrix<Real>& rho, const BipartiteSplit& split,
                                    const CMatrix<Real>& x) {
  const Eigen::Index da = split.dim_a, db = split.dim_b;
  CMatrix<Real> out(da, da);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      out(i, j) = (rho.block(i * db, j * db, db, db).transpose().array() * x.array()).sum();
  return out;
}

/// Tr_A[rho (X (x) 1)].
template <typename Real>
CMatrix<Real> partial_expectation_a(const CMatrix<Real>& rho, const BipartiteSplit& split,
                                    const CMatrix<Real>& x) {
  const Eigen::Index da = split.dim_a, db = split.dim_b;
  CMatrix<Real> out = CMatrix<Real>::Zero(db, db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index k = 0; k < da; ++k)
      if (x(k, i) != std::complex<Real>(0)) out += x(k, i) * rho.block(i * db, k * db, db, db);
  return out;
}

template <typename Real = double>
struct SeesawOptions {
  int restarts = 8;
  int max_iters = 500;
  Real tol = Real(1e-13);
  std::uint64_t seed = 0;
  int jobs = 1;
  // Extra runs started from these (B1, B2) pairs, after the random restarts.
  std::vector<std::pair<CMatrix<Real>, CMatrix<Real>>> warm_starts;
};

template <typename Real = double>
struct SeesawRun {
  AdmissibleQuadruple<Real> quadruple;
  Real chsh;
  std::vector<Real> trajectory;  // objective after every half-step
};

/// One alternating run from (B1, B2). Each half-step replaces one side by the
/// operator sign of the Hermitian part of its partial expectation, which is
/// the exact maximizer over observables with spectrum in [-1, 1].
template <typename Real>
SeesawRun<Real> seesaw_run(const DensityState<Real>& state, const BipartiteSplit& split,
                           CMatrix<Real> b1, CMatrix<Real> b2, int max_iters, Real tol) {
  if (state.dim() != split.total())
    throw Error(ErrorCode::DimensionMismatch, "seesaw: state dim does not match split");
  if (b1.rows() != split.dim_b || b2.rows() != split.dim_b)
    throw Error(ErrorCode::DimensionMismatch, "seesaw: initial B observables have wrong dim");
  using Matrix = CMatrix<Real>;
  const Matrix& rho = state.matrix();
  const auto herm = [](const Matrix& m) -> Matrix { return (m + m.adjoint()) / Real(2); };
  const auto overlap = [](const Matrix& a, const Matrix& m) { return (a.transpose().array() * m.array()).sum().real(); };

  Matrix a1, a2;
  std::vector<Real> trajectory;
  Real previous = -std::numeric_limits<Real>::infinity();
  for (int iter = 0; iter < std::max(1, max_iters); ++iter) {
    const Matrix m1 = herm(partial_expectation_b<Real>(rho, split, b1 + b2));
    const Matrix m2 = herm(partial_expectation_b<Real>(rho, split, b1 - b2));
    a1 = operator_sign<Real>(m1);
    a2 = operator_sign<Real>(m2);
    trajectory.push_back(overlap(a1, m1) + overlap(a2, m2));

    const Matrix n1 = herm(partial_expectation_a<Real>(rho, split, a1 + a2));
    const Matrix n2 = herm(partial_expectation_a<Real>(rho, split, a1 - a2));
    b1 = operator_sign<Real>(n1);
    b2 = operator_sign<Real>(n2);
    const Real current = overlap(b1, n1) + overlap(b2, n2);
    trajectory.push_back(current);
    if (current - previous <= tol) break;
    previous = current;
  }
  AdmissibleQuadruple<Real> q(split, std::move(a1), std::move(a2), std::move(b1), std::move(b2));
  const Real value = chsh_value(state, q);
  return {std::move(q), value, std::move(trajectory)};
}

template <typename Real = double>
struct SeesawResult {
  AdmissibleQuadruple<Real> quadruple;
  Real chsh;  // omega(C), ceiling 2 sqrt 2
  Real beta;  // omega(C) / 2, ceiling sqrt 2
  std::size_t best_run = 0;
  std::vector<Real> best_trajectory;
  std::vector<Real> run_values;
};

/// Best see-saw value over seeded restarts (and any warm starts). Restart r
/// draws its initial B pair from make_rng(seed, r), so the result does not
/// depend on `jobs`.
template <typename Real>
SeesawResult<Real> seesaw_maximize(const DensityState<Real>& state, const BipartiteSplit& split,
                                   const SeesawOptions<Real>& opts = {}) {
  if (state.dim() != split.total())
    throw Error(ErrorCode::DimensionMismatch, "seesaw: state dim " + std::to_string(state.dim()) +
                                                  " does not match split " + std::to_string(split.total()));
  const int random_runs = std::max(0, opts.restarts);
  const std::size_t total = static_cast<std::size_t>(random_runs) + opts.warm_starts.size();
  if (total == 0) throw Error(ErrorCode::BadWeights, "seesaw: no restarts requested");

  auto run_one = [&](std::size_t r) {
    if (r < static_cast<std::size_t>(random_runs)) {
      Rng rng = make_rng(opts.seed, r);
      CMatrix<Real> b1 = random_dichotomic<Real>(split.dim_b, rng);
      CMatrix<Real> b2 = random_dichotomic<Real>(split.dim_b, rng);
      return seesaw_run<Real>(state, split, std::move(b1), std::move(b2), opts.max_iters, opts.tol);
    }
    const auto& warm = opts.warm_starts[r - random_runs];
    return seesaw_run<Real>(state, split, warm.first, warm.second, opts.max_iters, opts.tol);
  };

  std::vector<std::optional<SeesawRun<Real>>> runs(total);
  if (opts.jobs > 1) {
    for (std::size_t begin = 0; begin < total; begin += static_cast<std::size_t>(opts.jobs)) {
      const std::size_t end = std::min(total, begin + static_cast<std::size_t>(opts.jobs));
      std::vector<std::future<SeesawRun<Real>>> futures;
      for (std::size_t r = begin; r < end; ++r) futures.push_back(std::async(std::launch::async, run_one, r));
      for (std::size_t r = begin; r < end; ++r) runs[r].emplace(futures[r - begin].get());
    }
  } else {
    for (std::size_t r = 0; r < total; ++r) runs[r].emplace(run_one(r));
  }

  std::size_t best = 0;
  std::vector<Real> values;
  for (std::size_t r = 0; r < total; ++r) {
    values.push_back(runs[r]->chsh);
    if (runs[r]->chsh > runs[best]->chsh) best = r;
  }
  SeesawRun<Real>& winner = *runs[best];
  return {std::move(winner.quadruple), winner.chsh, winner.chsh / Real(2), best,
          std::move(winner.trajectory), std::move(values)};
}

}  // namespace bellcat
