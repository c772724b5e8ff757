#include "bellcat/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace bellcat::field {

namespace {

int wrap_index(long long i, int n) {
  const long long r = i % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

// Symmetric square root of a 2x2 positive-definite matrix.
Eigen::Matrix2d sqrt_spd(const Eigen::Matrix2d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(m);
  return solver.operatorSqrt();
}

// Orthogonal factors of a 2x2 SVD forced into SO(2), signs moved onto the
// second singular value.
struct SignedSvd {
  Eigen::Matrix2d u, v;
  Eigen::Vector2d s;
};

SignedSvd signed_svd(const Eigen::Matrix2d& c) {
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SignedSvd out{svd.matrixU(), svd.matrixV(), svd.singularValues()};
  if (out.u.determinant() < 0) {
    out.u.col(1) *= -1;
    out.s(1) *= -1;
  }
  if (out.v.determinant() < 0) {
    out.v.col(1) *= -1;
    out.s(1) *= -1;
  }
  return out;
}

double chsh_from_correlations(const Eigen::Matrix2d& t, const std::array<double, 4>& angles) {
  const Eigen::Vector2d u1(std::cos(angles[0]), std::sin(angles[0]));
  const Eigen::Vector2d u2(std::cos(angles[1]), std::sin(angles[1]));
  const Eigen::Vector2d v1(std::cos(angles[2]), std::sin(angles[2]));
  const Eigen::Vector2d v2(std::cos(angles[3]), std::sin(angles[3]));
  return (u1 + u2).dot(t * v1) + (u1 - u2).dot(t * v2);
}

}  // namespace

LatticeModel::LatticeModel(int sites, double mass, double spacing)
    : sites_(sites), mass_(mass), spacing_(spacing) {
  if (!(mass > 0.0))
    throw Error(ErrorCode::MasslessUnsupported, "lattice model needs m > 0, got " + std::to_string(mass));
  if (sites < 8 || sites % 2 != 0)
    throw Error(ErrorCode::InvalidModel, "site count must be even and >= 8, got " + std::to_string(sites));
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidModel, "lattice spacing must be positive");
}

double LatticeModel::dispersion(int k) const {
  const double s = std::sin(std::numbers::pi * k / sites_);
  return std::sqrt(mass_ * mass_ + 4.0 / (spacing_ * spacing_) * s * s);
}

WedgeRegion::WedgeRegion(int sites, int start, int length, Side side)
    : sites_(sites), start_(0), length_(length), side_(side) {
  if (sites < 1 || length < 1 || length > sites)
    throw Error(ErrorCode::InvalidModel, "wedge interval of length " + std::to_string(length) +
                                             " does not fit on " + std::to_string(sites) + " sites");
  start_ = wrap_index(start, sites);
}

bool WedgeRegion::contains(int site) const { return wrap_index(static_cast<long long>(site) - start_, sites_) < length_; }

bool WedgeRegion::overlaps(const WedgeRegion& other) const {
  if (other.sites_ != sites_) return false;
  for (int i = 0; i < length_; ++i)
    if (other.contains(start_ + i)) return true;
  return false;
}

WedgeRegion WedgeRegion::shifted(int shift) const {
  return WedgeRegion(sites_, wrap_index(static_cast<long long>(start_) + shift, sites_), length_, side_);
}

WedgePair complementary_wedges(const LatticeModel& model, int gap) {
  const int n = model.sites();
  if (gap < 0) throw Error(ErrorCode::InvalidModel, "negative wedge gap");
  const int length = (n - 2 * gap) / 2;
  if (length < 1) throw Error(ErrorCode::InvalidModel, "gap " + std::to_string(gap) + " leaves no wedge sites");
  return {WedgeRegion(n, 0, length, Side::Left), WedgeRegion(n, length + gap, length, Side::Right)};
}

SmearingFunction::SmearingFunction(Eigen::VectorXd coefficients, WedgeRegion region)
    : coefficients_(std::move(coefficients)), region_(region) {
  if (coefficients_.size() != region_.sites())
    throw Error(ErrorCode::DimensionMismatch, "smearing has " + std::to_string(coefficients_.size()) +
                                                  " coefficients for " + std::to_string(region_.sites()) + " sites");
  if (!coefficients_.allFinite()) throw Error(ErrorCode::NonFinite, "smearing coefficients not finite");
  for (int i = 0; i < coefficients_.size(); ++i)
    if (coefficients_(i) != 0.0 && !region_.contains(i))
      throw Error(ErrorCode::SupportViolation, "smearing is nonzero at site " + std::to_string(i) +
                                                   " outside its wedge");
  if (std::abs(coefficients_.squaredNorm() - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidModel, "smearing must have unit norm");
}

SmearingFunction SmearingFunction::normalized(Eigen::VectorXd profile, WedgeRegion region) {
  const double norm = profile.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidModel, "zero smearing profile");
  profile /= norm;
  return SmearingFunction(std::move(profile), region);
}

SmearingFunction SmearingFunction::peak(const WedgeRegion& region, int offset) {
  const int local = offset < 0 ? region.length() + offset : offset;
  if (local < 0 || local >= region.length()) throw Error(ErrorCode::SupportViolation, "peak offset outside wedge");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(region.sites());
  c(wrap_index(static_cast<long long>(region.start()) + local, region.sites())) = 1.0;
  return SmearingFunction(std::move(c), region);
}

std::pair<SmearingFunction, SmearingFunction> boundary_smearings(const WedgePair& wedges) {
  return {SmearingFunction::peak(wedges.left, -1), SmearingFunction::peak(wedges.right, 0)};
}

VacuumCovariance vacuum_covariance(const LatticeModel& model) {
  const int n = model.sites();
  std::vector<double> omega(n);
  for (int k = 0; k < n; ++k) omega[k] = model.dispersion(k);

  // Circulant: both kernels depend only on (i - j) mod N.
  Eigen::VectorXd phi_row(n), pi_row(n);
  for (int d = 0; d < n; ++d) {
    double phi = 0, pi = 0;
    for (int k = 0; k < n; ++k) {
      const double c = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) * d / n);
      phi += c / (2.0 * omega[k]);
      pi += omega[k] * c / 2.0;
    }
    phi_row(d) = phi / n;
    pi_row(d) = pi / n;
  }
  VacuumCovariance out{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.phi(i, j) = phi_row(wrap_index(i - j, n));
      out.pi(i, j) = pi_row(wrap_index(i - j, n));
    }
  return out;
}

double vacuum_quadratic_form(const LatticeModel& model, const Eigen::VectorXd& f) {
  if (f.size() != model.sites()) throw Error(ErrorCode::DimensionMismatch, "smearing length != site count");
  const VacuumCovariance g = vacuum_covariance(model);
  return 2.0 * f.dot(g.phi * f);
}

double weyl_vacuum_expectation(const LatticeModel& model, const Eigen::VectorXd& f) {
  return std::exp(-0.25 * vacuum_quadratic_form(model, f));
}

double weyl_vacuum_expectation(const LatticeModel& model, const SmearingFunction& f) {
  return weyl_vacuum_expectation(model, f.coefficients());
}

SmearingFunction translate_smearing(const LatticeModel& model, const SmearingFunction& f, int shift) {
  const int n = model.sites();
  if (f.coefficients().size() != n) throw Error(ErrorCode::DimensionMismatch, "smearing length != site count");
  Eigen::VectorXd moved(n);
  for (int i = 0; i < n; ++i) moved(wrap_index(static_cast<long long>(i) + shift, n)) = f.coefficients()(i);
  return SmearingFunction(std::move(moved), f.region().shifted(shift));
}

Covariance4 symplectic_form() {
  Covariance4 omega = Covariance4::Zero();
  omega(0, 1) = 1;
  omega(1, 0) = -1;
  omega(2, 3) = 1;
  omega(3, 2) = -1;
  return omega;
}

double uncertainty_margin(const Covariance4& sigma) {
  const Eigen::Matrix4cd m = sigma.cast<std::complex<double>>() +
                             std::complex<double>(0, 1) * symplectic_form().cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

StandardFormReduction to_standard_form(const Covariance4& sigma) {
  const Eigen::Matrix2d a = sigma.block<2, 2>(0, 0);
  const Eigen::Matrix2d b = sigma.block<2, 2>(2, 2);
  const Eigen::Matrix2d c = sigma.block<2, 2>(0, 2);
  const double det_a = a.determinant();
  const double det_b = b.determinant();
  if (!(det_a > 0.0) || !(det_b > 0.0))
    throw Error(ErrorCode::UncertaintyViolation, "local covariance blocks are not positive definite");

  // Williamson form of each single-mode block: A = alpha S S^T, det S = 1.
  const double alpha = std::sqrt(det_a);
  const double beta = std::sqrt(det_b);
  const Eigen::Matrix2d la = sqrt_spd(a / alpha).inverse();
  const Eigen::Matrix2d lb = sqrt_spd(b / beta).inverse();

  const SignedSvd svd = signed_svd(la * c * lb.transpose());
  const Eigen::Matrix2d sa = svd.u.transpose() * la;
  const Eigen::Matrix2d sb = svd.v.transpose() * lb;

  StandardFormReduction out;
  out.local_symplectic = Covariance4::Zero();
  out.local_symplectic.block<2, 2>(0, 0) = sa;
  out.local_symplectic.block<2, 2>(2, 2) = sb;
  out.reduced = out.local_symplectic * sigma * out.local_symplectic.transpose();
  out.form = {alpha, beta, svd.s(0), svd.s(1)};
  return out;
}

double squeeze_fit(const StandardForm& form) {
  const double a = 0.5 * (form.alpha + form.beta);
  const double c = 0.5 * (std::abs(form.c_plus) + std::abs(form.c_minus));
  if (!(c > 0.0)) return 0.0;
  if (!(a > c)) throw Error(ErrorCode::UncertaintyViolation, "correlations exceed local variances");
  return 0.25 * std::log((a + c) / (a - c));
}

GaussianReduction reduce_two_modes(const LatticeModel& model, const SmearingFunction& left,
                                   const SmearingFunction& right) {
  const int n = model.sites();
  if (left.coefficients().size() != n || right.coefficients().size() != n)
    throw Error(ErrorCode::DimensionMismatch, "smearing length != site count");
  if (left.region().overlaps(right.region()))
    throw Error(ErrorCode::SupportViolation, "left and right wedges overlap");

  const VacuumCovariance g = vacuum_covariance(model);
  const Eigen::VectorXd& fl = left.coefficients();
  const Eigen::VectorXd& fr = right.coefficients();

  GaussianReduction out;
  Covariance4& s = out.covariance;
  s.setZero();
  s(0, 0) = 2.0 * fl.dot(g.phi * fl);
  s(1, 1) = 2.0 * fl.dot(g.pi * fl);
  s(2, 2) = 2.0 * fr.dot(g.phi * fr);
  s(3, 3) = 2.0 * fr.dot(g.pi * fr);
  s(0, 2) = s(2, 0) = 2.0 * fl.dot(g.phi * fr);
  s(1, 3) = s(3, 1) = 2.0 * fl.dot(g.pi * fr);

  if (uncertainty_margin(s) < -1e-9)
    throw Error(ErrorCode::UncertaintyViolation, "reduced covariance violates sigma + i Omega >= 0");
  out.standard_form = to_standard_form(s).form;
  out.squeeze = squeeze_fit(out.standard_form);
  return out;
}

int pseudospin_mode_dim(int n_max) {
  if (n_max < 0) throw Error(ErrorCode::InvalidModel, "n_max must be non-negative");
  const int d = n_max + 1;
  return d % 2 == 0 ? d : d + 1;
}

DensityState<double> tmsv_density(double r, int n_max, int mode_dim) {
  if (!(r >= 0.0)) throw Error(ErrorCode::InvalidModel, "squeeze must be non-negative");
  if (n_max < 0) throw Error(ErrorCode::InvalidModel, "n_max must be non-negative");
  const int d = mode_dim < 0 ? n_max + 1 : mode_dim;
  if (d < n_max + 1) throw Error(ErrorCode::DimensionMismatch, "mode dimension below n_max + 1");
  const double t = std::tanh(r);
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int k = 0; k <= n_max; ++k) psi(static_cast<Eigen::Index>(k) * d + k) = std::pow(t, k);
  return DensityState<double>::pure(psi);
}

ComplexMatrix pseudospin_observable(double theta, int mode_dim) {
  if (mode_dim < 2 || mode_dim % 2 != 0)
    throw Error(ErrorCode::OddDimension, "pseudospin needs an even mode dimension, got " + std::to_string(mode_dim));
  const double c = std::cos(theta), s = std::sin(theta);
  ComplexMatrix m = ComplexMatrix::Zero(mode_dim, mode_dim);
  for (int k = 0; k < mode_dim; k += 2) {
    m(k, k) = -c;
    m(k + 1, k + 1) = c;
    m(k, k + 1) = s;
    m(k + 1, k) = s;
  }
  return m;
}

AdmissibleQuadruple<double> pseudospin_quadruple_dim(const std::array<double, 4>& angles, int mode_dim) {
  return AdmissibleQuadruple<double>(BipartiteSplit(mode_dim, mode_dim), pseudospin_observable(angles[0], mode_dim),
                                     pseudospin_observable(angles[1], mode_dim),
                                     pseudospin_observable(angles[2], mode_dim),
                                     pseudospin_observable(angles[3], mode_dim));
}

AdmissibleQuadruple<double> pseudospin_quadruple(const std::array<double, 4>& angles, int n_max) {
  return pseudospin_quadruple_dim(angles, n_max + 1);
}

PseudospinOptimum optimize_pseudospin(const DensityState<double>& state, int mode_dim, double grid_step_deg) {
  if (state.dim() != static_cast<Eigen::Index>(mode_dim) * mode_dim)
    throw Error(ErrorCode::DimensionMismatch, "state does not live on two modes of the given dimension");
  if (!(grid_step_deg > 0.0)) throw Error(ErrorCode::InvalidModel, "grid step must be positive");

  // Correlation matrix t(i, j) = <s_i (x) s_j> over (s_z, s_x).
  const ComplexMatrix sz = pseudospin_observable(0.0, mode_dim);
  const ComplexMatrix sx = pseudospin_observable(std::numbers::pi / 2, mode_dim);
  Eigen::Matrix2d t;
  const ComplexMatrix* basis[2] = {&sz, &sx};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t(i, j) = evaluate(state, tensor<double>(*basis[i], *basis[j])).real();

  const int steps = std::max(1, static_cast<int>(std::lround(360.0 / grid_step_deg)));
  std::vector<Eigen::Vector2d> dirs(steps);
  std::vector<double> grid(steps);
  for (int i = 0; i < steps; ++i) {
    grid[i] = 2.0 * std::numbers::pi * i / steps;
    dirs[i] = Eigen::Vector2d(std::cos(grid[i]), std::sin(grid[i]));
  }

  // The objective separates in (B1, B2) once (A1, A2) are fixed, so the full
  // four-angle grid maximum is found in O(steps^3).
  PseudospinOptimum best;
  best.chsh = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) {
      const Eigen::Vector2d w1 = t.transpose() * (dirs[i] + dirs[j]);
      const Eigen::Vector2d w2 = t.transpose() * (dirs[i] - dirs[j]);
      int k1 = 0, k2 = 0;
      for (int k = 1; k < steps; ++k) {
        if (dirs[k].dot(w1) > dirs[k1].dot(w1)) k1 = k;
        if (dirs[k].dot(w2) > dirs[k2].dot(w2)) k2 = k;
      }
      const double value = dirs[k1].dot(w1) + dirs[k2].dot(w2);
      if (value > best.chsh) {
        best.chsh = value;
        best.angles = {grid[i], grid[j], grid[k1], grid[k2]};
      }
    }

  // Coordinate ascent; each one-angle subproblem is a cos + sin maximization.
  auto& a = best.angles;
  const auto dir = [](double th) { return Eigen::Vector2d(std::cos(th), std::sin(th)); };
  const auto angle_of = [](const Eigen::Vector2d& w, double fallback) {
    return w.squaredNorm() > 0.0 ? std::atan2(w(1), w(0)) : fallback;
  };
  double value = chsh_from_correlations(t, a);
  for (int iter = 0; iter < 10000; ++iter) {
    const Eigen::Vector2d vsum = t * (dir(a[2]) + dir(a[3]));
    const Eigen::Vector2d vdiff = t * (dir(a[2]) - dir(a[3]));
    a[0] = angle_of(vsum, a[0]);
    a[1] = angle_of(vdiff, a[1]);
    const Eigen::Vector2d usum = t.transpose() * (dir(a[0]) + dir(a[1]));
    const Eigen::Vector2d udiff = t.transpose() * (dir(a[0]) - dir(a[1]));
    a[2] = angle_of(usum, a[2]);
    a[3] = angle_of(udiff, a[3]);
    const double next = chsh_from_correlations(t, a);
    const bool done = next - value <= 1e-15;
    value = std::max(value, next);
    if (done) break;
  }
  best.chsh = chsh_value(state, pseudospin_quadruple_dim(best.angles, mode_dim));
  return best;
}

SqueezedChsh chsh_for_squeeze(double r, int n_max, const WedgeChshOptions& opts) {
  const int d = pseudospin_mode_dim(n_max);
  const DensityState<double> state = tmsv_density(r, n_max, d);

  SqueezedChsh out;
  out.squeeze = r;
  out.pseudo = optimize_pseudospin(state, d, opts.grid_step_deg);
  out.beta_pseudo = out.pseudo.chsh;

  SeesawOptions<double> seesaw = opts.seesaw;
  seesaw.warm_starts.emplace_back(pseudospin_observable(out.pseudo.angles[2], d),
                                  pseudospin_observable(out.pseudo.angles[3], d));
  auto result = seesaw_maximize(state, BipartiteSplit(d, d), seesaw);
  out.beta_seesaw = result.chsh;
  out.seesaw_quadruple.emplace(std::move(result.quadruple));
  return out;
}

WedgeChsh wedge_chsh(const LatticeModel& model, const SmearingFunction& left, const SmearingFunction& right,
                     int n_max, const WedgeChshOptions& opts) {
  WedgeChsh out{reduce_two_modes(model, left, right), {}};
  out.chsh = chsh_for_squeeze(out.reduction.squeeze, n_max, opts);
  return out;
}

double translation_deviation(const LatticeModel& model, const SmearingFunction& left, const SmearingFunction& right,
                             int shift, int n_max, const std::vector<AdmissibleQuadruple<double>>& quadruples) {
  const SmearingFunction left_s = translate_smearing(model, left, shift);
  const SmearingFunction right_s = translate_smearing(model, right, shift);
  double dev = 0;
  dev = std::max(dev, std::abs(weyl_vacuum_expectation(model, left) - weyl_vacuum_expectation(model, left_s)));
  dev = std::max(dev, std::abs(weyl_vacuum_expectation(model, right) - weyl_vacuum_expectation(model, right_s)));

  const double r = reduce_two_modes(model, left, right).squeeze;
  const double r_s = reduce_two_modes(model, left_s, right_s).squeeze;
  dev = std::max(dev, std::abs(r - r_s));

  if (!quadruples.empty()) {
    const int d = static_cast<int>(quadruples.front().split().dim_a);
    const DensityState<double> state = tmsv_density(r, n_max, d);
    const DensityState<double> state_s = tmsv_density(r_s, n_max, d);
    for (const auto& q : quadruples) dev = std::max(dev, std::abs(chsh_value(state, q) - chsh_value(state_s, q)));
  }
  return dev;
}

}  // namespace bellcat::field
