#pragma once

// Periodic harmonic chain (lattice free scalar field), its Gaussian vacuum,
// wedge-shaped site intervals, lattice translations, the two-mode Gaussian
// reduction, truncated two-mode squeezed states and pseudospin observables.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bellcat/bell.hpp"

namespace bellcat::field {

class LatticeModel {
 public:
  /// Requires sites >= 8 and even, mass > 0, spacing > 0.
  LatticeModel(int sites, double mass, double spacing = 1.0);

  int sites() const { return sites_; }
  double mass() const { return mass_; }
  double spacing() const { return spacing_; }

  /// omega_k = sqrt(m^2 + (4 / a^2) sin^2(pi k / N)).
  double dispersion(int k) const;

 private:
  int sites_;
  double mass_;
  double spacing_;
};

enum class Side { Left, Right };

/// Cyclic site interval [start, start + length) on the ring.
class WedgeRegion {
 public:
  WedgeRegion(int sites, int start, int length, Side side);

  int sites() const { return sites_; }
  int start() const { return start_; }
  int length() const { return length_; }
  Side side() const { return side_; }

  bool contains(int site) const;
  bool overlaps(const WedgeRegion& other) const;
  /// True when the interval runs across the site N-1 -> 0 seam.
  bool wraps() const { return start_ + length_ > sites_; }
  WedgeRegion shifted(int shift) const;

 private:
  int sites_;
  int start_;
  int length_;
  Side side_;
};

struct WedgePair {
  WedgeRegion left;
  WedgeRegion right;
};

/// Two equal intervals separated by `gap` sites on both sides of the ring:
/// left = [0, L), right = [L + gap, 2L + gap), L = (N - 2 gap) / 2.
WedgePair complementary_wedges(const LatticeModel& model, int gap);

class SmearingFunction {
 public:
  /// Coefficients must have unit Euclidean norm and vanish outside `region`.
  SmearingFunction(Eigen::VectorXd coefficients, WedgeRegion region);

  /// Normalizes a profile; the profile must vanish outside the region.
  static SmearingFunction normalized(Eigen::VectorXd profile, WedgeRegion region);
  /// Unit peak on the `offset`-th site of the region (negative counts from the end).
  static SmearingFunction peak(const WedgeRegion& region, int offset);

  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  const WedgeRegion& region() const { return region_; }

 private:
  Eigen::VectorXd coefficients_;
  WedgeRegion region_;
};

/// Peaks on the two sites facing each other across the gap.
std::pair<SmearingFunction, SmearingFunction> boundary_smearings(const WedgePair& wedges);

struct VacuumCovariance {
  Eigen::MatrixXd phi;  // <phi_i phi_j>
  Eigen::MatrixXd pi;   // <pi_i pi_j> (symmetrized)
};

VacuumCovariance vacuum_covariance(const LatticeModel& model);

/// q(f, f) = 2 f^T G_phi f.
double vacuum_quadratic_form(const LatticeModel& model, const Eigen::VectorXd& f);

/// omega_0(W(f)) = exp(-q(f, f) / 4).
double weyl_vacuum_expectation(const LatticeModel& model, const Eigen::VectorXd& f);
double weyl_vacuum_expectation(const LatticeModel& model, const SmearingFunction& f);

SmearingFunction translate_smearing(const LatticeModel& model, const SmearingFunction& f, int shift);

struct StandardForm {
  double alpha = 1;
  double beta = 1;
  double c_plus = 0;
  double c_minus = 0;
};

using Covariance4 = Eigen::Matrix4d;

/// Symplectic form over (x_L, p_L, x_R, p_R).
Covariance4 symplectic_form();

/// Smallest eigenvalue of sigma + i Omega.
double uncertainty_margin(const Covariance4& sigma);

struct StandardFormReduction {
  StandardForm form;
  Covariance4 reduced;  // S sigma S^T
  Covariance4 local_symplectic;  // S = S_L (+) S_R
};

/// Local symplectic reduction of a two-mode covariance to
/// [[alpha 1, diag(c+, c-)], [diag(c+, c-), beta 1]], c+ >= |c-|.
StandardFormReduction to_standard_form(const Covariance4& sigma);

/// r = ln((a + c) / (a - c)) / 4 with a the mean of alpha, beta and c the
/// mean of |c+|, |c-|; exact for a pure two-mode squeezed covariance.
double squeeze_fit(const StandardForm& form);

struct GaussianReduction {
  Covariance4 covariance;  // 2 Re<R_i R_j>, vacuum = identity
  StandardForm standard_form;
  double squeeze = 0;
};

GaussianReduction reduce_two_modes(const LatticeModel& model, const SmearingFunction& left,
                                   const SmearingFunction& right);

/// Per-mode dimension used for pseudospin work: n_max + 1 rounded up to even.
int pseudospin_mode_dim(int n_max);

/// Normalized sum_{n <= n_max} tanh^n r |n, n>, optionally padded with empty
/// levels up to `mode_dim` per mode.
DensityState<double> tmsv_density(double r, int n_max, int mode_dim = -1);

/// cos(theta) s_z + sin(theta) s_x on a mode of even dimension.
ComplexMatrix pseudospin_observable(double theta, int mode_dim);

/// Requires n_max + 1 even.
AdmissibleQuadruple<double> pseudospin_quadruple(const std::array<double, 4>& angles, int n_max);
AdmissibleQuadruple<double> pseudospin_quadruple_dim(const std::array<double, 4>& angles, int mode_dim);

struct PseudospinOptimum {
  std::array<double, 4> angles{};  // A1, A2, B1, B2
  double chsh = 0;
};

/// Angle grid at `grid_step_deg` followed by exact coordinate ascent.
PseudospinOptimum optimize_pseudospin(const DensityState<double>& state, int mode_dim,
                                      double grid_step_deg = 10.0);

struct WedgeChshOptions {
  double grid_step_deg = 10.0;
  SeesawOptions<double> seesaw;
};

struct SqueezedChsh {
  double squeeze = 0;
  double beta_pseudo = 0;   // omega(C) over pseudospin quadruples
  double beta_seesaw = 0;   // omega(C) from the see-saw optimizer
  PseudospinOptimum pseudo;
  std::optional<AdmissibleQuadruple<double>> seesaw_quadruple;
};

/// CHSH optimization on tmsv_density(r, n_max) padded to pseudospin_mode_dim.
SqueezedChsh chsh_for_squeeze(double r, int n_max, const WedgeChshOptions& opts = {});

struct WedgeChsh {
  GaussianReduction reduction;
  SqueezedChsh chsh;
};

WedgeChsh wedge_chsh(const LatticeModel& model, const SmearingFunction& left, const SmearingFunction& right,
                     int n_max, const WedgeChshOptions& opts = {});

/// Largest change, under a lattice shift of both smearings, of: the two Weyl
/// vacuum expectations, the fitted squeeze, and the CHSH value of every
/// supplied quadruple on the fitted truncated state.
double translation_deviation(const LatticeModel& model, const SmearingFunction& left,
                             const SmearingFunction& right, int shift, int n_max,
                             const std::vector<AdmissibleQuadruple<double>>& quadruples);

}  // namespace bellcat::field
