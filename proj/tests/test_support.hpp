#pragma once

// Test-only oracles. None of these go through bellcat's solvers: they use
// closed-form 2x2 spectra, power iteration, or plain loops, so they can check
// the library independently.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "bellcat/linalg.hpp"

namespace bellcat::testing {

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Largest singular value by power iteration on M*M.
inline double power_norm(const ComplexMatrix& m, int iters = 2000) {
  ComplexVector v = ComplexVector::Ones(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::complex<double>(1.0 + 0.1 * i, 0.05 * i);
  v.normalize();
  double estimate = 0;
  for (int it = 0; it < iters; ++it) {
    ComplexVector w = m.adjoint() * (m * v);
    const double n = w.norm();
    if (n == 0) return 0;
    v = w / n;
    estimate = std::sqrt(n);
  }
  return estimate;
}

/// Eigenvalues of a 2x2 Hermitian matrix from the characteristic polynomial.
inline std::pair<double, double> eig2(const ComplexMatrix& h) {
  const double a = h(0, 0).real(), d = h(1, 1).real();
  const double disc = std::sqrt((a - d) * (a - d) + 4.0 * std::norm(h(0, 1)));
  return {(a + d - disc) / 2, (a + d + disc) / 2};
}

inline double trace_norm2(const ComplexMatrix& h) {
  const auto [lo, hi] = eig2(h);
  return std::abs(lo) + std::abs(hi);
}

/// Dichotomic qubit observable on the x-z great circle.
inline ComplexMatrix xz_observable(double theta) {
  ComplexMatrix m(2, 2);
  m << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
  return m;
}

/// Brute-force CHSH maximum for a two-qubit state: A1, A2 range over a
/// 1-degree grid on the x-z circle plus +-1; for fixed A's the best B's with
/// spectrum in [-1, 1] give the trace norm of the partial expectations.
inline double chsh_grid_max(const ComplexMatrix& rho, double step_deg = 1.0) {
  const int steps = static_cast<int>(std::lround(360.0 / step_deg));
  std::vector<ComplexMatrix> options;
  for (int i = 0; i < steps; ++i) options.push_back(xz_observable(2 * std::numbers::pi * i / steps));
  options.push_back(ComplexMatrix::Identity(2, 2));
  options.push_back(-ComplexMatrix::Identity(2, 2));

  // reduced(X)(k, l) = sum_{i,j} X(j, i) rho(i*2 + k, j*2 + l) = Tr_A[rho (X (x) 1)]
  const auto reduced = [&](const ComplexMatrix& x) {
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) out(k, l) += x(j, i) * rho(i * 2 + k, j * 2 + l);
    return ComplexMatrix((out + out.adjoint()) / 2.0);
  };
  double best = -1e300;
  for (const auto& a1 : options)
    for (const auto& a2 : options) {
      const double v = trace_norm2(reduced(a1 + a2)) + trace_norm2(reduced(a1 - a2));
      best = std::max(best, v);
    }
  return best;
}

inline ComplexMatrix singlet_density() {
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  rho(1, 1) = rho(2, 2) = 0.5;
  rho(1, 2) = rho(2, 1) = -0.5;
  return rho;
}

inline double sqrt2() { return std::sqrt(2.0); }

}  // namespace bellcat::testing
