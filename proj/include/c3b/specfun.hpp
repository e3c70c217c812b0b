// SPDX-License-Identifier: Apache-2.0
//
// Bessel and Hankel functions of order 0 and 1 for complex argument with
// small imaginary part, as needed by Helmholtz kernels evaluated at complex
// wavenumbers on a contour close to the real axis.
//
// Regimes (|z|):
//   [0, 12]   ascending power series
//   (12, 30)  Miller backward recurrence for J_n, Neumann series for Y_0, Y_1
//   [30, inf) Hankel asymptotic expansion with term-size error control

#pragma once

#include <complex>

namespace c3b::specfun {

using cplx = std::complex<double>;

inline constexpr double series_limit = 12.0;
inline constexpr double asymptotic_limit = 30.0;
/// |Im z| up to which accuracy has been validated.
inline constexpr double default_imag_bound = 1.0;

struct ComplexEval {
  cplx value;
  /// Estimated relative error.
  double est_error = 0.0;
  /// Set when z lies outside the validated region.
  bool accuracy_warning = false;
};

/// J_0, J_1, Y_0, Y_1 at one argument.
struct BesselJY01 {
  cplx j0, j1, y0, y1;
  double est_error = 0.0;
  bool accuracy_warning = false;

  cplx h0() const noexcept { return {j0.real() - y0.imag(), j0.imag() + y0.real()}; }
  cplx h1() const noexcept { return {j1.real() - y1.imag(), j1.imag() + y1.real()}; }
};

/// All four functions at z. Throws DomainError at z = 0.
BesselJY01 bessel_jy01(cplx z, double imag_bound = default_imag_bound);

/// H^(1)_order(z) for order 0 or 1.
ComplexEval hankel1(int order, cplx z, double imag_bound = default_imag_bound);

namespace detail {
// Regime implementations, exposed for seam tests.
BesselJY01 series(cplx z);
BesselJY01 miller(cplx z);
BesselJY01 asymptotic(cplx z);
}  // namespace detail

}  // namespace c3b::specfun
