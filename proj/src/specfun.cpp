// SPDX-License-Identifier: Apache-2.0
#include "c3b/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "c3b/error.hpp"

namespace c3b::specfun {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr double euler_gamma = std::numbers::egamma;
constexpr double inv_pi = std::numbers::inv_pi;
constexpr cplx I{0.0, 1.0};

}  // namespace

namespace detail {

BesselJY01 series(cplx z) {
  const cplx q = 0.25 * z * z;  // z^2/4
  const cplx mq = -q;

  // t0_k = (-q)^k/(k!)^2, t1_k = (-q)^k/(k!(k+1)!)
  cplx t0 = 1.0, t1 = 1.0;
  cplx j0 = 1.0, j1 = 1.0;
  cplx y0sum = 0.0;
  cplx y1sum = -2.0 * euler_gamma + 1.0;  // psi(1)+psi(2) = -2 gamma + 1
  double mag = 1.0;
  double harmonic = 0.0;  // H_k
  for (int k = 1; k < 200; ++k) {
    const double dk = k;
    t0 *= mq / (dk * dk);
    t1 *= mq / (dk * (dk + 1.0));
    harmonic += 1.0 / dk;
    j0 += t0;
    j1 += t1;
    y0sum += -harmonic * t0;  // (-1)^{k+1} H_k q^k/(k!)^2
    // psi(k+1)+psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
    y1sum += (-2.0 * euler_gamma + 2.0 * harmonic + 1.0 / (dk + 1.0)) * t1;
    const double a = std::abs(t0) * (1.0 + harmonic);
    mag = std::max(mag, a);
    if (a < 1e-18 * std::max(1.0, std::abs(j0)) && std::abs(t1) * (2.0 + 2.0 * harmonic) < 1e-18) {
      break;
    }
  }
  const cplx half_z = 0.5 * z;
  j1 *= half_z;
  const cplx logterm = std::log(half_z);

  BesselJY01 r;
  r.j0 = j0;
  r.j1 = j1;
  r.y0 = 2.0 * inv_pi * ((logterm + euler_gamma) * j0 + y0sum);
  r.y1 = -2.0 * inv_pi / z + 2.0 * inv_pi * logterm * j1 - inv_pi * half_z * y1sum;
  const double scale = std::max(std::abs(r.h0()), 1e-300);
  r.est_error = 8.0 * eps * mag * (1.0 + std::abs(logterm)) / scale;
  return r;
}

BesselJY01 miller(cplx z) {
  const double az = std::abs(z);
  int top = static_cast<int>(az) + 40;
  if (top % 2 != 0) ++top;

  std::array<cplx, 128> j{};
  cplx next = 0.0;
  cplx cur = 1e-30;
  j[static_cast<std::size_t>(top)] = cur;
  const cplx two_over_z = 2.0 / z;
  for (int n = top; n >= 1; --n) {
    const cplx prev = static_cast<double>(n) * two_over_z * cur - next;
    next = cur;
    cur = prev;
    j[static_cast<std::size_t>(n - 1)] = cur;
    if (std::abs(cur) > 1e250) {
      for (int m = n - 1; m <= top; ++m) j[static_cast<std::size_t>(m)] *= 1e-250;
      next *= 1e-250;
      cur *= 1e-250;
    }
  }
  cplx norm = j[0];
  for (int n = 2; n <= top; n += 2) norm += 2.0 * j[static_cast<std::size_t>(n)];
  for (int n = 0; n <= top; ++n) j[static_cast<std::size_t>(n)] /= norm;

  cplx s0 = 0.0, s1 = 0.0;
  for (int k = 1; 2 * k + 1 <= top; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const auto ik = static_cast<std::size_t>(2 * k);
    s0 += sign * j[ik] / static_cast<double>(k);
    s1 += sign * (j[ik - 1] - j[ik + 1]) / static_cast<double>(k);
  }
  const cplx logterm = std::log(0.5 * z) + euler_gamma;

  BesselJY01 r;
  r.j0 = j[0];
  r.j1 = j[1];
  r.y0 = 2.0 * inv_pi * (logterm * r.j0) - 4.0 * inv_pi * s0;
  r.y1 = 2.0 * inv_pi * (logterm * r.j1 - r.j0 / z) + 2.0 * inv_pi * s1;
  r.est_error = 64.0 * eps * std::exp(std::abs(z.imag()));
  return r;
}

BesselJY01 asymptotic(cplx z) {
  // a_k(nu)/z^k recursion with mu = 4 nu^2
  const cplx inv8z = 1.0 / (8.0 * z);
  cplx p0 = 1.0, q0 = 0.0, p1 = 1.0, q1 = 0.0;
  cplx t0 = 1.0, t1 = 1.0;
  double last = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    t0 *= (0.0 - odd * odd) * inv8z / static_cast<double>(k);
    t1 *= (4.0 - odd * odd) * inv8z / static_cast<double>(k);
    const double mag = std::max(std::abs(t0), std::abs(t1));
    if (mag > last && k > 2) break;  // series starts to diverge
    // P = sum (-1)^j a_{2j} z^{-2j}, Q = sum (-1)^j a_{2j+1} z^{-(2j+1)}
    const int j = k / 2;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p0 += sign * t0;
      p1 += sign * t1;
    } else {
      q0 += sign * t0;
      q1 += sign * t1;
    }
    last = mag;
    if (mag < 0.25 * eps) break;
  }

  constexpr double quarter_pi = 0.25 * std::numbers::pi;
  const cplx amp = std::sqrt(2.0 * inv_pi / z);
  const cplx chi0 = z - quarter_pi;
  const cplx e0 = std::exp(I * chi0);
  const cplx e0inv = 1.0 / e0;
  // chi1 = chi0 - pi/2  =>  e^{i chi1} = -i e^{i chi0}
  const cplx e1 = -I * e0;
  const cplx e1inv = I * e0inv;

  const cplx h0 = amp * (p0 + I * q0) * e0;
  const cplx h0b = amp * (p0 - I * q0) * e0inv;
  const cplx h1 = amp * (p1 + I * q1) * e1;
  const cplx h1b = amp * (p1 - I * q1) * e1inv;

  BesselJY01 r;
  r.j0 = 0.5 * (h0 + h0b);
  r.y0 = -0.5 * I * (h0 - h0b);
  r.j1 = 0.5 * (h1 + h1b);
  r.y1 = -0.5 * I * (h1 - h1b);
  r.est_error = std::max(last, 4.0 * eps);
  return r;
}

}  // namespace detail

BesselJY01 bessel_jy01(cplx z, double imag_bound) {
  const double az = std::abs(z);
  if (az == 0.0) throw DomainError("Bessel Y and Hankel functions are singular at z = 0");
  BesselJY01 r;
  if (az <= series_limit) {
    r = detail::series(z);
  } else if (az < asymptotic_limit) {
    r = detail::miller(z);
  } else {
    r = detail::asymptotic(z);
  }
  r.accuracy_warning = std::abs(z.imag()) > imag_bound || z.real() <= 0.0 || r.est_error > 1e-10;
  return r;
}

ComplexEval hankel1(int order, cplx z, double imag_bound) {
  if (order != 0 && order != 1) throw DomainError("hankel1 supports orders 0 and 1 only");
  const BesselJY01 b = bessel_jy01(z, imag_bound);
  return {order == 0 ? b.h0() : b.h1(), b.est_error, b.accuracy_warning};
}

}  // namespace c3b::specfun
