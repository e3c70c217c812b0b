// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations used only by the tests. They share no code with
// the library: Bessel functions come from power series in 50-digit floating
// point, zeros from bisection on those series.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_50;

struct mpc {
  mp re = 0, im = 0;
  mpc() = default;
  mpc(mp r, mp i = 0) : re(std::move(r)), im(std::move(i)) {}
  mpc operator+(const mpc& o) const { return {re + o.re, im + o.im}; }
  mpc operator-(const mpc& o) const { return {re - o.re, im - o.im}; }
  mpc operator*(const mpc& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  mpc operator*(const mp& s) const { return {re * s, im * s}; }
  mpc operator/(const mpc& o) const {
    const mp d = o.re * o.re + o.im * o.im;
    return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
  }
  std::complex<double> to_double() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

inline mpc log(const mpc& z) {
  using boost::multiprecision::atan2;
  using boost::multiprecision::log;
  using boost::multiprecision::sqrt;
  return {log(sqrt(z.re * z.re + z.im * z.im)), atan2(z.im, z.re)};
}

struct JY {
  std::complex<double> j0, j1, y0, y1;
};

// Ascending series
//   J0 = sum (-t)^j / j!^2,  J1 = (z/2) sum (-t)^j / (j! (j+1)!),  t = z^2/4
//   Y0 = (2/pi)(ln(z/2) + gamma) J0 + (2/pi) sum_{j>=1} (-1)^(j+1) H_j t^j / j!^2
//   Y1 = (2/pi) ln(z/2) J1 - 2/(pi z)
//        - (1/pi)(z/2) sum_j (-t)^j (psi(j+1) + psi(j+2)) / (j! (j+1)!)
// Valid to |z| ~ 40 at 50 digits.
inline JY bessel_series(std::complex<double> zd) {
  const mp pi = boost::math::constants::pi<mp>();
  const mp euler = boost::math::constants::euler<mp>();
  const mpc z(mp(zd.real()), mp(zd.imag()));
  const mpc half = z * mp(0.5);
  const mpc t = half * half;
  const mpc mt = t * mp(-1);

  mpc j0(0), j1s(0), y0s(0), y1s(0);
  mpc term(1);  // (-t)^j / j!^2
  mpc term1(1);  // (-t)^j / (j! (j+1)!)
  mp harmonic = 0;
  mp psi1 = -euler;       // psi(j+1)
  mp psi2 = 1 - euler;    // psi(j+2)
  for (int j = 0; j < 400; ++j) {
    if (j > 0) {
      term = term * mt * (mp(1) / (mp(j) * mp(j)));
      term1 = term1 * mt * (mp(1) / (mp(j) * mp(j + 1)));
      harmonic += mp(1) / mp(j);
      psi1 += mp(1) / mp(j);
      psi2 += mp(1) / mp(j + 1);
    }
    j0 = j0 + term;
    j1s = j1s + term1;
    if (j > 0) y0s = y0s - term * harmonic;  // (-1)^(j+1) t^j = -(-t)^j
    y1s = y1s + term1 * (psi1 + psi2);
    const mp size = boost::multiprecision::abs(term.re) + boost::multiprecision::abs(term.im);
    if (j > 10 && size < mp("1e-60")) break;
  }
  const mpc j1 = half * j1s;
  const mpc lg = log(half);
  const mpc y0 = (lg + mpc(euler)) * j0 * (2 / pi) + y0s * (2 / pi);
  const mpc y1 = lg * j1 * (2 / pi) - mpc(mp(2) / pi) / z - half * y1s * (1 / pi);
  return {j0.to_double(), j1.to_double(), y0.to_double(), y1.to_double()};
}

// J_n(x) for real x and integer n >= 0 by the ascending series.
inline mp bessel_jn(int n, const mp& x) {
  const mp half = x / 2;
  const mp t = -(half * half);
  mp term = 1;
  for (int i = 1; i <= n; ++i) term *= half / i;
  mp sum = term;
  for (int j = 1; j < 500; ++j) {
    term *= t / (mp(j) * mp(j + n));
    sum += term;
    if (boost::multiprecision::abs(term) < mp("1e-55") * (1 + boost::multiprecision::abs(sum)) && j > 5)
      break;
  }
  return sum;
}

// Positive zeros of J_n below x_max by a sign scan and bisection.
inline std::vector<double> bessel_zeros(int n, double x_max) {
  std::vector<double> zeros;
  const double step = 0.02;
  mp prev = bessel_jn(n, mp(step));
  for (double x = 2 * step; x <= x_max + step; x += step) {
    const mp cur = bessel_jn(n, mp(x));
    if (prev * cur < 0) {
      mp lo = x - step, hi = x;
      mp flo = prev;
      for (int it = 0; it < 70; ++it) {
        const mp mid = (lo + hi) / 2;
        const mp fm = bessel_jn(n, mid);
        if (fm * flo <= 0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      const double z = static_cast<double>((lo + hi) / 2);
      if (z <= x_max) zeros.push_back(z);
    }
    prev = cur;
  }
  return zeros;
}

// Dirichlet eigen-wavenumbers of the disk of radius 1/2 in sector m,
// k = 2 j_{n,s} with n = m (mod 3), n in Z, listed with multiplicity.
inline std::vector<double> circle_levels(int m, double k_lo, double k_hi) {
  std::vector<double> out;
  for (int n = -60; n <= 60; ++n) {
    if (((n % 3) + 3) % 3 != m) continue;
    for (double z : bessel_zeros(std::abs(n), k_hi / 2.0)) {
      const double k = 2.0 * z;
      if (k >= k_lo && k <= k_hi) out.push_back(k);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Unit-mean sequences for the statistics tests.
inline std::vector<double> poisson_levels(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(1.0);
  std::vector<double> e(n);
  double x = 0.0;
  for (auto& v : e) v = (x += gap(rng));
  return e;
}

// Independent spacings drawn from the GOE surmise by inverting
// F(s) = 1 - exp(-pi s^2 / 4).
inline std::vector<double> surmise_levels(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> e(n);
  double x = 0.0;
  for (auto& v : e) {
    const double s = std::sqrt(-4.0 / std::numbers::pi * std::log1p(-u(rng)));
    v = (x += s);
  }
  return e;
}

}  // namespace oracle
