#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "tolerances.hpp"

namespace thinlayer {

using cplx = std::complex<double>;

namespace detail {

inline void check_args(int n, cplx z, int nmax = 64) {
  if (n < 0 || n > nmax) throw DomainError("spherical Bessel order out of range: " + std::to_string(n));
  if (!(std::abs(z) < 1e4)) throw DomainError("spherical Bessel argument too large (|z| >= 1e4)");
}

inline void check_magnitude(cplx v, int n) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) ||
      std::abs(v) > default_tolerances().bessel_magnitude_cap)
    throw NumericRangeError("spherical Bessel recurrence overflow at order " + std::to_string(n));
}

// Ascending series, good for |z| < 1 at any order.
inline cplx j_series(int n, cplx z) {
  cplx lead = 1.0;
  for (int k = 1; k <= n; ++k) lead *= z / double(2 * k + 1);
  const cplx q = -0.5 * z * z;
  cplx term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= q / (double(k) * double(2 * n + 2 * k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return lead * sum;
}

}  // namespace detail

// j_0..j_nmax. Miller's downward recurrence when |z| < nmax, upward otherwise.
inline std::vector<cplx> sph_bessel_j_all(int nmax, cplx z) {
  detail::check_args(nmax, z, 65);
  std::vector<cplx> j(nmax + 1);
  if (z == cplx(0)) {
    j[0] = 1.0;
    return j;
  }
  const double az = std::abs(z);
  if (az < 1.0) {
    for (int k = 0; k <= nmax; ++k) j[k] = detail::j_series(k, z);
    return j;
  }
  const cplx j0 = std::sin(z) / z;
  const cplx j1 = std::sin(z) / (z * z) - std::cos(z) / z;
  if (az >= nmax) {
    j[0] = j0;
    if (nmax >= 1) j[1] = j1;
    for (int k = 1; k < nmax; ++k) j[k + 1] = double(2 * k + 1) / z * j[k] - j[k - 1];
    for (auto& v : j) detail::check_magnitude(v, nmax);
    return j;
  }
  const int start = nmax + 20 + int(std::sqrt(40.0 * nmax)) + int(az);
  cplx fp1 = 0.0, f = 1e-30;
  for (int k = start; k >= 1; --k) {
    const cplx fm1 = double(2 * k + 1) / z * f - fp1;
    fp1 = f;
    f = fm1;
    if (k - 1 <= nmax) j[k - 1] = f;
    if (k <= nmax) j[k] = fp1;
    if (std::abs(f) > 1e200) {
      f *= 1e-200;
      fp1 *= 1e-200;
      for (int i = k - 1; i <= nmax; ++i) j[i] *= 1e-200;
    }
  }
  const cplx scale = std::abs(j0) >= std::abs(j1) ? j0 / j[0] : j1 / j[1];
  for (int k = 0; k <= nmax; ++k) {
    j[k] *= scale;
    if (j[k] == cplx(0) || std::abs(j[k]) < 1e-300)
      throw NumericRangeError("spherical Bessel j underflow at order " + std::to_string(k));
  }
  return j;
}

inline std::vector<cplx> sph_bessel_y_all(int nmax, cplx z) {
  detail::check_args(nmax, z, 65);
  if (z == cplx(0)) throw DomainError("y_n(0) is singular");
  std::vector<cplx> y(nmax + 1);
  y[0] = -std::cos(z) / z;
  if (nmax >= 1) y[1] = -std::cos(z) / (z * z) - std::sin(z) / z;
  for (int k = 1; k < nmax; ++k) {
    y[k + 1] = double(2 * k + 1) / z * y[k] - y[k - 1];
    detail::check_magnitude(y[k + 1], k + 1);
  }
  return y;
}

inline std::vector<cplx> sph_hankel1_all(int nmax, cplx z) {
  detail::check_args(nmax, z, 65);
  if (z == cplx(0)) throw DomainError("h_n(0) is singular");
  const cplx I(0, 1), e = std::exp(I * z);
  std::vector<cplx> h(nmax + 1);
  h[0] = -I * e / z;
  if (nmax >= 1) h[1] = -I * e / (z * z) - e / z;
  for (int k = 1; k < nmax; ++k) {
    h[k + 1] = double(2 * k + 1) / z * h[k] - h[k - 1];
    detail::check_magnitude(h[k + 1], k + 1);
  }
  return h;
}

inline cplx sph_bessel_j(int n, cplx z) {
  detail::check_args(n, z);
  return sph_bessel_j_all(n, z)[n];
}
inline cplx sph_bessel_y(int n, cplx z) {
  detail::check_args(n, z);
  return sph_bessel_y_all(n, z)[n];
}
inline cplx sph_hankel1(int n, cplx z) {
  detail::check_args(n, z);
  return sph_hankel1_all(n, z)[n];
}

enum class RadialKind { regular, second, outgoing };  // j_n, y_n, h_n^(1)

struct RadialValue {
  cplx f;   // z_n(x)
  cplx df;  // z_n'(x)
};

// z_n and its derivative from z_n' = z_{n-1} - (n+1) z_n / x  (z_0' = -z_1).
inline RadialValue radial_function(RadialKind kind, int n, cplx x) {
  detail::check_args(n, x);
  std::vector<cplx> s;
  switch (kind) {
    case RadialKind::regular: s = sph_bessel_j_all(n + 1, x); break;
    case RadialKind::second: s = sph_bessel_y_all(n + 1, x); break;
    case RadialKind::outgoing: s = sph_hankel1_all(n + 1, x); break;
  }
  if (n == 0) return {s[0], -s[1]};
  if (x == cplx(0)) return {s[n], n == 1 ? cplx(1.0 / 3.0) : cplx(0)};
  return {s[n], s[n - 1] - double(n + 1) / x * s[n]};
}

}  // namespace thinlayer
