#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace thinlayer {

template <class Real = double>
struct QuadratureRuleT {
  std::vector<Real> x, w;  // on [-1, 1]
};
using QuadratureRule = QuadratureRuleT<double>;

// Gauss-Legendre nodes by Newton iteration on P_m.
template <class Real = double>
QuadratureRuleT<Real> gauss_legendre(int m) {
  if (m < 1) throw DomainError("quadrature order must be positive");
  QuadratureRuleT<Real> q;
  q.x.resize(m);
  q.w.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    Real x = std::cos(std::numbers::pi_v<Real> * (i + Real(0.75)) / (m + Real(0.5))), dp = 0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1, p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1);
      const Real dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 4 * std::numeric_limits<Real>::epsilon()) break;
    }
    Real p0 = 1, p1 = x;
    for (int k = 2; k <= m; ++k) {
      const Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1, p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1);
    q.x[i] = -x;
    q.x[m - 1 - i] = x;
    q.w[i] = q.w[m - 1 - i] = 2 / ((1 - x * x) * dp * dp);
  }
  return q;
}

// Integrate f over [a, b] with `panels` equal panels of an m-point rule.
template <class F>
double integrate(F&& f, double a, double b, int m, int panels = 1) {
  const auto q = gauss_legendre(m);
  const double h = (b - a) / panels;
  double s = 0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int i = 0; i < m; ++i) s += q.w[i] * f(c + 0.5 * h * q.x[i]);
  }
  return 0.5 * h * s;
}

}  // namespace thinlayer
