#include <gtest/gtest.h>

#include <random>

#include "thinlayer/bessel.hpp"
#include "thinlayer/fit.hpp"
#include "thinlayer/linalg.hpp"
#include "thinlayer/parallel.hpp"
#include "thinlayer/quadrature.hpp"

using namespace thinlayer;
using lcplx = std::complex<long double>;

namespace {

// j_n(z) = z^n sum_k (-z^2/2)^k / (k! (2n+2k+1)!!)
cplx j_series_oracle(int n, cplx z, int terms = 40) {
  const lcplx zz(z.real(), z.imag());
  long double dfact = 1;
  for (int k = 1; k <= 2 * n + 1; k += 2) dfact *= k;
  lcplx term = std::pow(zz, n) / dfact, sum = term;
  for (int k = 1; k < terms; ++k) {
    term *= -zz * zz / (2.0L * k * (2 * n + 2 * k + 1));
    sum += term;
  }
  return {double(sum.real()), double(sum.imag())};
}

// y_n(z) = -(2n-1)!! / z^(n+1) sum_k (z^2/2)^k / (k! (1-2n)(3-2n)...(2k-1-2n)), finite part + the
// j-like tail is absent for half-integer order, so the ascending series is exact.
cplx y_series_oracle(int n, cplx z, int terms = 40) {
  const lcplx zz(z.real(), z.imag());
  long double dfact = 1;
  for (int k = 1; k <= 2 * n - 1; k += 2) dfact *= k;
  lcplx term = -dfact / std::pow(zz, n + 1), sum = term;
  for (int k = 1; k < terms; ++k) {
    term *= -zz * zz / (2.0L * k * (2 * k - 1 - 2 * n));
    sum += term;
  }
  return {double(sum.real()), double(sum.imag())};
}

}  // namespace

TEST(Bessel, ClosedFormsAtSmallOrder) {
  EXPECT_NEAR(sph_bessel_j(0, {1, 0}).real(), 0.8414709848078965, 1e-15);
  EXPECT_EQ(sph_bessel_j(1, {0, 0}), cplx(0));
  const cplx h = sph_hankel1(0, {1, 0});
  EXPECT_NEAR(h.real(), 0.8414709848, 1e-10);
  EXPECT_NEAR(h.imag(), -0.5403023059, 1e-10);
}

TEST(Bessel, SeriesOracleJ3) {
  const cplx z(2, 1), ref = j_series_oracle(3, z);
  EXPECT_LT(std::abs(sph_bessel_j(3, z) - ref), 1e-14 * std::abs(ref));
}

TEST(Bessel, SeriesOracleJ2Y2) {
  const cplx z(1, 2);
  const cplx j = j_series_oracle(2, z), y = y_series_oracle(2, z);
  EXPECT_LT(std::abs(sph_bessel_j(2, z) - j), 1e-13 * std::abs(j));
  EXPECT_LT(std::abs(sph_bessel_y(2, z) - y), 1e-13 * std::abs(y));
}

TEST(Bessel, SeriesOracleAcrossOrders) {
  for (cplx z : {cplx(0.3, 0.1), cplx(1.7, 0.4), cplx(3.0, 0.8), cplx(2.2, 2.0)})
    for (int n = 0; n <= 12; ++n) {
      const cplx ref = j_series_oracle(n, z, 60);
      EXPECT_LT(std::abs(sph_bessel_j(n, z) - ref), 1e-12 * std::abs(ref)) << n << " " << z;
    }
}

TEST(Bessel, Wronskian) {
  for (cplx z : {cplx(3, 0), cplx(1.4, 0.2), cplx(5.0, 1.0)})
    for (int n : {0, 2, 5, 8}) {
      const auto j = radial_function(RadialKind::regular, n, z);
      const auto y = radial_function(RadialKind::second, n, z);
      EXPECT_LT(std::abs(j.f * y.df - j.df * y.f - 1.0 / (z * z)) * std::norm(z), 1e-12) << n << " " << z;
    }
}

TEST(Bessel, ThreeTermRecurrence) {
  const cplx z(2.5, 0.7);
  const auto j = sph_bessel_j_all(20, z), y = sph_bessel_y_all(20, z), h = sph_hankel1_all(20, z);
  for (int n = 1; n < 20; ++n) {
    const double c = (2 * n + 1);
    EXPECT_LT(std::abs(j[n - 1] + j[n + 1] - c / z * j[n]), 1e-12 * (std::abs(j[n - 1]) + std::abs(j[n + 1]) + 1e-300));
    EXPECT_LT(std::abs(y[n - 1] + y[n + 1] - c / z * y[n]), 1e-12 * (std::abs(y[n - 1]) + std::abs(y[n + 1])));
    EXPECT_LT(std::abs(h[n] - (j[n] + cplx(0, 1) * y[n])), 1e-14 * std::abs(h[n]));
  }
}

TEST(Bessel, ConjugateSymmetry) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.05, 6.0);
  for (int t = 0; t < 50; ++t) {
    const cplx z(u(rng), u(rng) - 3.0);
    for (int n : {0, 1, 4, 9}) {
      const cplx a = sph_bessel_j(n, std::conj(z)), b = std::conj(sph_bessel_j(n, z));
      EXPECT_LE(std::abs(a - b), 1e-15 * std::abs(a));
    }
  }
}

TEST(Bessel, DerivativeMatchesFiniteDifference) {
  const cplx z(1.3, 0.2), dz(1e-6, 0);
  for (auto kind : {RadialKind::regular, RadialKind::second, RadialKind::outgoing})
    for (int n : {0, 1, 3}) {
      const cplx fd = (radial_function(kind, n, z + dz).f - radial_function(kind, n, z - dz).f) / (2.0 * dz);
      const cplx d = radial_function(kind, n, z).df;
      EXPECT_LT(std::abs(fd - d), 1e-8 * std::abs(d));
    }
}

TEST(Bessel, DomainAndRangeErrors) {
  EXPECT_THROW(sph_bessel_j(65, {1, 0}), DomainError);
  EXPECT_THROW(sph_bessel_j(-1, {1, 0}), DomainError);
  EXPECT_THROW(sph_bessel_y(2, {0, 0}), DomainError);
  EXPECT_THROW(sph_bessel_y(60, {1e-8, 0}), NumericRangeError);
}

TEST(Dense, IdentityReturnsRhs) {
  DenseSystem s(3);
  for (int i = 0; i < 3; ++i) s(i, i) = 1, s.b[i] = cplx(i + 1, -i);
  const auto x = solve_dense(s).x;
  for (int i = 0; i < 3; ++i) EXPECT_EQ(x[i], s.b[i]);
}

TEST(Dense, HandElimination2x2) {
  DenseSystem s(2);
  s(0, 0) = 1, s(0, 1) = cplx(0, 1), s(1, 0) = cplx(0, -1), s(1, 1) = 2;
  s.b = {1, 0};
  const auto sol = solve_dense(s);
  EXPECT_LT(std::abs(sol.x[0] - cplx(2)), 1e-15);
  EXPECT_LT(std::abs(sol.x[1] - cplx(0, 1)), 1e-15);
  EXPECT_LT(sol.residual, 1e-15);
}

TEST(Dense, RankDeficientIsIllConditioned) {
  DenseSystem s(2);
  s(0, 0) = 1, s(0, 1) = 2, s(1, 0) = 2, s(1, 1) = 4;
  s.b = {1, 1};
  EXPECT_THROW(solve_dense(s), IllConditionedError);
}

TEST(Dense, RandomSystemsWithPivoting) {
  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    const int k = 2 + t % 6;
    DenseSystem s(k);
    std::vector<cplx> x(k);
    for (auto& v : s.a) v = {g(rng), g(rng)};
    s(0, 0) = 0;  // forces a pivot swap
    for (auto& v : x) v = {g(rng), g(rng)};
    for (int i = 0; i < k; ++i) {
      s.b[i] = 0;
      for (int j = 0; j < k; ++j) s.b[i] += s(i, j) * x[j];
    }
    const auto sol = solve_dense(s);
    for (int i = 0; i < k; ++i) EXPECT_LT(std::abs(sol.x[i] - x[i]), 1e-10 * (1 + std::abs(x[i])));
  }
}

TEST(Banded, PlantedSolutionRecovered) {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  const int n = 60, kl = 2, ku = 3;
  BandedSystemT<double> a(n, kl, ku);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) a(i, j) = cplx(g(rng), g(rng));
  std::vector<cplx> x(n);
  for (auto& v : x) v = {g(rng), g(rng)};
  const auto b = a.multiply(x);
  const auto y = solve_banded(a, b);
  for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(y[i] - x[i]), 1e-9 * (1 + std::abs(x[i])));
  const auto z = solve_banded(a, std::vector<cplx>(n));
  for (auto& v : z) EXPECT_EQ(v, cplx(0));
}

TEST(Bordered, PlantedSolutionRecovered) {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  const int n = 40;
  BorderedSystemT<double> s(n, 1, 1, 1);
  for (int i = 0; i < n; ++i) {
    s.a(i, i) = cplx(4 + g(rng), g(rng));
    if (i) s.a(i, i - 1) = g(rng);
    if (i + 1 < n) s.a(i, i + 1) = g(rng);
  }
  s.border_cols[0][n / 2] = 1, s.border_cols[0][n / 2 + 1] = -1;
  s.border_rows[0][n / 2] = 1, s.border_rows[0][n / 2 + 1] = -1;
  s.corner(0, 0) = cplx(0.25, 0.1);
  std::vector<cplx> x(n), l{cplx(0.7, -0.2)};
  for (auto& v : x) v = {g(rng), g(rng)};
  std::vector<cplx> yx, yl;
  s.multiply(x, l, yx, yl);
  s.f = yx;
  s.corner.b = yl;
  const auto sol = solve_bordered(s);
  for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(sol.x[i] - x[i]), 1e-11);
  EXPECT_LT(std::abs(sol.l[0] - l[0]), 1e-11);
  EXPECT_LT(sol.residual, 1e-13);
}

TEST(Bordered, SingularSchurBlockNamed) {
  BorderedSystemT<double> s(4, 0, 0, 1);
  for (int i = 0; i < 4; ++i) s.a(i, i) = 1;
  try {
    solve_bordered(s);
    FAIL();
  } catch (const IllConditionedError& e) {
    EXPECT_EQ(e.block, "multiplier");
  }
}

TEST(Fit, ExactPowerLaws) {
  EXPECT_NEAR(fit_loglog_slope({{0.1, 0.01}, {0.05, 0.0025}, {0.025, 0.000625}}), 2.0, 1e-12);
  EXPECT_NEAR(fit_loglog_slope({{0.1, 0.3}, {0.05, 0.15}, {0.025, 0.075}}), 1.0, 1e-12);
}

TEST(Fit, NoisyQuadratic) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int t = 0; t < 200; ++t) {
    std::vector<ConvergencePoint> p;
    for (double e : {0.1, 0.05, 0.025, 0.0125}) p.push_back({e, e * e * (1 + u(rng))});
    const double s = fit_loglog_slope(p);
    EXPECT_GE(s, 1.8);
    EXPECT_LE(s, 2.2);
  }
}

TEST(Fit, RejectsBadInput) {
  EXPECT_THROW(fit_loglog_slope({{0.1, 1}, {0.05, 1}}), DomainError);
  EXPECT_THROW(fit_loglog_slope({{0.1, 1}, {0.1, 2}, {0.05, 1}}), DomainError);
  EXPECT_THROW(fit_loglog_slope({{0.1, 0}, {0.05, 1}, {0.02, 1}}), DomainError);
}

TEST(Quadrature, ExactForPolynomials) {
  const auto q = gauss_legendre(8);
  for (int d = 0; d <= 15; ++d) {
    double s = 0;
    for (size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * std::pow(q.x[i], d);
    EXPECT_NEAR(s, d % 2 ? 0.0 : 2.0 / (d + 1), 1e-14) << d;
  }
}

TEST(Parallel, LowestFailingIndexWins) {
  for (unsigned w : {1u, 2u, 8u}) {
    try {
      parallel_for(
          100, [](size_t i) { if (i % 7 == 3) throw std::runtime_error(std::to_string(i)); }, w);
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "3");
    }
  }
}

TEST(Parallel, EveryIndexVisitedOnce) {
  std::vector<int> hits(1000);
  parallel_for(hits.size(), [&](size_t i) { hits[i] += 1; }, 6);
  for (int h : hits) EXPECT_EQ(h, 1);
}
