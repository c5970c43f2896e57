#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "tolerances.hpp"

namespace thinlayer {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

template <class T>
double norm2(const std::vector<std::complex<T>>& v) {
  long double s = 0;
  for (auto& x : v) s += std::norm(std::complex<long double>(x));
  return double(std::sqrt(s));
}

// Small square system, row-major.
template <class T = double>
struct DenseSystemT {
  using C = std::complex<T>;
  int k = 0;
  std::vector<C> a;  // k*k
  std::vector<C> b;  // k
  explicit DenseSystemT(int dim = 0) : k(dim), a(size_t(dim) * dim), b(dim) {}
  C& operator()(int i, int j) { return a[size_t(i) * k + j]; }
  C operator()(int i, int j) const { return a[size_t(i) * k + j]; }
};
using DenseSystem = DenseSystemT<double>;

template <class T = double>
struct DenseSolutionT {
  std::vector<std::complex<T>> x;
  double condition = 0;  // 1-norm condition number
  double residual = 0;   // ||Ax-b|| / ||b||
};
using DenseSolution = DenseSolutionT<double>;

namespace detail {

// In-place LU with partial pivoting (whole rows swapped); false on an exact zero pivot.
template <class C>
bool lu_factor(int k, std::vector<C>& a, std::vector<int>& piv) {
  piv.resize(k);
  for (int c = 0; c < k; ++c) {
    int p = c;
    for (int r = c + 1; r < k; ++r)
      if (std::abs(a[size_t(r) * k + c]) > std::abs(a[size_t(p) * k + c])) p = r;
    piv[c] = p;
    if (a[size_t(p) * k + c] == C(0)) return false;
    if (p != c)
      for (int j = 0; j < k; ++j) std::swap(a[size_t(p) * k + j], a[size_t(c) * k + j]);
    for (int r = c + 1; r < k; ++r) {
      const C m = a[size_t(r) * k + c] / a[size_t(c) * k + c];
      a[size_t(r) * k + c] = m;
      for (int j = c + 1; j < k; ++j) a[size_t(r) * k + j] -= m * a[size_t(c) * k + j];
    }
  }
  return true;
}

template <class C>
void lu_solve(int k, const std::vector<C>& lu, const std::vector<int>& piv, C* x) {
  // rows were swapped whole, so L is in final order: permute first
  for (int c = 0; c < k; ++c) std::swap(x[c], x[piv[c]]);
  for (int c = 0; c < k; ++c)
    for (int r = c + 1; r < k; ++r) x[r] -= lu[size_t(r) * k + c] * x[c];
  for (int r = k - 1; r >= 0; --r) {
    for (int j = r + 1; j < k; ++j) x[r] -= lu[size_t(r) * k + j] * x[j];
    x[r] /= lu[size_t(r) * k + r];
  }
}

template <class C>
double norm1(int k, const std::vector<C>& a) {
  double m = 0;
  for (int j = 0; j < k; ++j) {
    double s = 0;
    for (int i = 0; i < k; ++i) s += double(std::abs(a[size_t(i) * k + j]));
    m = std::max(m, s);
  }
  return m;
}

}  // namespace detail

// 1-norm condition from the explicit inverse (cheap and exact at these sizes).
template <class T>
DenseSolutionT<T> solve_dense(const DenseSystemT<T>& sys, double cap = default_tolerances().condition_cap) {
  using C = std::complex<T>;
  const int k = sys.k;
  if (k < 1) throw DomainError("empty dense system");
  std::vector<C> lu = sys.a;
  std::vector<int> piv;
  const double anorm = detail::norm1(k, sys.a);
  if (!detail::lu_factor(k, lu, piv) || anorm == 0) throw IllConditionedError("singular dense system", INFINITY);
  std::vector<C> inv(size_t(k) * k), col(k);
  for (int j = 0; j < k; ++j) {
    std::fill(col.begin(), col.end(), C(0));
    col[j] = 1;
    detail::lu_solve(k, lu, piv, col.data());
    for (int i = 0; i < k; ++i) inv[size_t(i) * k + j] = col[i];
  }
  DenseSolutionT<T> out;
  out.condition = anorm * detail::norm1(k, inv);
  if (!(out.condition <= cap))
    throw IllConditionedError("ill-conditioned dense system (condition " + std::to_string(out.condition) + ")",
                              out.condition);
  out.x = sys.b;
  detail::lu_solve(k, lu, piv, out.x.data());
  std::vector<C> r(k);
  for (int i = 0; i < k; ++i) {
    r[i] = -sys.b[i];
    for (int j = 0; j < k; ++j) r[i] += sys(i, j) * out.x[j];
  }
  const double bn = norm2(sys.b);
  out.residual = bn > 0 ? norm2(r) / bn : norm2(r);
  return out;
}

// Column-equilibrated solve; returns the solution of the original system and the
// condition number of the scaled one.
inline DenseSolution solve_dense_equilibrated(const DenseSystem& s, double cap = default_tolerances().condition_cap) {
  DenseSystem t = s;
  std::vector<double> scale(s.k, 1.0);
  for (int j = 0; j < s.k; ++j) {
    double m = 0;
    for (int i = 0; i < s.k; ++i) m = std::max(m, std::abs(s(i, j)));
    if (m > 0) scale[j] = 1.0 / m;
    for (int i = 0; i < s.k; ++i) t(i, j) *= scale[j];
  }
  DenseSolution out = solve_dense(t, cap);
  for (int j = 0; j < s.k; ++j) out.x[j] *= scale[j];
  CVector r(s.k);
  for (int i = 0; i < s.k; ++i) {
    r[i] = -s.b[i];
    for (int j = 0; j < s.k; ++j) r[i] += s(i, j) * out.x[j];
  }
  const double bn = norm2(s.b);
  out.residual = bn > 0 ? norm2(r) / bn : norm2(r);
  return out;
}

template <class T>
class BandedLUT;

// General band matrix with kl sub- and ku super-diagonals; storage keeps kl extra
// super-diagonals for pivoting fill-in.
template <class T = double>
class BandedSystemT {
 public:
  using C = std::complex<T>;
  BandedSystemT(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), d_(size_t(n) * ld_) {}

  int dim() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }
  bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

  C& operator()(int i, int j) {
    if (!in_band(i, j)) throw DomainError("banded entry outside bandwidth");
    return at(i, j);
  }
  C operator()(int i, int j) const { return in_band(i, j) ? at(i, j) : C(0); }

  std::vector<C> multiply(const std::vector<C>& x) const {
    std::vector<C> y(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) y[i] += at(i, j) * x[j];
    return y;
  }

 private:
  friend class BandedLUT<T>;
  C& at(int i, int j) { return d_[size_t(i) * ld_ + (j - i + kl_)]; }
  C at(int i, int j) const { return d_[size_t(i) * ld_ + (j - i + kl_)]; }
  int n_, kl_, ku_, ld_;
  std::vector<C> d_;
};
using BandedSystem = BandedSystemT<double>;

template <class T = double>
class BandedLUT {
 public:
  using C = std::complex<T>;
  explicit BandedLUT(BandedSystemT<T> a) : a_(std::move(a)), piv_(a_.n_) {
    const int n = a_.n_, kl = a_.kl_, uw = a_.ku_ + a_.kl_;
    T scale = 0;
    for (auto& v : a_.d_) scale = std::max(scale, std::abs(v));
    for (int c = 0; c < n; ++c) {
      const int rmax = std::min(n - 1, c + kl);
      int p = c;
      for (int r = c + 1; r <= rmax; ++r)
        if (std::abs(a_.at(r, c)) > std::abs(a_.at(p, c))) p = r;
      piv_[c] = p;
      if (!(std::abs(a_.at(p, c)) > T(1e-15) * scale))
        throw IllConditionedError("singular banded block at column " + std::to_string(c), INFINITY, "field");
      const int jmax = std::min(n - 1, c + uw);
      if (p != c)
        for (int j = c; j <= jmax; ++j) std::swap(a_.at(p, j), a_.at(c, j));
      for (int r = c + 1; r <= rmax; ++r) {
        const C m = a_.at(r, c) / a_.at(c, c);
        a_.at(r, c) = m;
        if (m != C(0))
          for (int j = c + 1; j <= jmax; ++j) a_.at(r, j) -= m * a_.at(c, j);
      }
    }
  }

  // LINPACK order: the multipliers stay with their elimination step.
  void solve_in_place(std::vector<C>& x) const {
    const int n = a_.n_, kl = a_.kl_, uw = a_.ku_ + a_.kl_;
    for (int c = 0; c < n; ++c) {
      std::swap(x[c], x[piv_[c]]);
      for (int r = c + 1; r <= std::min(n - 1, c + kl); ++r) x[r] -= a_.at(r, c) * x[c];
    }
    for (int r = n - 1; r >= 0; --r) {
      for (int j = r + 1; j <= std::min(n - 1, r + uw); ++j) x[r] -= a_.at(r, j) * x[j];
      x[r] /= a_.at(r, r);
    }
  }

 private:
  BandedSystemT<T> a_;
  std::vector<int> piv_;
};
using BandedLU = BandedLUT<double>;

template <class T>
std::vector<std::complex<T>> solve_banded(const BandedSystemT<T>& a, std::vector<std::complex<T>> b) {
  BandedLUT<T> lu(a);
  lu.solve_in_place(b);
  return b;
}

// [A  Bc] [x]   [f]
// [Cr  D] [l] = [g]   A banded, k-wide border.
template <class T = double>
struct BorderedSystemT {
  using C = std::complex<T>;
  BandedSystemT<T> a;
  int k;
  std::vector<std::vector<C>> border_cols;  // k columns of length n
  std::vector<std::vector<C>> border_rows;  // k rows of length n
  DenseSystemT<T> corner;                   // k x k, corner.b holds g
  std::vector<C> f;

  BorderedSystemT(int n, int kl, int ku, int kb)
      : a(n, kl, ku), k(kb), border_cols(kb, std::vector<C>(n)), border_rows(kb, std::vector<C>(n)), corner(kb), f(n) {}

  void multiply(const std::vector<C>& x, const std::vector<C>& l, std::vector<C>& yx, std::vector<C>& yl) const {
    yx = a.multiply(x);
    for (int q = 0; q < k; ++q)
      for (int i = 0; i < a.dim(); ++i) yx[i] += border_cols[q][i] * l[q];
    yl.assign(k, C(0));
    for (int p = 0; p < k; ++p) {
      for (int i = 0; i < a.dim(); ++i) yl[p] += border_rows[p][i] * x[i];
      for (int q = 0; q < k; ++q) yl[p] += corner(p, q) * l[q];
    }
  }
};
using BorderedSystem = BorderedSystemT<double>;

template <class T = double>
struct BorderedSolutionT {
  std::vector<std::complex<T>> x, l;
  double schur_condition = 0;  // 0 when there is no border
  double residual = 0;
};

// Schur-complement solve through the banded factorization.
template <class T>
BorderedSolutionT<T> solve_bordered(const BorderedSystemT<T>& s, double cap = default_tolerances().condition_cap) {
  using C = std::complex<T>;
  const int n = s.a.dim();
  BorderedSolutionT<T> out;
  const BandedLUT<T> lu(s.a);
  out.x = s.f;
  lu.solve_in_place(out.x);
  if (s.k > 0) {
    auto z = s.border_cols;
    for (auto& c : z) lu.solve_in_place(c);
    DenseSystemT<T> schur(s.k);
    for (int p = 0; p < s.k; ++p) {
      schur.b[p] = s.corner.b[p];
      for (int i = 0; i < n; ++i) schur.b[p] -= s.border_rows[p][i] * out.x[i];
      for (int q = 0; q < s.k; ++q) {
        C v = s.corner(p, q);
        for (int i = 0; i < n; ++i) v -= s.border_rows[p][i] * z[q][i];
        schur(p, q) = v;
      }
    }
    DenseSolutionT<T> ls;
    try {
      ls = solve_dense(schur, cap);
    } catch (const IllConditionedError& e) {
      throw IllConditionedError(std::string("multiplier (Schur) block: ") + e.what(), e.condition, "multiplier");
    }
    out.l = ls.x;
    out.schur_condition = ls.condition;
    for (int q = 0; q < s.k; ++q)
      for (int i = 0; i < n; ++i) out.x[i] -= z[q][i] * out.l[q];
  }
  std::vector<C> yx, yl, l = out.l;
  l.resize(s.k);
  s.multiply(out.x, l, yx, yl);
  for (int i = 0; i < n; ++i) yx[i] -= s.f[i];
  for (int p = 0; p < s.k; ++p) yl[p] -= s.corner.b[p];
  const double rn = std::hypot(norm2(yx), norm2(yl));
  const double bn = std::hypot(norm2(s.f), norm2(s.corner.b));
  out.residual = bn > 0 ? rn / bn : rn;
  return out;
}

}  // namespace thinlayer
