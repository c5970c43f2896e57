#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "asymptotic.hpp"
#include "linalg.hpp"
#include "media.hpp"
#include "modes.hpp"
#include "quadrature.hpp"

namespace thinlayer {

// Radial mesh on [r_min, r_out]; r_gamma is a vertex carrying two traces.
struct RadialMesh {
  int order = 2;
  std::vector<double> cytoplasm;  // vertices r_min .. r_gamma
  std::vector<double> exterior;   // vertices r_gamma .. r_out

  int elements() const { return int(cytoplasm.size() + exterior.size()) - 2; }
  double r_min() const { return cytoplasm.front(); }
};

inline RadialMesh make_radial_mesh(const LayeredSphereGeometry& g, int elements, int order, double r_min = -1) {
  if (order != 1 && order != 2) throw DomainError("element order must be 1 or 2");
  if (r_min <= 0) r_min = g.r_gamma / 50;
  if (r_min > g.r_gamma / 50 * (1 + 1e-12)) throw DomainError("r_min must not exceed r_gamma/50");
  if (elements < 2) throw DomainError("need at least two elements");
  const double L = g.r_out - r_min;
  const int nc = std::clamp(int(std::lround(elements * (g.r_gamma - r_min) / L)), 1, elements - 1);
  const int ne = elements - nc;
  RadialMesh m;
  m.order = order;
  for (int i = 0; i <= nc; ++i) m.cytoplasm.push_back(i == nc ? g.r_gamma : r_min + (g.r_gamma - r_min) * i / nc);
  for (int i = 0; i <= ne; ++i) m.exterior.push_back(i == ne ? g.r_out : g.r_gamma + (g.r_out - g.r_gamma) * i / ne);
  return m;
}

// Per-mode reduction of the mixed formulation (unit-normalized harmonics, R = r_gamma):
//
// rotated E = u W, unknown v = r u (continuous P_p in each region):
//   sum_regions int (1/mu)(v' v~' + N v v~ / r^2) - (kappa^2/mu) v v~
//   - i (kappa_e/mu_e) v v~ |_{r_out}  +  R lambda [v~]
//   + eps (C N/R^2 - D) <v><v~>                       = (R_out/mu_e) s_inc v~(r_out)
//   lambda row:  R [v] - eps B R^2 lambda = 0
//
// gradient E = e_r Y r + e_t V, unknowns g = r e_t (continuous P_p), e_r (broken P_{p-1}):
//   int (1/mu)(sqrt(N) e_r - g')(sqrt(N) e_r~ - g~') - (kappa^2/mu)(r^2 e_r e_r~ + g g~)
//   - i (kappa_e/mu_e) g g~ |_{r_out}  -  R lambda [g~]
//   + eps E H (N/R) lambda <g~>  -  eps D <g><g~>     = -(R_out/mu_e) s_inc g~(r_out)
//   lambda row: -R [g] + eps (A N - B R^2) lambda = 0
//
// lambda is the mean of (1/mu) curl E x n on Gamma in the trace normalization of modes.hpp.
// Near the origin the region [0, r_min] is replaced by the exact Dirichlet-to-Neumann
// closure of the regular solution: +(beta/mu_c) v v~ (beta = v'/v), or
// -(beta/mu_c) g g~ (beta = r c / g) for the gradient family.
struct SaddleSystem {
  ModeIndex mode;
  Variant variant = Variant::general;
  // long double: the discrete operator's conditioning (~h^-2) would otherwise put a
  // rounding floor above the p = 2 discretization error on fine meshes
  BorderedSystemT<long double> sys{1, 0, 0, 0};
  int minus_dof = -1, plus_dof = -1;  // primary-trace dofs at Gamma-, Gamma+
  bool has_lambda = true;
  double r_gamma = 1;
};

struct FemSolution {
  ModeIndex mode;
  Variant variant = Variant::general;
  CVector x;
  std::optional<cplx> lambda;
  Traces minus, plus;  // te filled; th filled only from lambda where available (mean)
  double residual = 0;
  double schur_condition = 0;
};

namespace detail {

template <class Real>
struct Basis {
  std::vector<Real> v, d;  // values and d/dxi at a point
};

template <class Real>
Basis<Real> lagrange(int p, Real xi) {
  const Real h = Real(1) / 2;
  if (p == 1) return {{h * (1 - xi), h * (1 + xi)}, {-h, h}};
  return {{h * xi * (xi - 1), 1 - xi * xi, h * xi * (xi + 1)}, {xi - h, -2 * xi, xi + h}};
}

template <class Real>
std::vector<Real> legendre(int p, Real xi) {
  std::vector<Real> v{Real(1)};
  if (p >= 1) v.push_back(xi);
  return v;
}

}  // namespace detail

inline SaddleSystem assemble_mode(const ModeIndex& mode, Variant variant, const RadialMesh& mesh,
                                  const MediumTriple& md, const LayeredSphereGeometry& geom, double eps_layer,
                                  const Excitation& exc, const ModelOptions& opt = {}) {
  md.validate();
  const GitcConstants k = gitc_constants(md, opt.formulas);
  if (variant == Variant::general && k.B == cplx(0))
    throw PreconditionError("general mixed formulation assumes mu_m != mu_e (B != 0)");
  require_variant(variant, md);
  const int p = mesh.order, n = mode.degree;
  const double N = double(n) * (n + 1), R = geom.r_gamma, Ro = geom.r_out;
  const double H = opt.curvature_sign * mean_curvature(geom);
  const bool te = mode.family == Family::rotated;
  // rotated modes of the cell variant: B = 0 forces [v] = 0, so Gamma- and Gamma+ share a dof
  const bool merged = te && variant == Variant::cell;

  struct Elem {
    double a, b;
    int region;               // 0 cytoplasm, 1 exterior
    std::vector<int> g, e;    // continuous dofs (p+1), broken dofs (p, gradient family only)
  };
  std::vector<Elem> elems;
  int next = 0;
  int minus_dof = -1, plus_dof = -1;
  for (int region = 0; region < 2; ++region) {
    const auto& vs = region == 0 ? mesh.cytoplasm : mesh.exterior;
    int left;
    if (region == 0) {
      left = next++;
    } else {
      left = merged ? minus_dof : next++;
      plus_dof = left;
    }
    for (size_t i = 0; i + 1 < vs.size(); ++i) {
      Elem el{vs[i], vs[i + 1], region, {left}, {}};
      if (!te)
        for (int q = 0; q < p; ++q) el.e.push_back(next++);
      for (int q = 1; q < p; ++q) el.g.push_back(next++);
      const int right = next++;
      el.g.push_back(right);
      left = right;
      elems.push_back(el);
    }
    if (region == 0) minus_dof = left;
  }
  const int ndof = next;
  int bw = 1;
  for (auto& el : elems) {
    int lo = el.g.front(), hi = el.g.front();
    for (int d : el.g) lo = std::min(lo, d), hi = std::max(hi, d);
    for (int d : el.e) lo = std::min(lo, d), hi = std::max(hi, d);
    bw = std::max(bw, hi - lo);
  }
  bw = std::max(bw, std::abs(plus_dof - minus_dof));

  SaddleSystem S;
  S.mode = mode;
  S.variant = variant;
  S.has_lambda = !merged;
  S.r_gamma = R;
  S.sys = BorderedSystemT<long double>(ndof, bw, bw, S.has_lambda ? 1 : 0);
  S.minus_dof = minus_dof;
  S.plus_dof = plus_dof;
  auto& A = S.sys.a;

  using LD = long double;
  using LC = std::complex<LD>;
  const Medium* med[2] = {&md.cytoplasm, &md.exterior};
  const auto q = gauss_legendre<LD>(2 * p + 2);
  const LD Nl = N, sq = std::sqrt(Nl);
  for (auto& el : elems) {
    const LD imu = LD(1) / LD(med[el.region]->mu);
    const LC k2(wavenumber_squared(*med[el.region], md.omega));
    const LD J = (LD(el.b) - LD(el.a)) / 2;
    for (size_t qi = 0; qi < q.x.size(); ++qi) {
      const LD xi = q.x[qi], r = LD(el.a) + J * (xi + 1), w = q.w[qi] * J;
      const auto L = detail::lagrange<LD>(p, xi);
      std::vector<LD> dv(L.d.size());
      for (size_t i = 0; i < dv.size(); ++i) dv[i] = L.d[i] / J;
      if (te) {
        for (size_t i = 0; i < L.v.size(); ++i)
          for (size_t j = 0; j < L.v.size(); ++j)
            A(el.g[i], el.g[j]) += w * (imu * (dv[j] * dv[i] + Nl * L.v[j] * L.v[i] / (r * r)) - k2 * imu * L.v[j] * L.v[i]);
      } else {
        // (sqrt(N) e_r - g') against the same for the test functions, plus the mass terms
        const auto P = detail::legendre<LD>(p - 1, xi);
        for (size_t i = 0; i < L.v.size(); ++i)
          for (size_t j = 0; j < L.v.size(); ++j)
            A(el.g[i], el.g[j]) += w * (imu * dv[j] * dv[i] - k2 * imu * L.v[j] * L.v[i]);
        for (size_t i = 0; i < L.v.size(); ++i)
          for (size_t j = 0; j < P.size(); ++j) {
            const LD c = -w * imu * sq * P[j] * dv[i];
            A(el.g[i], el.e[j]) += c;
            A(el.e[j], el.g[i]) += c;
          }
        for (size_t i = 0; i < P.size(); ++i)
          for (size_t j = 0; j < P.size(); ++j)
            A(el.e[i], el.e[j]) += w * (imu * Nl * P[j] * P[i] - k2 * imu * r * r * P[j] * P[i]);
      }
    }
  }

  // origin closure from the regular solution psi(x) = x j_n(x)
  {
    const cplx kc = wavenumber(md.cytoplasm, md.omega);
    const double a = mesh.r_min();
    const auto jv = radial_function(RadialKind::regular, n, kc * a);
    const cplx x = kc * a, psi = x * jv.f, dpsi = jv.f + x * jv.df;
    const double mc = md.cytoplasm.mu;
    if (te)
      A(0, 0) += LC((kc * dpsi / psi) / mc);
    else
      A(0, 0) -= LC((kc * psi / dpsi) / mc);
  }

  // Silver-Muller boundary
  const cplx ke = wavenumber(md.exterior, md.omega);
  const double me = md.exterior.mu;
  const int last = elems.back().g.back();
  const cplx I(0, 1);
  A(last, last) += LC(-I * ke / me);
  const Traces inc = basis_traces(mode.family, RadialKind::regular, n, ke, me, Ro);
  const cplx s_inc = exc.amplitude(mode) * silver_muller(mode.family, inc, ke, me);
  S.sys.f[last] = LC((te ? 1.0 : -1.0) * (Ro / me) * s_inc);

  // Gamma terms
  const double e = eps_layer;
  const int m_ = minus_dof, p_ = plus_dof;
  if (merged) {
    A(m_, m_) += LC(e * (k.C * N / (R * R) - k.D));
    return S;
  }
  const cplx mean_coef = te ? e * (k.C * N / (R * R) - k.D) : -e * k.D;
  for (int i : {m_, p_})
    for (int j : {m_, p_}) A(i, j) += LC(0.25 * mean_coef);
  auto& col = S.sys.border_cols[0];
  auto& row = S.sys.border_rows[0];
  if (te) {
    col[p_] += R, col[m_] -= R;
    row[p_] = R, row[m_] = -R;
    S.sys.corner(0, 0) = LC(-e * k.B * R * R);
  } else {
    col[p_] += -R, col[m_] += R;
    const cplx ecurv = e * k.E * H * N / R * 0.5;
    col[p_] += LC(ecurv), col[m_] += LC(ecurv);
    row[p_] = -R, row[m_] = R;
    S.sys.corner(0, 0) = LC(e * (k.A * N - k.B * R * R));
  }
  return S;
}

inline FemSolution solve_saddle(const SaddleSystem& S) {
  const auto sol = solve_bordered(S.sys);
  FemSolution out;
  out.mode = S.mode;
  out.variant = S.variant;
  for (auto& v : sol.x) out.x.emplace_back(double(v.real()), double(v.imag()));
  out.residual = sol.residual;
  out.schur_condition = sol.schur_condition;
  if (S.has_lambda) out.lambda = cplx(double(sol.l[0].real()), double(sol.l[0].imag()));
  // primary unknown at Gamma is r times the tangential trace
  out.minus.te = out.x[S.minus_dof] / S.r_gamma;
  out.plus.te = out.x[S.plus_dof] / S.r_gamma;
  if (out.lambda) out.minus.th = out.plus.th = *out.lambda;
  return out;
}

// |lambda - <T_H>| / |<T_H>| against the closed-form modal GITC.
inline double recovered_lambda_check(const FemSolution& fem, const TwoRegionModalSolution& modal, double r_gamma) {
  if (!fem.lambda) return 0;
  const Traces a = modal.field.traces(r_gamma, Side::minus), b = modal.field.traces(r_gamma, Side::plus);
  const cplx mean = 0.5 * (a.th + b.th);
  return std::abs(*fem.lambda - mean) / std::max(std::abs(mean), 1e-300);
}

// Relative error of the two tangential traces at Gamma.
inline double gamma_trace_error(const FemSolution& fem, const TwoRegionModalSolution& modal, double r_gamma) {
  const Traces a = modal.field.traces(r_gamma, Side::minus), b = modal.field.traces(r_gamma, Side::plus);
  const double num = std::norm(fem.minus.te - a.te) + std::norm(fem.plus.te - b.te);
  const double den = std::norm(a.te) + std::norm(b.te);
  return std::sqrt(num / std::max(den, 1e-300));
}

// G lambda = A curl curl lambda on divergence-free tangential fields; `family` is the
// family of the data lambda itself.
struct GOperatorModal {
  int degree = 1;
  cplx A = 0;
  double radius = 1;

  cplx symbol() const { return A * (double(degree) * (degree + 1) / (radius * radius)); }
};

inline cplx apply_G_modal(cplx lambda, Family family, const GOperatorModal& G) {
  if (family != Family::rotated) throw DomainError("G acts on divergence-free (rotated) data only");
  return G.symbol() * lambda;
}

inline cplx invert_G_modal(cplx g, Family family, const GOperatorModal& G) {
  if (family != Family::rotated) throw DomainError("G acts on divergence-free (rotated) data only");
  if (G.symbol() == cplx(0)) throw DomainError("G symbol vanishes (A = 0)");
  return g / G.symbol();
}

}  // namespace thinlayer
