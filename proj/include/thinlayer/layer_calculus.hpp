#pragma once

#include <array>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "media.hpp"
#include "modes.hpp"

namespace thinlayer {

// Polynomial in Y3 on [0, 1], coefficients of 1, Y3, ..., Y3^4.
using Poly = std::array<cplx, 5>;

inline cplx eval(const Poly& p, double y) {
  cplx s = 0;
  for (int k = 4; k >= 0; --k) s = s * y + p[k];
  return s;
}
inline Poly d3(const Poly& p) {
  Poly q{};
  for (int k = 1; k <= 4; ++k) q[k - 1] = double(k) * p[k];
  return q;
}
inline Poly times_y3(const Poly& p) {
  if (p[4] != cplx(0)) throw DomainError("layer profile degree would exceed 4");
  Poly q{};
  for (int k = 0; k < 4; ++k) q[k + 1] = p[k];
  return q;
}
inline Poly scaled(const Poly& p, cplx s) {
  Poly q = p;
  for (auto& c : q) c *= s;
  return q;
}
inline Poly operator+(Poly a, const Poly& b) {
  for (int k = 0; k <= 4; ++k) a[k] += b[k];
  return a;
}

// Boundary-layer profile of one degree: W = rot(Y3) W_hat + grad(Y3) V_hat, w(Y3) Y n.
struct LayerProfile {
  int degree = 1;
  Poly rot{}, grad{}, w{};

  LayerProfile operator+(const LayerProfile& o) const { return {degree, rot + o.rot, grad + o.grad, w + o.w}; }
  LayerProfile operator*(cplx s) const { return {degree, scaled(rot, s), scaled(grad, s), scaled(w, s)}; }
};

enum class LayerOp { L0, L1, L2, B0, B1, D0, D1 };

// Layer operators on the sphere (b = H a, K = H^2). Vector-valued operators fill
// rot/grad (and w where a normal component exists); scalar ones (D0, D1) return in w.
//   L0 = -d3^2 W
//   L1 = d3 grad_G w
//   L2 = -2H^2 d3(Y3 W) + curl curl W - 2H^2 W - 2H grad_G w - kappa_m^2 W
//   B0 = d3 W,  B1 = -grad_G w
//   D0 = d3 w,  D1 = div_G W - 2H w
// with grad_G(w Y) = (sqrt(N)/R) w V_hat, div_G(f V_hat) = -(sqrt(N)/R) f, div_G W_hat = 0.
inline LayerProfile apply_layer_operator(LayerOp op, const LayerProfile& p, const MediumTriple& md,
                                         const LayeredSphereGeometry& g) {
  const double R = g.r_gamma, H = mean_curvature(g);
  const double N = double(p.degree) * (p.degree + 1);
  const double sq = std::sqrt(N) / R;
  LayerProfile out{p.degree, {}, {}, {}};
  switch (op) {
    case LayerOp::L0:
      out.rot = scaled(d3(d3(p.rot)), -1.0);
      out.grad = scaled(d3(d3(p.grad)), -1.0);
      break;
    case LayerOp::L1:
      out.grad = scaled(d3(p.w), sq);
      break;
    case LayerOp::L2: {
      const cplx km2 = wavenumber_squared(md.membrane, md.omega);
      const double K = H * H;
      out.rot = scaled(d3(times_y3(p.rot)), -2 * K) + scaled(p.rot, N / (R * R) - 2 * K - km2);
      out.grad = scaled(d3(times_y3(p.grad)), -2 * K) + scaled(p.grad, -2 * K - km2) + scaled(p.w, -2 * H * sq);
      break;
    }
    case LayerOp::B0:
      out.rot = d3(p.rot);
      out.grad = d3(p.grad);
      break;
    case LayerOp::B1:
      out.grad = scaled(p.w, -sq);
      break;
    case LayerOp::D0:
      out.w = d3(p.w);
      break;
    case LayerOp::D1:
      out.w = scaled(p.grad, -sq) + scaled(p.w, -2 * H);
      break;
    default:
      throw DomainError("unsupported layer operator");
  }
  return out;
}

struct IdentityResiduals {
  // each normalized by |right-hand side|; zero with degenerate = true when both sides vanish
  double normal_jump = 0;           // d3 e1 = 2H(rho_+ - 1) E0.n
  double tangential_jump = 0;       // tangential image of the same through grad_G
  double curl_trace = 0;            // d_h(curl E x n) = kappa^2 E_T + curl curl E_T
  double curl_trace_corrected = 0;  // d_h(curl E x n) = -kappa^2 E_T + curl curl E_T
  bool normal_jump_degenerate = false, tangential_jump_degenerate = false, curl_trace_degenerate = false;
};

namespace detail {

// |lhs - rhs| / |rhs|; both sides negligible against `ref` counts as degenerate.
inline double rel(cplx lhs, cplx rhs, double ref, bool& degenerate) {
  if (std::abs(rhs) <= 1e-14 * ref && std::abs(lhs) <= 1e-12 * ref) {
    degenerate = true;
    return 0;
  }
  return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

// z_n'' from the recurrences (not from the Bessel equation).
inline cplx second_derivative(const RadialPiece& p, int n, cplx x) {
  auto part = [&](RadialKind kind) {
    const auto a = radial_function(kind, n, x);
    const auto b = radial_function(kind, n - 1, x);
    // z_n' = z_{n-1} - (n+1) z_n / x
    return b.df - double(n + 1) * (a.df / x - a.f / (x * x));
  };
  cplx s = 0;
  if (p.c_reg != cplx(0)) s += p.c_reg * part(RadialKind::regular);
  if (p.c_sec != cplx(0)) s += p.c_sec * part(p.second);
  return s;
}

inline cplx combo_value(const RadialPiece& p, int n, cplx x, bool deriv) {
  cplx s = 0;
  if (p.c_reg != cplx(0)) {
    auto v = radial_function(RadialKind::regular, n, x);
    s += p.c_reg * (deriv ? v.df : v.f);
  }
  if (p.c_sec != cplx(0)) {
    auto v = radial_function(p.second, n, x);
    s += p.c_sec * (deriv ? v.df : v.f);
  }
  return s;
}

}  // namespace detail

// Membrane-medium field sharing the background traces at Gamma: the order-0 shell field.
inline RadialPiece shell_continuation(const TwoRegionModalSolution& bg, const MediumTriple& md,
                                      const LayeredSphereGeometry& g) {
  const auto& m = bg.field.mode;
  const double R = g.r_gamma;
  const cplx km = wavenumber(md.membrane, md.omega);
  const double mm = md.membrane.mu;
  const Traces t = bg.field.traces(R, Side::plus);
  const Traces j = basis_traces(m.family, RadialKind::regular, m.degree, km, mm, R);
  const Traces y = basis_traces(m.family, RadialKind::second, m.degree, km, mm, R);
  const cplx det = j.te * y.th - y.te * j.th;
  RadialPiece p{R, R, km, mm, admittivity(md.membrane, md.omega), RadialKind::second, 0.0, 0.0};
  p.c_reg = (t.te * y.th - y.te * t.th) / det;
  p.c_sec = (j.te * t.th - t.te * j.th) / det;
  return p;
}

// Residuals of the three trace identities for one mode of the background field.
// curvature_sign = -1 flips H (negative control).
inline IdentityResiduals check_layer_identities(const TwoRegionModalSolution& bg, const ModeIndex& mode,
                                                const MediumTriple& md, const LayeredSphereGeometry& g,
                                                double curvature_sign = 1.0) {
  IdentityResiduals out;
  const int n = mode.degree;
  const double R = g.r_gamma, H = curvature_sign * mean_curvature(g);
  const double N = double(n) * (n + 1), Lam = N / (R * R);
  const double mm = md.membrane.mu, me = md.exterior.mu;
  const cplx ke = wavenumber(md.exterior, md.omega), ke2 = wavenumber_squared(md.exterior, md.omega);
  const cplx rho = admittivity(md.exterior, md.omega) / admittivity(md.membrane, md.omega);
  const RadialPiece& ext = bg.exterior();
  const Traces t0 = bg.field.traces(R, Side::plus);
  const FieldSample s0 = bg.field.sample(R, Side::plus);

  // d/dr of e_r = sqrt(N) z(x)/x, straight from Bessel derivatives
  auto der_er = [&](const RadialPiece& p) {
    const cplx x = p.kappa * R;
    const cplx z = detail::combo_value(p, n, x, false), dz = detail::combo_value(p, n, x, true);
    return std::sqrt(N) * p.kappa * (dz / x - z / (x * x));
  };

  if (mode.family == Family::gradient) {
    const RadialPiece shell = shell_continuation(bg, md, g);
    const cplx b_measured = der_er(shell) - der_er(ext);
    const double ref = std::abs(s0.normal) + std::abs(t0.te) + std::abs(t0.th);
    out.normal_jump = detail::rel(b_measured, 2.0 * H * (rho - 1.0) * s0.normal, ref, out.normal_jump_degenerate);
    const cplx lhs = -(1.0 / mm) * std::sqrt(N) / R * b_measured;
    const cplx rhs = (2.0 / mm) * (me / ke2) * (1.0 - rho) * H * Lam * t0.th;
    out.tangential_jump = detail::rel(lhs, rhs, ref * Lam / mm, out.tangential_jump_degenerate);
    // -(r c)'/r with c = kappa z:  -(kappa/r)(z + x z')
    const cplx x = ke * R;
    const cplx z = detail::combo_value(ext, n, x, false), dz = detail::combo_value(ext, n, x, true);
    const cplx dh = -(ke / R) * (z + x * dz);
    const cplx et = s0.gradient;
    out.curl_trace = detail::rel(dh, ke2 * et, std::abs(ke2 * et), out.curl_trace_degenerate);
    bool d = false;
    out.curl_trace_corrected = detail::rel(dh, -ke2 * et, std::abs(ke2 * et), d);
  } else {
    out.normal_jump_degenerate = out.tangential_jump_degenerate = true;  // no normal component
    // (r u)''/r with u = z(kappa r): (r z)'' = kappa (2 z' + x z'')
    const cplx x = ke * R;
    const cplx dz = detail::combo_value(ext, n, x, true);
    const cplx d2z = detail::second_derivative(ext, n, x);
    const cplx dh = ke * (2.0 * dz + x * d2z) / R;
    const cplx u = s0.rotated;
    const double ref = std::abs((ke2 + Lam) * u);
    out.curl_trace = detail::rel(dh, ke2 * u + Lam * u, ref, out.curl_trace_degenerate);
    bool d = false;
    out.curl_trace_corrected = detail::rel(dh, -ke2 * u + Lam * u, ref, d);
  }
  return out;
}

}  // namespace thinlayer
