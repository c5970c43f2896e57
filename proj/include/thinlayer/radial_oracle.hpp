#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "media.hpp"
#include "modes.hpp"

namespace thinlayer {

// Finite-volume discretization of the per-mode radial equation in Sturm-Liouville form
//   -(a y')' + a (N/r^2 - kappa^2) y = 0,
// rotated:  y = r T_E, a = 1/mu,        flux a y' = r T_H
// gradient: y = r T_H, a = mu/kappa^2,  flux a y' = r T_E.
// y and the flux are continuous at the (grid-aligned) interfaces. Second order.
struct OracleSolution {
  std::vector<double> r;
  CVector y;
  // traces at r_gamma (-,+) and r_gamma + eps (-,+)
  Traces gamma_minus, gamma_plus, outer_minus, outer_plus;
};

namespace detail {

// d/dx log(x j_n(x)) from the ascending series; independent of the Bessel module.
inline cplx riccati_log_derivative(int n, cplx x) {
  const cplx q = -0.5 * x * x;
  cplx t = 1.0, s = 1.0, ds = 0.0;
  for (int k = 1; k < 80; ++k) {
    t *= q / (double(k) * double(2 * n + 2 * k + 1));
    s += t;
    ds += 2.0 * k * t / x;
    if (std::abs(t) < 1e-18 * std::abs(s)) break;
  }
  return double(n + 1) / x + ds / s;
}

inline OracleSolution oracle_on_grid(const ModeIndex& mode, const MediumTriple& md, const LayeredSphereGeometry& g,
                                     const Excitation& exc, int nc, int nm, int ne, double r_min) {
  const int n = mode.degree;
  const bool te = mode.family == Family::rotated;
  const double N = double(n) * (n + 1);
  const double R = g.r_gamma, Re = g.r_gamma + g.eps_layer, Ro = g.r_out;

  struct Region {
    cplx k2;
    cplx a;
  };
  auto region = [&](const Medium& m) {
    const cplx k2 = wavenumber_squared(m, md.omega);
    return Region{k2, te ? cplx(1.0 / m.mu) : m.mu / k2};
  };
  const Region reg[3] = {region(md.cytoplasm), region(md.membrane), region(md.exterior)};

  OracleSolution out;
  std::vector<int> cell_region;
  auto add = [&](double a, double b, int cells, int id) {
    for (int i = (out.r.empty() ? 0 : 1); i <= cells; ++i) out.r.push_back(a + (b - a) * i / cells);
    for (int i = 0; i < cells; ++i) cell_region.push_back(id);
  };
  add(r_min, R, nc, 0);
  add(R, Re, nm, 1);
  add(Re, Ro, ne, 2);
  const int M = int(out.r.size());
  const int iR = nc, iRe = nc + nm;

  BandedSystem A(M, 1, 1);
  CVector b(M);
  auto q = [&](int id, double r) { return N / (r * r) - reg[id].k2; };
  for (int c = 0; c < M - 1; ++c) {
    const int id = cell_region[c];
    const double h = out.r[c + 1] - out.r[c];
    const cplx w = reg[id].a / h;
    // flux balance: F_{i+1/2} - F_{i-1/2} - int a q y = 0
    A(c, c) -= w;
    A(c, c + 1) += w;
    A(c + 1, c + 1) -= w;
    A(c + 1, c) += w;
    A(c, c) -= reg[id].a * q(id, out.r[c]) * (0.5 * h);
    A(c + 1, c + 1) -= reg[id].a * q(id, out.r[c + 1]) * (0.5 * h);
  }
  // origin closure: F(r_min) = a beta y
  const cplx kc = std::sqrt(reg[0].k2);
  const cplx beta = kc * detail::riccati_log_derivative(n, kc * r_min);
  A(0, 0) -= reg[0].a * beta;
  // Silver-Muller at r_out, incident data s_inc
  const cplx ke = wavenumber(md.exterior, md.omega);
  const double me = md.exterior.mu;
  const Traces inc = basis_traces(mode.family, RadialKind::regular, n, ke, me, Ro);
  const cplx s_inc = exc.amplitude(mode) * silver_muller(mode.family, inc, ke, me);
  const cplx I(0, 1);
  // F(r_out) = alpha y + gamma
  cplx alpha, gamma;
  if (te) {
    alpha = I * ke / me, gamma = Ro * s_inc / me;
  } else {
    alpha = -me / (I * ke), gamma = Ro * s_inc / (I * ke);
  }
  A(M - 1, M - 1) += alpha;
  b[M - 1] = -gamma;
  out.y = solve_banded(A, b);

  auto flux_left = [&](int i) {  // flux at node i seen from cell i-1
    const int id = cell_region[i - 1];
    const double h = out.r[i] - out.r[i - 1];
    return reg[id].a * (out.y[i] - out.y[i - 1]) / h + reg[id].a * q(id, out.r[i]) * out.y[i] * (0.5 * h);
  };
  auto flux_right = [&](int i) {  // from cell i
    const int id = cell_region[i];
    const double h = out.r[i + 1] - out.r[i];
    return reg[id].a * (out.y[i + 1] - out.y[i]) / h - reg[id].a * q(id, out.r[i]) * out.y[i] * (0.5 * h);
  };
  auto tr = [&](int i, cplx F) {
    const double r = out.r[i];
    return te ? Traces{out.y[i] / r, F / r} : Traces{F / r, out.y[i] / r};
  };
  out.gamma_minus = tr(iR, flux_left(iR));
  out.gamma_plus = tr(iR, flux_right(iR));
  out.outer_minus = tr(iRe, flux_left(iRe));
  out.outer_plus = tr(iRe, flux_right(iRe));
  return out;
}

inline Traces extrapolate(const Traces& fine, const Traces& coarse) {
  return {(4.0 * fine.te - coarse.te) / 3.0, (4.0 * fine.th - coarse.th) / 3.0};
}

}  // namespace detail

// second_order: the plain scheme, O(h^2) in the traces.
// richardson: the same scheme on the grid and on its 2x coarsening, combined to cancel
// the h^2 term (interfaces are nodes of both grids, so the expansion is in even powers).
enum class OracleScheme { second_order, richardson };

inline OracleSolution radial_ode_oracle(const ModeIndex& mode, const MediumTriple& md,
                                        const LayeredSphereGeometry& g, const Excitation& exc, int grid_points,
                                        double r_min = -1, OracleScheme scheme = OracleScheme::second_order) {
  md.validate();
  g.validate();
  if (r_min <= 0) r_min = g.r_gamma / 50;
  const double R = g.r_gamma, Re = g.r_gamma + g.eps_layer, Ro = g.r_out;
  const double h0 = (Ro - r_min) / std::max(grid_points - 1, 1);
  const int step = scheme == OracleScheme::richardson ? 2 : 1;
  auto cells = [&](double len) { return std::max(step, step * int(std::lround(len / h0 / step))); };
  const int nc = cells(R - r_min), nm = cells(g.eps_layer), ne = cells(Ro - Re);
  if (nm < 20)
    throw DomainError("layer resolved by " + std::to_string(nm) + " cells (< 20); use at least " +
                      std::to_string(int(std::ceil(20 * (Ro - r_min) / g.eps_layer)) + 1) + " grid points");
  OracleSolution out = detail::oracle_on_grid(mode, md, g, exc, nc, nm, ne, r_min);
  if (scheme == OracleScheme::richardson) {
    const OracleSolution c = detail::oracle_on_grid(mode, md, g, exc, nc / 2, nm / 2, ne / 2, r_min);
    out.gamma_minus = detail::extrapolate(out.gamma_minus, c.gamma_minus);
    out.gamma_plus = detail::extrapolate(out.gamma_plus, c.gamma_plus);
    out.outer_minus = detail::extrapolate(out.outer_minus, c.outer_minus);
    out.outer_plus = detail::extrapolate(out.outer_plus, c.outer_plus);
  }
  return out;
}

}  // namespace thinlayer
