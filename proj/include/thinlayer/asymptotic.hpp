#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "exact.hpp"
#include "fit.hpp"
#include "linalg.hpp"
#include "media.hpp"
#include "modes.hpp"
#include "norms.hpp"

namespace thinlayer {

enum class Variant { general, cell };

// Form of the constant normal coefficient a of the order-1 membrane profile:
//   from_normal_flux: a = rho_c E1_c.n - E1_e.n   (follows from the normal-flux condition)
//   ratio_minus_one:  a = (rho_c - 1) E1_c.n - E1_e.n
enum class MembraneCoefficientForm { from_normal_flux, ratio_minus_one };

struct ModelOptions {
  FormulaSet formulas = FormulaSet::standard;
  double curvature_sign = 1.0;  // -1 flips H (negative control)
  MembraneCoefficientForm a_form = MembraneCoefficientForm::from_normal_flux;
};

// Interface relations of the two-region problems, per mode:
//   [T_E] = eps P <T_H> + J_E,   [T_H] = eps (Q <T_E> + S <T_H>) + J_H,
// with Silver-Muller at r_out on the part beyond the incident amplitude `inc`.
struct InterfaceData {
  cplx P = 0, Q = 0, S = 0;
  double eps = 0;
  cplx JE = 0, JH = 0;
};

inline TwoRegionModalSolution solve_two_region(const ModeIndex& mode, const MediumTriple& md,
                                               const LayeredSphereGeometry& g, cplx inc, const InterfaceData& d,
                                               ModelTag tag, const Tolerances& tol = default_tolerances()) {
  const int n = mode.degree;
  const Family f = mode.family;
  const double R = g.r_gamma, Ro = g.r_out;
  const cplx kc = wavenumber(md.cytoplasm, md.omega), ke = wavenumber(md.exterior, md.omega);
  const double mc = md.cytoplasm.mu, me = md.exterior.mu;
  const Traces tc = basis_traces(f, RadialKind::regular, n, kc, mc, R);
  const Traces tj = basis_traces(f, RadialKind::regular, n, ke, me, R);
  const Traces th = basis_traces(f, RadialKind::outgoing, n, ke, me, R);
  DenseSystem s(3);
  // plus - minus: exterior columns enter with +, the cytoplasm column with -
  const Traces* cols[3] = {&tc, &tj, &th};
  const double sign[3] = {-1, 1, 1};
  for (int j = 0; j < 3; ++j) {
    const Traces& t = *cols[j];
    s(0, j) = sign[j] * t.te - d.eps * d.P * 0.5 * t.th;
    s(1, j) = sign[j] * t.th - d.eps * 0.5 * (d.Q * t.te + d.S * t.th);
  }
  s.b[0] = d.JE;
  s.b[1] = d.JH;
  const cplx smj = silver_muller(f, basis_traces(f, RadialKind::regular, n, ke, me, Ro), ke, me);
  const cplx smh = silver_muller(f, basis_traces(f, RadialKind::outgoing, n, ke, me, Ro), ke, me);
  s(2, 1) = smj;
  s(2, 2) = smh;
  s.b[2] = smj * inc;
  DenseSolution sol;
  try {
    sol = solve_dense_equilibrated(s, tol.condition_cap);
  } catch (const IllConditionedError& e) {
    throw IllConditionedError(std::string(e.what()) + " (" + to_string(tag) + ", degree " + std::to_string(n) + ")",
                              e.condition, "interface");
  }
  TwoRegionModalSolution out;
  out.tag = tag;
  out.condition = sol.condition;
  out.field.mode = mode;
  out.field.pieces = {
      {0.0, R, kc, mc, admittivity(md.cytoplasm, md.omega), RadialKind::second, sol.x[0], 0.0},
      {R, Ro, ke, me, admittivity(md.exterior, md.omega), RadialKind::outgoing, sol.x[1], sol.x[2]},
  };
  return out;
}

inline TwoRegionModalSolution solve_background_mode(const ModeIndex& mode, const MediumTriple& md,
                                                    const LayeredSphereGeometry& g, const Excitation& exc) {
  return solve_two_region(mode, md, g, exc.amplitude(mode), {}, ModelTag::background);
}

inline void require_variant(Variant v, const MediumTriple& md) {
  if (v == Variant::cell && md.membrane.mu != md.exterior.mu)
    throw PreconditionError("cell variant assumes equal membrane and exterior permeabilities (mu_m = mu_e)");
}

// Per-mode symbols of the interface operators (P, Q, S) shared by the corrector jumps
// and the GITC:
//   rotated:  P = B,              Q = C Lambda - D,  S = 0
//   gradient: P = A Lambda - B,   Q = D,             S = -E H Lambda
inline InterfaceData interface_symbols(const ModeIndex& mode, const MediumTriple& md, const LayeredSphereGeometry& g,
                                       Variant v, const ModelOptions& opt) {
  require_variant(v, md);
  const GitcConstants k = gitc_constants(md, opt.formulas);
  const double Lam = surface_symbols(mode.degree, g.r_gamma).veccurl_curl_rotated;
  const double H = opt.curvature_sign * mean_curvature(g);
  // cell variant: B = C = 0 identically (and D too for the standard constants) -- no special path
  InterfaceData d;
  if (mode.family == Family::rotated) {
    d.P = k.B;
    d.Q = k.C * Lam - k.D;
  } else {
    d.P = k.A * Lam - k.B;
    d.Q = k.D;
    d.S = -k.E * H * Lam;
  }
  return d;
}

// First-order corrector: no incident field, jumps driven by the background traces on Gamma.
inline TwoRegionModalSolution solve_corrector_mode(const ModeIndex& mode, const MediumTriple& md,
                                                   const LayeredSphereGeometry& g,
                                                   const TwoRegionModalSolution& background, Variant v,
                                                   const ModelOptions& opt = {}) {
  const InterfaceData sym = interface_symbols(mode, md, g, v, opt);
  const Traces t0 = background.field.traces(g.r_gamma, Side::plus);
  InterfaceData d;
  d.JE = sym.P * t0.th;
  d.JH = sym.Q * t0.te + sym.S * t0.th;
  return solve_two_region(mode, md, g, 0.0, d, ModelTag::corrector);
}

inline TwoRegionModalSolution solve_gitc_mode(const ModeIndex& mode, const MediumTriple& md,
                                              const LayeredSphereGeometry& g, const Excitation& exc, double eps_layer,
                                              Variant v, const ModelOptions& opt = {}) {
  InterfaceData d = interface_symbols(mode, md, g, v, opt);
  d.eps = eps_layer;
  return solve_two_region(mode, md, g, exc.amplitude(mode), d,
                          v == Variant::general ? ModelTag::gitc_general : ModelTag::gitc_cell);
}

// Affine-in-Y3 membrane profile: normal a + b Y3 (times Y n), tangential t0 + t1 Y3
// along the mode's own tangential harmonic.
struct MembraneProfile {
  int order = 0;
  ModeIndex mode;
  cplx a = 0, b = 0;
  cplx t0 = 0, t1 = 0;

  cplx normal(double y3) const { return a + b * y3; }
  cplx tangential(double y3) const { return t0 + t1 * y3; }
};

inline MembraneProfile membrane_profile(int order, const ModeIndex& mode, const MediumTriple& md,
                                        const LayeredSphereGeometry& g, const TwoRegionModalSolution& background,
                                        const TwoRegionModalSolution* corrector, const ModelOptions& opt = {},
                                        Variant v = Variant::general) {
  if (order != 0 && order != 1) throw DomainError("membrane profiles exist for orders 0 and 1 only");
  const double R = g.r_gamma, H = opt.curvature_sign * mean_curvature(g);
  const cplx sm = admittivity(md.membrane, md.omega);
  const cplx rho_e = admittivity(md.exterior, md.omega) / sm, rho_c = admittivity(md.cytoplasm, md.omega) / sm;
  const FieldSample e0 = background.field.sample(R, Side::plus);
  MembraneProfile p;
  p.order = order;
  p.mode = mode;
  if (order == 0) {
    p.a = (rho_e - 1.0) * e0.normal;
    return p;
  }
  if (!corrector) throw DomainError("order-1 membrane profile needs the corrector");
  const InterfaceData sym = interface_symbols(mode, md, g, v, opt);
  const Traces t0 = background.field.traces(R, Side::plus);
  const cplx JE = sym.P * t0.th;
  p.t0 = -JE;  // (Y3 - 1) [E1 x n]: vanishes on the outer face
  p.t1 = JE;
  const cplx e1c = corrector->field.sample(R, Side::minus).normal;
  const cplx e1e = corrector->field.sample(R, Side::plus).normal;
  p.a = (opt.a_form == MembraneCoefficientForm::from_normal_flux ? rho_c : rho_c - 1.0) * e1c - e1e;
  p.b = 2.0 * H * (rho_e - 1.0) * e0.normal;
  return p;
}

// Per-mode bundle of the expansion terms at one thickness.
struct ExpansionTerms {
  TwoRegionModalSolution e0, e1;
  MembraneProfile m0, m1;
};

inline ExpansionTerms expansion_terms(const ModeIndex& mode, const MediumTriple& md, const LayeredSphereGeometry& g,
                                      const Excitation& exc, Variant v, const ModelOptions& opt = {}) {
  ExpansionTerms t;
  t.e0 = solve_background_mode(mode, md, g, exc);
  t.e1 = solve_corrector_mode(mode, md, g, t.e0, v, opt);
  t.m0 = membrane_profile(0, mode, md, g, t.e0, nullptr, opt, v);
  t.m1 = membrane_profile(1, mode, md, g, t.e0, &t.e1, opt, v);
  return t;
}

// Order-m partial sum at radius r (for m = 1: E0 + eps E1, plus membrane profiles in the shell).
inline FieldSample partial_sum(const ExpansionTerms& t, int m, double eps, const LayeredSphereGeometry& g, double r,
                               Side side = Side::none) {
  const double R = g.r_gamma;
  const bool in_shell = (r > R && r < R + eps) || (r == R && side == Side::plus) ||
                        (r == R + eps && side == Side::minus);
  const Side s2 = (r == R) ? side : Side::none;
  FieldSample s = t.e0.field.sample(r, s2);
  if (m >= 1) {
    const FieldSample c = t.e1.field.sample(r, s2);
    s.rotated += eps * c.rotated, s.gradient += eps * c.gradient, s.normal += eps * c.normal;
  }
  if (in_shell) {
    const double y3 = (r - R) / eps;
    s.normal += t.m0.normal(y3);
    if (m >= 1) {
      s.normal += eps * t.m1.normal(y3);
      (t.m1.mode.family == Family::rotated ? s.rotated : s.gradient) += eps * t.m1.tangential(y3);
    }
  }
  return s;
}

struct RemainderRow {
  double eps = 0;
  double cytoplasm = 0, shell = 0, annulus = 0;  // L2 norms of the remainder
  double shell_sup = 0;                           // sup over the Y3 grid of the angular L2 norm
  double jump_gamma = 0, jump_gamma_eps = 0;      // relative tangential-trace jumps
};

struct RemainderReport {
  int order = 0;
  std::vector<RemainderRow> rows;
  double slope_cytoplasm = 0, slope_shell = 0, slope_annulus = 0, slope_shell_sup = 0;
};

namespace detail {

inline double slope_of(const std::vector<RemainderRow>& rows, double RemainderRow::*field) {
  std::vector<ConvergencePoint> pts;
  for (auto& r : rows) pts.push_back({r.eps, r.*field});
  for (auto& p : pts)
    if (!(p.error > 0)) return NAN;
  return fit_loglog_slope(pts);
}

inline double tangential(const FieldSample& s, Family f) {
  return std::abs(f == Family::rotated ? s.rotated : s.gradient);
}

}  // namespace detail

// Remainder E^eps - (order-m partial sum) for every eps and all modes up to L.
inline RemainderReport remainder_norms(int m, const std::vector<double>& eps_list, const MediumTriple& md,
                                       const LayeredSphereGeometry& geom, const Excitation& exc, int L,
                                       Variant v = Variant::general, const ModelOptions& opt = {},
                                       const Tolerances& tol = default_tolerances()) {
  if (m != 0 && m != 1) throw DomainError("remainder order must be 0 or 1");
  if (L > exc.truncation) throw DomainError("truncation exceeds the excitation's modes");
  RemainderReport rep;
  rep.order = m;
  const double R = geom.r_gamma;
  const auto q = gauss_legendre(tol.quadrature_order);
  std::vector<ExpansionTerms> terms;
  for (int n = 1; n <= L; ++n)
    for (Family f : {Family::rotated, Family::gradient}) terms.push_back(expansion_terms({f, n}, md, geom, exc, v, opt));
  for (double eps : eps_list) {
    LayeredSphereGeometry g = geom;
    g.eps_layer = eps;
    RemainderRow row;
    row.eps = eps;
    std::vector<double> sup_acc(tol.y3_grid, 0.0);
    double cy = 0, sh = 0, an = 0, jg = 0, jge = 0, ref_g = 0, ref_ge = 0;
    for (auto& t : terms) {
      ModalSolution ex;
      try {
        ex = solve_exact_mode(t.e0.field.mode, md, g, exc);
      } catch (const std::exception& e) {
        throw std::runtime_error(std::string("eps = ") + std::to_string(eps) + ": " + e.what());
      }
      auto diff = [&](double r, Side side = Side::none) {
        FieldSample a = ex.field.sample(r, side), b = partial_sum(t, m, eps, g, r, side);
        return FieldSample{r, a.rotated - b.rotated, a.gradient - b.gradient, a.normal - b.normal};
      };
      cy += mode_norm_sq(diff, 0.0, R, tol.quadrature_order);
      an += mode_norm_sq(diff, R + annulus_offset, g.r_out, tol.quadrature_order);
      // shell: Gauss points in Y3
      double s = 0;
      for (size_t i = 0; i < q.x.size(); ++i) {
        const double y3 = 0.5 * (q.x[i] + 1), r = R + eps * y3;
        s += 0.5 * q.w[i] * pointwise_sq(diff(r)) * r * r * eps;
      }
      sh += s;
      for (int i = 0; i < tol.y3_grid; ++i) {
        const double y3 = double(i) / (tol.y3_grid - 1);
        const double r = R + eps * y3;
        const Side side = i == 0 ? Side::plus : (i == tol.y3_grid - 1 ? Side::minus : Side::none);
        sup_acc[i] += pointwise_sq(diff(r, side));
      }
      const Family f = t.e0.field.mode.family;
      auto tan = [f](const FieldSample& v) { return f == Family::rotated ? v.rotated : v.gradient; };
      jg += std::norm(tan(diff(R, Side::plus)) - tan(diff(R, Side::minus)));
      jge += std::norm(tan(diff(R + eps, Side::plus)) - tan(diff(R + eps, Side::minus)));
      ref_g += std::pow(detail::tangential(ex.field.sample(R, Side::minus), f), 2);
      ref_ge += std::pow(detail::tangential(ex.field.sample(R + eps, Side::plus), f), 2);
    }
    row.cytoplasm = std::sqrt(cy);
    row.shell = std::sqrt(sh);
    row.annulus = std::sqrt(an);
    for (double v2 : sup_acc) row.shell_sup = std::max(row.shell_sup, std::sqrt(v2));
    row.jump_gamma = ref_g > 0 ? std::sqrt(jg / ref_g) : std::sqrt(jg);
    row.jump_gamma_eps = ref_ge > 0 ? std::sqrt(jge / ref_ge) : std::sqrt(jge);
    rep.rows.push_back(row);
  }
  if (rep.rows.size() >= 3) {
    rep.slope_cytoplasm = detail::slope_of(rep.rows, &RemainderRow::cytoplasm);
    rep.slope_shell = detail::slope_of(rep.rows, &RemainderRow::shell);
    rep.slope_annulus = detail::slope_of(rep.rows, &RemainderRow::annulus);
    rep.slope_shell_sup = detail::slope_of(rep.rows, &RemainderRow::shell_sup);
  }
  return rep;
}

}  // namespace thinlayer
