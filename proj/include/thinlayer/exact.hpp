#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "media.hpp"
#include "modes.hpp"

namespace thinlayer {

// Second radial basis inside the shell. (j, y) is the default; (j, h) only
// exists to check that the physical field does not depend on the choice.
enum class ShellBasis { j_y, j_h };

struct ModalSolution {
  ModeField field;  // cytoplasm, shell, exterior pieces
  cplx incident;
  double condition = 0;
  double residual = 0;
};

// Three-region transmission problem for one mode.
// Unknowns: [cytoplasm j, shell j, shell y|h, exterior j, exterior h].
inline ModalSolution solve_exact_mode(const ModeIndex& mode, const MediumTriple& md, const LayeredSphereGeometry& g,
                                      const Excitation& exc, ShellBasis basis = ShellBasis::j_y,
                                      const Tolerances& tol = default_tolerances()) {
  md.validate();
  g.validate();
  if (!(g.eps_layer > 0)) throw DomainError("exact solve needs a positive layer thickness");
  if (!(g.eps_layer < 0.5 * (g.r_out - g.r_gamma))) throw DomainError("eps_layer must be below (r_out - r_gamma)/2");
  const int n = mode.degree;
  const Family f = mode.family;
  const double R = g.r_gamma, Re = g.r_gamma + g.eps_layer, Ro = g.r_out;
  const cplx kc = wavenumber(md.cytoplasm, md.omega), km = wavenumber(md.membrane, md.omega),
             ke = wavenumber(md.exterior, md.omega);
  const double mc = md.cytoplasm.mu, mm = md.membrane.mu, me = md.exterior.mu;
  const RadialKind sk = basis == ShellBasis::j_y ? RadialKind::second : RadialKind::outgoing;
  const cplx a = exc.amplitude(mode);

  DenseSystem s(5);
  auto put = [&](int row, int col, const Traces& t, double sign) {
    s(row, col) = sign * t.te;
    s(row + 1, col) = sign * t.th;
  };
  put(0, 0, basis_traces(f, RadialKind::regular, n, kc, mc, R), 1);
  put(0, 1, basis_traces(f, RadialKind::regular, n, km, mm, R), -1);
  put(0, 2, basis_traces(f, sk, n, km, mm, R), -1);
  put(2, 1, basis_traces(f, RadialKind::regular, n, km, mm, Re), 1);
  put(2, 2, basis_traces(f, sk, n, km, mm, Re), 1);
  put(2, 3, basis_traces(f, RadialKind::regular, n, ke, me, Re), -1);
  put(2, 4, basis_traces(f, RadialKind::outgoing, n, ke, me, Re), -1);
  const cplx smj = silver_muller(f, basis_traces(f, RadialKind::regular, n, ke, me, Ro), ke, me);
  const cplx smh = silver_muller(f, basis_traces(f, RadialKind::outgoing, n, ke, me, Ro), ke, me);
  s(4, 3) = smj;
  s(4, 4) = smh;
  s.b[4] = smj * a;  // Silver-Muller on the scattered part (c_j - a) j + c_h h

  // column equilibration; the physical coefficients are unscaled afterwards
  std::array<double, 5> scale{};
  DenseSystem t = s;
  for (int j = 0; j < 5; ++j) {
    double m = 0;
    for (int i = 0; i < 5; ++i) m = std::max(m, std::abs(s(i, j)));
    scale[j] = m > 0 ? 1.0 / m : 1.0;
    for (int i = 0; i < 5; ++i) t(i, j) *= scale[j];
  }
  DenseSolution sol;
  try {
    sol = solve_dense(t, tol.condition_cap);
  } catch (const IllConditionedError& e) {
    throw IllConditionedError(std::string(e.what()) + " in the interface system of degree " + std::to_string(n) +
                                  "; try a slightly perturbed omega",
                              e.condition, "interface");
  }
  std::array<cplx, 5> c;
  for (int j = 0; j < 5; ++j) c[j] = sol.x[j] * scale[j];

  ModalSolution out;
  out.field.mode = mode;
  out.field.pieces = {
      {0.0, R, kc, mc, admittivity(md.cytoplasm, md.omega), RadialKind::second, c[0], 0.0},
      {R, Re, km, mm, admittivity(md.membrane, md.omega), sk, c[1], c[2]},
      {Re, Ro, ke, me, admittivity(md.exterior, md.omega), RadialKind::outgoing, c[3], c[4]},
  };
  out.incident = a;
  out.condition = sol.condition;
  out.residual = sol.residual;
  return out;
}

inline FieldSample evaluate_field(const ModalSolution& s, double r, Side side = Side::none) {
  if (!(r > 0)) throw DomainError("evaluate_field needs r > 0");
  return s.field.sample(r, side);
}

// The incident regular wave alone, as a single exterior-medium piece on (0, r_out].
inline ModeField incident_field(const ModeIndex& mode, const MediumTriple& md, const LayeredSphereGeometry& g,
                                const Excitation& exc) {
  ModeField f;
  f.mode = mode;
  f.pieces = {{0.0, g.r_out, wavenumber(md.exterior, md.omega), md.exterior.mu, admittivity(md.exterior, md.omega),
               RadialKind::outgoing, exc.amplitude(mode), 0.0}};
  return f;
}

}  // namespace thinlayer
