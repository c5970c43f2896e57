#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "bessel.hpp"
#include "errors.hpp"
#include "media.hpp"

namespace thinlayer {

// Family of the tangential electric field: rotated = along grad_G Y x n (no normal
// component), gradient = along grad_G Y (with a normal component).
enum class Family { rotated, gradient };

inline const char* to_string(Family f) { return f == Family::rotated ? "rotated" : "gradient"; }

struct ModeIndex {
  Family family = Family::rotated;
  int degree = 1;
  bool operator==(const ModeIndex&) const = default;
};

struct SurfaceSymbols {
  int degree;
  double radius;
  double laplace_beltrami;       // -n(n+1)/R^2
  double veccurl_curl_rotated;   // n(n+1)/R^2
  double veccurl_curl_gradient;  // 0
  double div_of_rotated;         // 0
  double curl_of_gradient;       // 0
};

inline SurfaceSymbols surface_symbols(int n, double R) {
  if (n < 1) throw DomainError("tangential harmonics need degree >= 1");
  if (!(R > 0)) throw DomainError("radius must be positive");
  const double lam = double(n) * (n + 1) / (R * R);
  return {n, R, -lam, lam, 0.0, 0.0, 0.0};
}

// Unit-normalized harmonics: |Y| = 1 in L2(S^2), V = grad_1 Y / sqrt(N), W = V x r.
// Per mode the electric field is
//   rotated:  E = u(r) W
//   gradient: E = e_r(r) Y r + e_t(r) V,
// and the two tangential traces carried across interfaces are
//   T_E = the tangential coefficient of E,
//   T_H = the matching coefficient of (1/mu) curl E x n  (up to a fixed family sign),
// both continuous for the exact problem.
struct Traces {
  cplx te, th;
};

// Sides at an interface radius.
enum class Side { none, minus, plus };

struct FieldSample {
  double r = 0;
  cplx rotated, gradient, normal;  // coefficients along W, V, Y r
};

// One radial region: E built from c_reg z_reg(kappa r) + c_sec z_sec(kappa r).
struct RadialPiece {
  double r_lo = 0, r_hi = 0;
  cplx kappa;
  double mu = 1;
  cplx admittivity;
  RadialKind second = RadialKind::outgoing;
  cplx c_reg, c_sec;
};

namespace detail {

struct Combo {
  cplx x, z, dz;  // argument, value, d/dx
};

inline Combo combo(const RadialPiece& p, int n, double r) {
  const cplx x = p.kappa * r;
  Combo c{x, 0.0, 0.0};
  if (p.c_reg != cplx(0)) {
    auto v = radial_function(RadialKind::regular, n, x);
    c.z += p.c_reg * v.f, c.dz += p.c_reg * v.df;
  }
  if (p.c_sec != cplx(0)) {
    auto v = radial_function(p.second, n, x);
    c.z += p.c_sec * v.f, c.dz += p.c_sec * v.df;
  }
  return c;
}

}  // namespace detail

// Traces of a single basis function z_n(kappa r), unit coefficient.
inline Traces basis_traces(Family fam, RadialKind kind, int n, cplx kappa, double mu, double r) {
  const cplx x = kappa * r;
  const auto v = radial_function(kind, n, x);
  const cplx psi_p = v.f + x * v.df;  // d(x z)/dx
  if (fam == Family::rotated) return {v.f, psi_p / (mu * r)};
  return {psi_p / x, kappa * v.f / mu};
}

// Silver-Muller functional of the traces at r_out, sign per family so that the
// outgoing wave satisfies it asymptotically.
inline cplx silver_muller(Family fam, const Traces& t, cplx kappa, double mu) {
  const cplx I(0, 1);
  return fam == Family::rotated ? mu * t.th - I * kappa * t.te : mu * t.th + I * kappa * t.te;
}

inline Traces piece_traces(const RadialPiece& p, Family fam, int n, double r) {
  const auto c = detail::combo(p, n, r);
  const cplx psi_p = c.z + c.x * c.dz;
  if (fam == Family::rotated) return {c.z, psi_p / (p.mu * r)};
  return {psi_p / c.x, p.kappa * c.z / p.mu};
}

inline FieldSample piece_sample(const RadialPiece& p, Family fam, int n, double r) {
  const auto c = detail::combo(p, n, r);
  FieldSample s;
  s.r = r;
  if (fam == Family::rotated) {
    s.rotated = c.z;
  } else {
    // e_r from div E = 0 of the Bessel ansatz: e_r = sqrt(N) z / x
    s.gradient = (c.z + c.x * c.dz) / c.x;
    s.normal = std::sqrt(double(n) * (n + 1)) * c.z / c.x;
  }
  return s;
}

// Piecewise radial field of one mode.
struct ModeField {
  ModeIndex mode;
  std::vector<RadialPiece> pieces;  // ordered by radius, contiguous

  const RadialPiece& piece_at(double r, Side side) const {
    if (pieces.empty()) throw DomainError("empty mode field");
    if (r < pieces.front().r_lo || r > pieces.back().r_hi) throw DomainError("radius outside the field's domain");
    for (size_t i = 0; i < pieces.size(); ++i) {
      const auto& p = pieces[i];
      const bool at_top = (r == p.r_hi) && i + 1 < pieces.size();
      if (at_top) {
        if (side == Side::none)
          throw DomainError("radius " + std::to_string(r) + " lies on an interface; a side tag is required");
        return side == Side::minus ? p : pieces[i + 1];
      }
      if (r >= p.r_lo && r <= p.r_hi) return p;
    }
    return pieces.back();
  }

  Traces traces(double r, Side side = Side::none) const {
    return piece_traces(piece_at(r, side), mode.family, mode.degree, r);
  }
  FieldSample sample(double r, Side side = Side::none) const {
    return piece_sample(piece_at(r, side), mode.family, mode.degree, r);
  }
};

enum class ModelTag { background, corrector, gitc_general, gitc_cell, composite };

inline const char* to_string(ModelTag t) {
  switch (t) {
    case ModelTag::background: return "background";
    case ModelTag::corrector: return "corrector";
    case ModelTag::gitc_general: return "gitc_general";
    case ModelTag::gitc_cell: return "gitc_cell";
    case ModelTag::composite: return "composite";
  }
  return "?";
}

// Field on the thickness-independent domains: cytoplasm [0, R] and the rest [R, r_out]
// (the exterior piece also covers the layer).
struct TwoRegionModalSolution {
  ModeField field;
  ModelTag tag = ModelTag::background;
  double condition = 0;

  const RadialPiece& cytoplasm() const { return field.pieces.at(0); }
  const RadialPiece& exterior() const { return field.pieces.at(1); }
};

// Incident regular-wave amplitudes in the exterior medium, per (degree, family).
struct Excitation {
  int truncation = 8;
  std::vector<cplx> rotated, gradient;  // index = degree, entry 0 unused

  explicit Excitation(int L = 8) : truncation(L), rotated(L + 1), gradient(L + 1) {
    if (L < 1 || L > 64) throw DomainError("truncation degree must lie in 1..64");
  }

  cplx amplitude(const ModeIndex& m) const {
    if (m.degree < 1 || m.degree > truncation) throw DomainError("mode outside truncation");
    return m.family == Family::rotated ? rotated[m.degree] : gradient[m.degree];
  }
  void set(const ModeIndex& m, cplx a) {
    if (m.degree < 1 || m.degree > truncation) throw DomainError("mode outside truncation");
    (m.family == Family::rotated ? rotated : gradient)[m.degree] = a;
  }
  Excitation scaled(cplx s) const {
    Excitation e = *this;
    for (auto& a : e.rotated) a *= s;
    for (auto& a : e.gradient) a *= s;
    return e;
  }

  // x-polarized unit plane wave along z, magnitude of each multipole
  // coefficient sqrt(2 pi (2n+1)); m = 0 slot stands in for the m = +-1 content.
  static Excitation plane_wave(int L, cplx amplitude = 1.0) {
    Excitation e(L);
    const cplx I(0, 1);
    for (int n = 1; n <= L; ++n) {
      const double mag = std::sqrt(2 * std::numbers::pi * (2 * n + 1));
      e.rotated[n] = amplitude * std::pow(I, n) * mag;
      e.gradient[n] = amplitude * std::pow(I, n + 1) * mag;
    }
    return e;
  }

  std::vector<ModeIndex> modes() const {
    std::vector<ModeIndex> out;
    for (int n = 1; n <= truncation; ++n) {
      out.push_back({Family::rotated, n});
      out.push_back({Family::gradient, n});
    }
    return out;
  }
};

}  // namespace thinlayer
