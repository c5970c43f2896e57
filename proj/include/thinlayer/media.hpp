#pragma once

#include <cmath>
#include <complex>

#include "errors.hpp"

namespace thinlayer {

using cplx = std::complex<double>;

struct Medium {
  double mu = 1;
  double epsilon = 1;
  double sigma = 0;

  void validate() const {
    if (!(mu > 0) || !(epsilon > 0) || !(sigma >= 0)) throw DomainError("medium needs mu > 0, epsilon > 0, sigma >= 0");
  }
  bool operator==(const Medium&) const = default;
};

// c = cytoplasm (inside Gamma, "-"), m = membrane, e = exterior ("+").
struct MediumTriple {
  Medium cytoplasm{1, 2, 0.5};
  Medium membrane{1.5, 1, 0.1};
  Medium exterior{1, 1, 0};
  double omega = 1;

  void validate() const {
    cytoplasm.validate();
    membrane.validate();
    exterior.validate();
    if (!(omega > 0)) throw DomainError("omega must be positive");
  }
  bool operator==(const MediumTriple&) const = default;

  // Parameter set of the cell variant: membrane permeability equal to the exterior one.
  MediumTriple cell_variant() const {
    MediumTriple t = *this;
    t.membrane.mu = t.exterior.mu;
    return t;
  }
};

struct LayeredSphereGeometry {
  double r_gamma = 1;
  double eps_layer = 0.1;
  double r_out = 2;

  void validate() const {
    if (!(r_gamma > 0) || !(eps_layer >= 0) || !(r_gamma + eps_layer < r_out))
      throw DomainError("geometry needs 0 < r_gamma < r_gamma + eps_layer < r_out");
  }
  bool operator==(const LayeredSphereGeometry&) const = default;
};

// kappa^2 = omega^2 mu (epsilon + i sigma / omega), Im kappa >= 0.
inline cplx wavenumber(const Medium& m, double omega) {
  const cplx k2 = omega * omega * m.mu * cplx(m.epsilon, m.sigma / omega);
  cplx k = std::sqrt(k2);
  if (k.imag() < 0) k = -k;
  return k;
}

inline cplx wavenumber_squared(const Medium& m, double omega) {
  return omega * omega * m.mu * cplx(m.epsilon, m.sigma / omega);
}

// i omega epsilon - sigma: the factor carried by the normal-flux condition.
inline cplx admittivity(const Medium& m, double omega) { return cplx(-m.sigma, omega * m.epsilon); }

// Signed mean curvature of Gamma. With h the outward distance and
// a(h) = a - 2 b h + ..., the sphere has b = -a / R, hence H = -1/R.
inline double mean_curvature(const LayeredSphereGeometry& g) { return -1.0 / g.r_gamma; }

struct GitcConstants {
  cplx A, B, C, D, E;
};

// Which closed forms of the first-order interface data to use. `standard` takes
// the usual closed-form constants as they are; `consistent` replaces D by the value
// obtained from expanding the three-region solution in the thickness, in which
// the curvature term drops out (E = 0).
enum class FormulaSet { standard, consistent };

inline GitcConstants gitc_constants(const MediumTriple& md, FormulaSet set = FormulaSet::standard) {
  const double mm = md.membrane.mu, me = md.exterior.mu;
  const cplx km2 = wavenumber_squared(md.membrane, md.omega);
  const cplx ke2 = wavenumber_squared(md.exterior, md.omega);
  GitcConstants c;
  c.A = mm / km2 - me / ke2;
  c.B = mm - me;
  c.C = 1.0 / mm - 1.0 / me;
  if (set == FormulaSet::standard) {
    c.D = (1.0 / me - 1.0 / mm) * ke2;
    const cplx ratio = admittivity(md.exterior, md.omega) / admittivity(md.membrane, md.omega);
    c.E = (2.0 / mm) * (me / ke2) * (1.0 - ratio);
  } else {
    // kappa^2/mu = omega^2 (epsilon + i sigma/omega); equal permeabilities still leave a
    // permittivity contrast here, so this D does not vanish in the cell case.
    c.D = km2 / mm - ke2 / me;
    c.E = 0;
  }
  return c;
}

}  // namespace thinlayer
