#pragma once

namespace thinlayer {

// Every numeric tolerance in one place. Defaults are the contract values.
struct Tolerances {
  double condition_cap = 1e12;       // dense / Schur solves
  double dense_residual = 1e-12;
  double saddle_residual = 1e-11;
  double bessel_magnitude_cap = 1e280;
  int quadrature_order = 32;         // radial Gauss-Legendre points per region
  int y3_grid = 32;                  // in-layer sup grid
  double degenerate_error = 1e-12;   // below this a convergence row carries no slope
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace thinlayer
