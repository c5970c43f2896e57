#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "media.hpp"
#include "modes.hpp"
#include "quadrature.hpp"

namespace thinlayer {

// Linear combination of mode fields of the same mode, sampled pointwise.
struct FieldCombination {
  std::vector<std::pair<const ModeField*, cplx>> terms;

  FieldCombination& add(const ModeField& f, cplx c = 1.0) {
    terms.emplace_back(&f, c);
    return *this;
  }
  FieldSample sample(double r, Side side = Side::none) const {
    FieldSample s;
    s.r = r;
    for (auto& [f, c] : terms) {
      const auto v = f->sample(r, side);
      s.rotated += c * v.rotated, s.gradient += c * v.gradient, s.normal += c * v.normal;
    }
    return s;
  }
};

inline double pointwise_sq(const FieldSample& s) { return std::norm(s.rotated) + std::norm(s.gradient) + std::norm(s.normal); }

enum class Region { cytoplasm, shell, exterior_annulus };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::cytoplasm: return "cytoplasm";
    case Region::shell: return "shell";
    case Region::exterior_annulus: return "annulus";
  }
  return "?";
}

// Off-layer annulus [r_gamma + offset, r_out].
inline constexpr double annulus_offset = 0.15;

inline std::pair<double, double> region_bounds(Region reg, const LayeredSphereGeometry& g) {
  switch (reg) {
    case Region::cytoplasm: return {0.0, g.r_gamma};
    case Region::shell: return {g.r_gamma, g.r_gamma + g.eps_layer};
    case Region::exterior_annulus: return {g.r_gamma + annulus_offset, g.r_out};
  }
  return {0, 0};
}

// Squared L2 norm over the spherical shell a < r < b of one mode (Parseval: the
// harmonics are orthonormal, so components add in quadrature).
template <class Sampler>
double mode_norm_sq(const Sampler& f, double a, double b, int order) {
  return integrate([&](double r) { return pointwise_sq(f(r)) * r * r; }, a, b, order);
}

// L2 norm over a region of a set of per-mode samplers.
template <class Sampler>
double modal_norm(const std::vector<Sampler>& modes, Region reg, const LayeredSphereGeometry& g, int order = 32) {
  const auto [a, b] = region_bounds(reg, g);
  double s = 0;
  for (auto& f : modes) s += mode_norm_sq(f, a, b, order);
  return std::sqrt(s);
}

// Norm of the difference of two mode-field sets, which must cover the same modes.
inline double modal_norm(const std::vector<ModeField>& u, const std::vector<ModeField>& v, Region reg,
                         const LayeredSphereGeometry& g, int order = 32) {
  if (u.size() != v.size()) throw DomainError("mode sets differ in truncation");
  std::vector<FieldCombination> d(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    if (!(u[i].mode == v[i].mode)) throw DomainError("mode sets differ in mode ordering");
    d[i].add(u[i]).add(v[i], -1.0);
  }
  std::vector<std::function<FieldSample(double)>> s;
  for (auto& c : d) s.push_back([&c](double r) { return c.sample(r); });
  return modal_norm(s, reg, g, order);
}

}  // namespace thinlayer
