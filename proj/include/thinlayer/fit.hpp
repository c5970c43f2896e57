#pragma once

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace thinlayer {

struct ConvergencePoint {
  double eps;
  double error;
};

// Least-squares slope of log(error) against log(eps).
inline double fit_loglog_slope(const std::vector<ConvergencePoint>& pts) {
  if (pts.size() < 3) throw DomainError("slope fit needs at least 3 points");
  std::set<double> distinct;
  for (auto& p : pts) {
    if (!(p.eps > 0) || !(p.error > 0)) throw DomainError("slope fit needs positive eps and error");
    distinct.insert(p.eps);
  }
  if (distinct.size() != pts.size()) throw DomainError("slope fit needs distinct eps values");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = double(pts.size());
  for (auto& p : pts) {
    const double x = std::log(p.eps), y = std::log(p.error);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace thinlayer
