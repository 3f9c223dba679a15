#pragma once

#include <cmath>
#include <span>

#include "riesz/error.hpp"

namespace riesz {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0; ///< root-mean-square residual in log(value)
};

/// Least-squares slope of log(value) against log(eta).
inline SlopeFit slope_fit(std::span<const double> etas, std::span<const double> values) {
  require(etas.size() == values.size(), "slope_fit: size mismatch");
  require(etas.size() >= 3, "slope_fit: need at least three points");
  const double m = static_cast<double>(etas.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    require(etas[i] > 0.0, "slope_fit: eta must be positive");
    require(values[i] > 0.0, "slope_fit: values must be positive");
    const double x = std::log(etas[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  require(den > 0.0, "slope_fit: eta values must not all coincide");
  SlopeFit f;
  f.slope = (m * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / m;
  double ss = 0.0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double r = std::log(values[i]) - (f.intercept + f.slope * std::log(etas[i]));
    ss += r * r;
  }
  f.residual = std::sqrt(ss / m);
  return f;
}

} // namespace riesz
