#pragma once

#include <cmath>
#include <numbers>

#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/log_scaled.hpp"

namespace riesz {

/// Physicists' Hermite polynomial H_k(s) by the three-term recurrence.
inline double hermite1d(int k, double s) {
  require(k >= 0, "hermite1d: negative degree");
  if (k == 0) return 1.0;
  double hm = 1.0, h = 2.0 * s;
  for (int j = 1; j < k; ++j) {
    const double hp = 2.0 * s * h - 2.0 * j * hm;
    hm = h;
    h = hp;
  }
  return h;
}

/// H_alpha(x) = prod_i H_{alpha_i}(x_i).
inline double hermite_multi(const MultiIndex& a, const Point& x) {
  require(a.dim() == x.dim(), "hermite_multi: dimension mismatch");
  double p = 1.0;
  for (int i = 0; i < a.dim(); ++i) p *= hermite1d(a[i], x[i]);
  return p;
}

/// Normalized one-dimensional Hermite function h_k = 2^{-k/2} (k!)^{-1/2} H_k,
/// evaluated with the normalized recurrence so that it stays O(e^{s^2/2})
/// for degrees in the thousands.
inline double hermite1d_normalized(int k, double s) {
  require(k >= 0, "hermite1d_normalized: negative degree");
  if (k == 0) return 1.0;
  double hm = 1.0, h = std::numbers::sqrt2 * s;
  for (int j = 1; j < k; ++j) {
    const double hp = std::sqrt(2.0 / (j + 1)) * s * h - std::sqrt(static_cast<double>(j) / (j + 1)) * hm;
    hm = h;
    h = hp;
  }
  return h;
}

inline double h_normalized(const MultiIndex& b, const Point& x) {
  require(b.dim() == x.dim(), "h_normalized: dimension mismatch");
  double p = 1.0;
  for (int i = 0; i < b.dim(); ++i) p *= hermite1d_normalized(b[i], x[i]);
  return p;
}

/// gamma(x) = pi^{-n/2} exp(-|x|^2).
inline LogScaled gauss_density(const Point& x) {
  return LogScaled::from_log(1, -0.5L * x.dim() * std::log(std::numbers::pi_v<long double>) - x.norm2());
}

/// gamma_{-1}(x) = pi^{n/2} exp(|x|^2).
inline LogScaled inv_gauss_density(const Point& x) {
  return LogScaled::from_log(1, 0.5L * x.dim() * std::log(std::numbers::pi_v<long double>) + x.norm2());
}

/// log((b+a)!/b!) per multi-index, as a sum of at most |a| logs.
inline double log_factorial_ratio(const MultiIndex& b, const MultiIndex& a) {
  require(a.dim() == b.dim(), "log_factorial_ratio: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 1; j <= a[i]; ++j) s += std::log(static_cast<double>(b[i] + j));
  return s;
}

/// Sign of the derivative ladder d^a(gamma h_b) = sign * 2^{|a|/2}
/// sqrt((b+a)!/b!) gamma h_{b+a}. Each derivative of exp(-s^2) H_k(s)
/// equals -exp(-s^2) H_{k+1}(s), so the sign is (-1)^{|a|} whatever b is;
/// the unit tests confirm this by finite differences.
inline int ladder_sign(const MultiIndex& a, const MultiIndex& /*b*/) { return a.order() % 2 ? -1 : 1; }

/// (gamma h_b)(x) in log domain.
inline LogScaled gamma_h(const MultiIndex& b, const Point& x) {
  return gauss_density(x) * LogScaled::from(h_normalized(b, x));
}

} // namespace riesz
