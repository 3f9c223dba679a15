#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/log_scaled.hpp"

namespace riesz {

/// u(x,y) = |x-y| (1+|x|+|y|); the local region N_delta is {u <= delta}.
inline double local_scale(const Point& x, const Point& y) { return distance(x, y) * (1.0 + x.norm() + y.norm()); }

inline bool in_N(double delta, const Point& x, const Point& y) {
  require(delta > 0.0, "in_N: delta must be positive");
  return local_scale(x, y) <= delta;
}

/// Global region G, the complement of N_1.
inline bool in_G(const Point& x, const Point& y) { return !in_N(1.0, x, y); }

/// Quintic ramp S(t) = 6t^5 - 15t^4 + 10t^3 on [0,1].
inline double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

/// Cutoff profile: 1 on [0,1], 0 on [2,inf), psi(u) = 1 - S(u-1) between.
inline double chi_profile(double u) { return 1.0 - smoothstep(u - 1.0); }

inline double chi_profile_derivative(double u) {
  if (u <= 1.0 || u >= 2.0) return 0.0;
  const double t = u - 1.0;
  return -30.0 * t * t * (1.0 - t) * (1.0 - t);
}

/// Bound C in (|grad_x chi| + |grad_y chi|) |x-y| <= C. On the transition
/// band u in [1,2] one has |x-y| <= 1, so |grad_x u| |x-y| <= u + |x-y|^2 <= 3,
/// and max|psi'| = 15/8; the two gradients add a factor 2.
inline constexpr double kChiGradientConstant = 2.0 * (15.0 / 8.0) * 3.0;

inline double chi(const Point& x, const Point& y) { return chi_profile(local_scale(x, y)); }

/// Analytic (grad_x chi, grad_y chi). The gradient of |x| at x = 0 is taken
/// as zero (chi is constant near the diagonal there anyway).
inline std::pair<Point, Point> grad_chi(const Point& x, const Point& y) {
  require(x.dim() == y.dim(), "grad_chi: dimension mismatch");
  Point gx(x.dim()), gy(x.dim());
  const Point d = x - y;
  const double dist = d.norm(), nx = x.norm(), ny = y.norm();
  const double dpsi = chi_profile_derivative(dist * (1.0 + nx + ny));
  if (dpsi == 0.0 || dist == 0.0) return {gx, gy};
  const double w = 1.0 + nx + ny;
  for (int i = 0; i < x.dim(); ++i) {
    const double e = d[i] / dist;
    gx[i] = dpsi * (e * w + (nx > 0.0 ? dist * x[i] / nx : 0.0));
    gy[i] = dpsi * (-e * w + (ny > 0.0 ? dist * y[i] / ny : 0.0));
  }
  return {gx, gy};
}

/// (chi K, (1-chi) K) for a kernel value at (x,y).
inline std::pair<LogScaled, LogScaled> split_value(const LogScaled& k, const Point& x, const Point& y) {
  const double c = chi(x, y);
  return {k * LogScaled::from(c), k * LogScaled::from(1.0 - c)};
}

/// Split of a kernel callable K(x,y) -> LogScaled into local and global parts.
template <class K>
std::pair<LogScaled, LogScaled> split_kernel(const K& kernel, const Point& x, const Point& y) {
  require(!(x == y), "split_kernel: diagonal point");
  return split_value(kernel(x, y), x, y);
}

} // namespace riesz
