#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/hermite.hpp"
#include "riesz/log_scaled.hpp"
#include "riesz/quadrature.hpp"
#include "riesz/regions.hpp"

namespace riesz {

/// Which of the two equivalent r-integral representations of the Riesz
/// kernel to evaluate. They differ by the factor exp(-|x|^2+|y|^2), moved
/// between the integrand and the prefactor.
enum class KernelForm { direct, factored };

inline const char* to_string(KernelForm f) { return f == KernelForm::direct ? "direct" : "factored"; }

struct KernelValue {
  LogScaled value;
  KernelForm form = KernelForm::direct;
  int subdivisions = 0;
  double rel_error = 0.0;
};

inline double log_pi() { return std::log(std::numbers::pi); }

/// Mehler kernel of exp(-tA) with respect to Lebesgue measure.
inline LogScaled heat_kernel(double t, const Point& x, const Point& y) {
  require(t > 0.0, "heat_kernel: t must be positive");
  require(x.dim() == y.dim(), "heat_kernel: dimension mismatch");
  const int n = x.dim();
  const double d = -std::expm1(-2.0 * t);
  const double q = (x - std::exp(-t) * y).norm2();
  return LogScaled::from_log(1, -n * t - 0.5 * n * log_pi() - 0.5 * n * std::log(d) - q / d);
}

namespace detail {

// |x - r y|^2 or |r x - y|^2 arranged so the r -> 1 limit keeps its digits.
inline double shifted_norm2(const Point& x, const Point& y, const RNode& nd, bool factored) {
  double s = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    const double d = x[i] - y[i];
    const double v = factored ? d - nd.one_minus_r * x[i] : d + nd.one_minus_r * y[i];
    s += v * v;
  }
  return s;
}

// Initial breakpoints for the kernel r-integrals. The Gaussian exponent
// q(r)/(1-r^2) of either form is minimized where B r^2 - (A+C) r + B = 0
// (A = |x|^2, B = x.y, C = |y|^2); around that root the integrand is a bump
// of width ~ 1/sqrt(E''). Near the diagonal the (1-r)^{-p} growth moves the
// mass towards 1 - r ~ |x-y|^2, so points on that scale are added too.
inline std::vector<double> kernel_breakpoints(const Point& x, const Point& y) {
  std::vector<double> b{0.5};
  const double A = x.norm2(), B = dot(x, y), C = y.norm2();
  const double dm = distance(x, y), dp = (x + y).norm();
  if (B > 0.0) {
    const double rs = 2.0 * B / (A + C + dm * dp);
    if (rs > 0.0 && rs < 1.0) {
      const double d = 1.0 - rs * rs;
      const double q = (rs * x - y).norm2();
      const double e2 = 2.0 * (A * d + q) / (d * d);
      const double sig = 1.0 / std::sqrt(e2);
      for (double k : {-4.0, -1.0, 0.0, 1.0, 4.0}) b.push_back(rs + k * sig);
    }
  }
  for (double k : {0.05, 0.5, 5.0}) b.push_back(1.0 - k * dm * dm);
  std::erase_if(b, [](double r) { return !(r > 0.0 && r < 1.0); });
  std::sort(b.begin(), b.end());
  return b;
}

// Integrate an integrand of the kernel family over (0,1): the log
// substitution on (0,1/2], the exponential one on [1/2,1).
template <class F>
IntegrationResult integrate_split(const F& f, const QuadratureConfig& cfg, const std::vector<double>& breaks) {
  auto lo = integrate(f, 0.0, 0.5, cfg.with(Substitution::log_at_zero), breaks);
  auto hi = integrate(f, 0.5, 1.0, cfg.with(Substitution::exp_at_one), breaks);
  IntegrationResult r;
  r.value = lo.value + hi.value;
  r.abs_error = lo.abs_error + hi.abs_error;
  r.l1 = lo.l1 + hi.l1;
  r.subdivisions = lo.subdivisions + hi.subdivisions;
  return r;
}

} // namespace detail

/// Integrand of the Riesz kernel r-integral without the constant prefactor
/// (and, for the factored form, without exp(-|x|^2+|y|^2)).
inline LogScaled riesz_integrand(const MultiIndex& a, const RNode& nd, const Point& x, const Point& y,
                                 KernelForm form) {
  require(a.dim() == x.dim() && x.dim() == y.dim(), "riesz_integrand: dimension mismatch");
  if (nd.one_minus_r <= 0.0 || nd.r <= 0.0) return LogScaled::zero();
  const int n = x.dim();
  const int k = a.order();
  const double d = nd.one_minus_r * (1.0 + nd.r); // 1 - r^2
  const double q = detail::shifted_norm2(x, y, nd, form == KernelForm::factored);
  const double expo = q / d;
  if (expo > 1e5) return LogScaled::zero();
  const double sq = std::sqrt(d);
  double h = 1.0;
  for (int i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    const double s = (x[i] - y[i] + nd.one_minus_r * y[i]) / sq; // (x - r y)_i / sqrt(1-r^2)
    h *= hermite1d(a[i], s);
  }
  if (h == 0.0) return LogScaled::zero();
  const double lg = (n - 1) * std::log(nd.r) + (0.5 * k - 1.0) * std::log(nd.neg_log_r) - 0.5 * (n + k) * std::log(d) +
                    std::log(std::fabs(h)) - expo;
  return LogScaled::from_log(h > 0 ? 1 : -1, lg);
}

/// Kernel-form default: the direct representation on N_2, the factored one
/// elsewhere.
inline KernelForm default_form(const Point& x, const Point& y) {
  return in_N(2.0, x, y) ? KernelForm::direct : KernelForm::factored;
}

/// Riesz kernel K_{R_alpha}(x,y) off the diagonal.
inline KernelValue riesz_kernel(const MultiIndex& a, const Point& x, const Point& y, KernelForm form,
                                const QuadratureConfig& cfg) {
  require(a.dim() == x.dim() && x.dim() == y.dim(), "riesz_kernel: dimension mismatch");
  require(a.order() >= 1, "riesz_kernel: |alpha| must be at least 1");
  if (x == y) throw DomainError("riesz_kernel: diagonal point x = y");
  const int n = x.dim(), k = a.order();
  auto f = [&](const RNode& nd) { return riesz_integrand(a, nd, x, y, form); };
  const auto res = detail::integrate_split(f, cfg, detail::kernel_breakpoints(x, y));
  long double pre = -0.5L * n * log_pi() - std::lgamma(0.5L * k);
  if (form == KernelForm::factored) pre += -x.norm2() + y.norm2();
  KernelValue kv;
  kv.value = res.value.shifted(pre);
  if (k % 2) kv.value = -kv.value;
  kv.form = form;
  kv.subdivisions = res.subdivisions;
  kv.rel_error = res.relative_error();
  return kv;
}

inline KernelValue riesz_kernel(const MultiIndex& a, const Point& x, const Point& y, const QuadratureConfig& cfg) {
  return riesz_kernel(a, x, y, default_form(x, y), cfg);
}

/// Kernel of A^{-b} by subordination, t = -log r.
inline LogScaled frac_power_kernel(double b, const Point& x, const Point& y, const QuadratureConfig& cfg) {
  require(b > 0.0, "frac_power_kernel: b must be positive");
  require(x.dim() == y.dim(), "frac_power_kernel: dimension mismatch");
  const int n = x.dim();
  if (x == y && 2.0 * b <= n) throw DomainError("frac_power_kernel: divergent on the diagonal for 2b <= n");
  auto f = [&](const RNode& nd) {
    if (nd.one_minus_r <= 0.0 || nd.r <= 0.0) return LogScaled::zero();
    const double d = nd.one_minus_r * (1.0 + nd.r);
    const double expo = detail::shifted_norm2(x, y, nd, false) / d;
    if (expo > 1e5) return LogScaled::zero();
    return LogScaled::from_log(1, (n - 1) * std::log(nd.r) + (b - 1.0) * std::log(nd.neg_log_r) -
                                      0.5 * n * std::log(d) - expo);
  };
  const auto res = detail::integrate_split(f, cfg, detail::kernel_breakpoints(x, y));
  return res.value.shifted(-0.5L * n * log_pi() - std::lgamma(static_cast<long double>(b)));
}

/// Central-difference gradient magnitudes (|grad_x K|, |grad_y K|) with
/// step h = 1e-4 (1 + |x-y|).
template <class K>
std::pair<double, double> kernel_gradient_norms(const K& kernel, const Point& x, const Point& y) {
  const double h = 1e-4 * (1.0 + distance(x, y));
  double gx = 0.0, gy = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    Point xp = x, xm = x, yp = y, ym = y;
    xp[i] += h;
    xm[i] -= h;
    yp[i] += h;
    ym[i] -= h;
    const double dx = (kernel(xp, y) - kernel(xm, y)).to_double() / (2.0 * h);
    const double dy = (kernel(x, yp) - kernel(x, ym)).to_double() / (2.0 * h);
    gx += dx * dx;
    gy += dy * dy;
  }
  return {std::sqrt(gx), std::sqrt(gy)};
}

} // namespace riesz
