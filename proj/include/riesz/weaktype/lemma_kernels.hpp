#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/kernels.hpp"
#include "riesz/log_scaled.hpp"
#include "riesz/quadrature.hpp"
#include "riesz/regions.hpp"

namespace riesz {

/// Kernels whose weak type (1,1) controls the global part for |alpha| <= 2.
///
///   L41  e^{-|x|^2+|y|^2} [(1+|x|)^n ∧ (|x| sin θ)^{-n}]
///   L42  e^{-|x|^2+|y|^2} |x|^{-mu} (1+|x|)^{-nu}
///   L43  e^{-|x|^2+|y|^2} e^{-δ|y⊥|^2} |x| (|y|/|x|)^{n-1} 1_{G, |y| <= 2|x|}
///   L44  e^{-|x|^2+|y|^2} |x|^{(n+1)/2} |x-y_x|^{-(n-1)/2} e^{-δ|y⊥|^2|x|/|x-y_x|}
///        1_{|x||x-y_x| >= 1, |x|/3 <= |y_x| < |x|}
///
/// and the bare pieces of the global Riesz kernel bound (no Gaussian factor):
///
///   K1   int_0^{1/2} r^{n-1} |x-ry|^a e^{-|rx-y|^2} dr
///   K2   int_{1/2}^1 |x-ry|^a (1-r)^{-(n+a+2)/2} e^{-c|rx-y|^2/(1-r)} dr, c = 1/2
///   K21, K22, K23   K2 restricted to r0 <= 1/3, r0 >= 2, 1/3 < r0 < 2
///   K231, K232, K233  K23 split in r (see k2_interval)
///   A, B  the two closed-form majorants of K231 (exponent constant 1/3)
///   S    int_{|r-r0|<(1-r0)/2} e^{-c|x|^2 (r-r0)^2/(1-r0)} dr, c = 1/3
enum class LemmaKernel { L41, L42, L43, L44, K1, K2, K21, K22, K23, K231, K232, K233, A, B, S };

inline const char* to_string(LemmaKernel k) {
  switch (k) {
  case LemmaKernel::L41: return "L41";
  case LemmaKernel::L42: return "L42";
  case LemmaKernel::L43: return "L43";
  case LemmaKernel::L44: return "L44";
  case LemmaKernel::K1: return "K1";
  case LemmaKernel::K2: return "K2";
  case LemmaKernel::K21: return "K21";
  case LemmaKernel::K22: return "K22";
  case LemmaKernel::K23: return "K23";
  case LemmaKernel::K231: return "K231";
  case LemmaKernel::K232: return "K232";
  case LemmaKernel::K233: return "K233";
  case LemmaKernel::A: return "A";
  case LemmaKernel::B: return "B";
  case LemmaKernel::S: return "S";
  }
  return "?";
}

inline LemmaKernel lemma_kernel_from_string(const std::string& s) {
  for (auto k : {LemmaKernel::L41, LemmaKernel::L42, LemmaKernel::L43, LemmaKernel::L44, LemmaKernel::K1,
                 LemmaKernel::K2, LemmaKernel::K21, LemmaKernel::K22, LemmaKernel::K23, LemmaKernel::K231,
                 LemmaKernel::K232, LemmaKernel::K233, LemmaKernel::A, LemmaKernel::B, LemmaKernel::S})
    if (s == to_string(k)) return k;
  throw DomainError("unknown lemma kernel '" + s + "'");
}

enum class Regime { inside, outside };

struct LemmaKernelSpec {
  LemmaKernel id = LemmaKernel::L41;
  int n = 1;
  double mu = 0.0, nu = 0.0; ///< L42
  double delta = 1.0;        ///< L43, L44
  int a = 0;                 ///< K-pieces: power of |x - r y|
  double c = 0.5;            ///< Gaussian constant of K2 and its pieces
  double c_closed = 1.0 / 3.0; ///< constant in A, B and S
  Regime regime = Regime::inside;
  QuadratureConfig quad{.rel_tol = 1e-9, .abs_tol = 1e-13};

  void validate() const {
    require(n >= 1 && n <= kMaxDim, "LemmaKernelSpec: bad dimension");
    require(delta > 0.0 && c > 0.0 && c_closed > 0.0, "LemmaKernelSpec: constants must be positive");
    require(a >= 0, "LemmaKernelSpec: a must be non-negative");
    if (id == LemmaKernel::L42 && regime == Regime::inside)
      require(mu + nu >= n - 2 && mu <= n, "L42: (mu, nu) outside mu + nu >= n - 2, mu <= n; set the outside regime");
  }
};

inline bool l42_hypotheses(int n, double mu, double nu) { return mu + nu >= n - 2 && mu <= n; }

inline LemmaKernelSpec l42_spec(int n, double mu, double nu) {
  LemmaKernelSpec s;
  s.id = LemmaKernel::L42;
  s.n = n;
  s.mu = mu;
  s.nu = nu;
  s.regime = l42_hypotheses(n, mu, nu) ? Regime::inside : Regime::outside;
  return s;
}

inline LemmaKernelSpec lemma_spec(LemmaKernel id, int n, int a = 0, double delta = 1.0) {
  LemmaKernelSpec s;
  s.id = id;
  s.n = n;
  s.a = a;
  s.delta = delta;
  return s;
}

namespace detail {

// log of e^{-|x|^2+|y|^2}
inline long double log_gauss_ratio(const Point& x, const Point& y) {
  return -static_cast<long double>(x.norm2()) + static_cast<long double>(y.norm2());
}

/// The part of (1/2, 1) used by the K2 pieces for a given r0; empty as lo >= hi.
inline std::pair<double, double> k2_interval(LemmaKernel id, double r0) {
  const double lo = 0.5, hi = 1.0;
  const bool mid = r0 > 1.0 / 3.0 && r0 < 2.0;
  switch (id) {
  case LemmaKernel::K2: return {lo, hi};
  case LemmaKernel::K21: return r0 <= 1.0 / 3.0 ? std::pair{lo, hi} : std::pair{hi, hi};
  case LemmaKernel::K22: return r0 >= 2.0 ? std::pair{lo, hi} : std::pair{hi, hi};
  case LemmaKernel::K23: return mid ? std::pair{lo, hi} : std::pair{hi, hi};
  case LemmaKernel::K232: // 1 - r > (3/2)|1 - r0|
    return mid ? std::pair{lo, std::min(hi, 1.0 - 1.5 * std::fabs(1.0 - r0))} : std::pair{hi, hi};
  case LemmaKernel::K231: // r0 < 1, |r - r0| < (1 - r0)/2
    if (!mid || r0 >= 1.0) return {hi, hi};
    return {std::max(lo, 1.0 - 1.5 * (1.0 - r0)), 1.0 - 0.5 * (1.0 - r0)};
  case LemmaKernel::K233: // 1 - r <= (1 - r0)/2 ∨ (3/2)(r0 - 1)
    if (!mid) return {hi, hi};
    return {std::max(lo, 1.0 - std::max(0.5 * (1.0 - r0), 1.5 * (r0 - 1.0))), hi};
  default: break;
  }
  throw DomainError("k2_interval: not a K2 piece");
}

inline LogScaled k1_integral(const LemmaKernelSpec& s, const Point& x, const Point& y) {
  const int n = x.dim();
  auto f = [&](const RNode& nd) {
    if (nd.r <= 0.0) return LogScaled::zero();
    const double p = shifted_norm2(x, y, nd, false); // |x - r y|^2
    const double q = shifted_norm2(x, y, nd, true);  // |r x - y|^2
    long double lg = -q;
    if (n > 1) lg += (n - 1) * std::log(nd.r);
    if (s.a > 0) {
      if (p == 0.0) return LogScaled::zero();
      lg += 0.5L * s.a * std::log(p);
    }
    return LogScaled::from_log(1, lg);
  };
  std::vector<double> br;
  if (x.norm2() > 0.0) {
    const double r0 = dot(x, y) / x.norm2(), w = 1.0 / x.norm();
    for (double r : {r0 - 4 * w, r0 - w, r0, r0 + w, r0 + 4 * w})
      if (r > 0.0 && r < 0.5) br.push_back(r);
    std::sort(br.begin(), br.end());
  }
  return integrate(f, 0.0, 0.5, s.quad, br).value;
}

inline LogScaled k2_integral(const LemmaKernelSpec& s, const Point& x, const Point& y, double lo, double hi) {
  if (!(lo < hi)) return LogScaled::zero();
  const int n = x.dim();
  const double p_exp = 0.5 * (n + s.a + 2);
  auto f = [&](const RNode& nd) {
    if (nd.one_minus_r <= 0.0) return LogScaled::zero();
    const double q = shifted_norm2(x, y, nd, true);
    const double e = s.c * q / nd.one_minus_r;
    if (e > 1e5) return LogScaled::zero();
    long double lg = -p_exp * std::log(nd.one_minus_r) - e;
    if (s.a > 0) {
      const double p = shifted_norm2(x, y, nd, false);
      if (p == 0.0) return LogScaled::zero();
      lg += 0.5L * s.a * std::log(p);
    }
    return LogScaled::from_log(1, lg);
  };
  std::vector<double> br;
  const double d2 = (x - y).norm2();
  for (double k : {0.02, 0.2, 1.0, 5.0}) br.push_back(1.0 - k * s.c * d2 / p_exp);
  if (x.norm2() > 0.0) {
    const double r0 = dot(x, y) / x.norm2();
    const double w = std::sqrt(std::max(1.0 - r0, 1e-300)) / x.norm();
    for (double k : {-4.0, -1.0, 0.0, 1.0, 4.0}) br.push_back(r0 + k * w);
  }
  std::erase_if(br, [&](double r) { return !(r > lo && r < hi); });
  std::sort(br.begin(), br.end());
  return integrate(f, lo, hi, s.quad.with(Substitution::exp_at_one), br).value;
}

} // namespace detail

/// Closed form of S: sqrt(pi (1-r0) / (c |x|^2)) erf(sqrt(c/(1-r0)) |x| (1-r0)/2).
inline double stimaint_integral(double r0, double nx, double c = 1.0 / 3.0) {
  require(r0 < 1.0, "stimaint_integral: needs r0 < 1");
  const double d = 1.0 - r0;
  if (nx == 0.0) return d;
  const double k = std::sqrt(c / d) * nx;
  return std::sqrt(std::numbers::pi) / k * std::erf(0.5 * k * d);
}

/// The displayed kernel value; indicator constraints give exact zeros.
inline LogScaled lemma_kernel_eval(const LemmaKernelSpec& s, const Point& x, const Point& y) {
  s.validate();
  require(x.dim() == s.n && y.dim() == s.n, "lemma_kernel_eval: dimension mismatch");
  const int n = s.n;
  const double nx = x.norm();
  switch (s.id) {
  case LemmaKernel::L41: {
    const auto pd = decompose(x, y);
    const double st = nx * std::sin(pd.theta);
    long double lg = n * std::log1p(nx);
    if (st > 0.0) lg = std::min<long double>(lg, -n * std::log(st));
    return LogScaled::from_log(1, lg + detail::log_gauss_ratio(x, y));
  }
  case LemmaKernel::L42: {
    if (nx == 0.0) {
      if (s.mu > 0.0) throw DomainError("L42: singular at x = 0 for mu > 0");
      if (s.mu < 0.0) return LogScaled::zero();
    }
    const long double lg = (s.mu != 0.0 ? -s.mu * std::log(nx) : 0.0) - s.nu * std::log1p(nx);
    return LogScaled::from_log(1, lg + detail::log_gauss_ratio(x, y));
  }
  case LemmaKernel::L43: {
    if (!in_G(x, y) || y.norm() > 2.0 * nx) return LogScaled::zero();
    const auto pd = decompose(x, y);
    long double lg = -s.delta * pd.y_perp.norm2() + std::log(nx);
    if (n > 1) {
      if (y.norm() == 0.0) return LogScaled::zero();
      lg += (n - 1) * (std::log(y.norm()) - std::log(nx));
    }
    return LogScaled::from_log(1, lg + detail::log_gauss_ratio(x, y));
  }
  case LemmaKernel::L44: {
    const auto pd = decompose(x, y);
    const double dxy = (x - pd.y_parallel).norm();
    const double yx = pd.y_parallel.norm();
    if (!(nx * dxy >= 1.0 && yx >= nx / 3.0 && yx < nx)) return LogScaled::zero();
    const long double lg = 0.5L * (n + 1) * std::log(nx) - 0.5L * (n - 1) * std::log(dxy) -
                           s.delta * pd.y_perp.norm2() * nx / dxy;
    return LogScaled::from_log(1, lg + detail::log_gauss_ratio(x, y));
  }
  case LemmaKernel::K1: return detail::k1_integral(s, x, y);
  case LemmaKernel::K2:
  case LemmaKernel::K21:
  case LemmaKernel::K22:
  case LemmaKernel::K23:
  case LemmaKernel::K231:
  case LemmaKernel::K232:
  case LemmaKernel::K233: {
    const double r0 = nx > 0.0 ? dot(x, y) / x.norm2() : 0.0;
    if (nx == 0.0 && s.id != LemmaKernel::K2 && s.id != LemmaKernel::K21)
      return LogScaled::zero(); // r0 = 0 falls in the first case
    const auto [lo, hi] = detail::k2_interval(s.id, r0);
    return detail::k2_integral(s, x, y, lo, hi);
  }
  case LemmaKernel::A:
  case LemmaKernel::B:
  case LemmaKernel::S: {
    const auto pd = decompose(x, y);
    const double r0 = pd.r0;
    if (!(r0 > 1.0 / 3.0 && r0 < 1.0)) return LogScaled::zero();
    const double d = 1.0 - r0, yp2 = pd.y_perp.norm2();
    const double cc = s.c_closed;
    if (s.id == LemmaKernel::S) return LogScaled::from(stimaint_integral(r0, nx, cc));
    if (s.id == LemmaKernel::A) {
      const long double lg = -0.5L * (n - s.a + 1) * std::log(d) + (s.a - 1) * std::log(nx) - cc * yp2 / d +
                             std::log(std::min(1.0, nx * std::sqrt(d)));
      return LogScaled::from_log(1, lg);
    }
    if (s.a > 0 && yp2 == 0.0) return LogScaled::zero();
    const long double lg = -0.5L * (n + s.a + 2) * std::log(d) + (s.a > 0 ? 0.5L * s.a * std::log(yp2) : 0.0L) -
                           cc * yp2 / d + std::log(std::min(std::sqrt(d) / nx, d));
    return LogScaled::from_log(1, lg);
  }
  }
  throw DomainError("lemma_kernel_eval: unknown kernel");
}

} // namespace riesz
