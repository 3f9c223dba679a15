#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/log_scaled.hpp"

namespace riesz {

/// Nodes and weights of a fixed one-dimensional rule.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline QuadRule compute_gauss_legendre(int n) {
  QuadRule q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15) break;
    }
    q.nodes[i] = -z;
    q.nodes[n - 1 - i] = z;
    q.weights[i] = q.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return q;
}

// Newton iteration on the orthonormal Hermite recurrence with the usual
// asymptotic starting guesses.
inline QuadRule compute_gauss_hermite(int n) {
  QuadRule q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * q.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * q.nodes[1];
    else
      z = 2.0 * z - q.nodes[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-14 * std::max(1.0, std::fabs(z))) break;
    }
    q.nodes[i] = z;
    q.nodes[n - 1 - i] = -z;
    q.weights[i] = q.weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  // stored as descending; flip to ascending for readability
  std::reverse(q.nodes.begin(), q.nodes.end());
  std::reverse(q.weights.begin(), q.weights.end());
  return q;
}

template <class F>
const QuadRule& cached_rule(int n, std::map<int, QuadRule>& cache, F&& make) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make(n)).first;
  return it->second;
}

} // namespace detail

/// Gauss-Legendre rule on [-1, 1].
inline const QuadRule& gauss_legendre(int n) {
  require(n >= 1, "gauss_legendre: n must be positive");
  static std::map<int, QuadRule> cache;
  return detail::cached_rule(n, cache, detail::compute_gauss_legendre);
}

/// Gauss-Hermite rule for the weight exp(-x^2) on the real line.
inline const QuadRule& gauss_hermite(int n) {
  require(n >= 1, "gauss_hermite: n must be positive");
  static std::map<int, QuadRule> cache;
  return detail::cached_rule(n, cache, detail::compute_gauss_hermite);
}

/// Endpoint substitution applied before adaptive subdivision.
enum class Substitution {
  identity,   ///< integrate in r directly
  exp_at_one, ///< r = 1 - exp(-v), regularizes (1-r)-type singularities
  log_at_zero ///< t = -log r, regularizes the r -> 0 logarithmic factor
};

struct QuadratureConfig {
  double rel_tol = 1e-10;
  /// Absolute tolerance measured against the integral of |f|; it takes over
  /// when the signed integral cancels to far below the integrand's mass.
  double abs_tol = 1e-13;
  int max_subdivisions = 400;
  Substitution substitution = Substitution::identity;

  void validate() const {
    require(rel_tol > 0.0 && abs_tol > 0.0, "QuadratureConfig: tolerances must be positive");
    require(max_subdivisions >= 1, "QuadratureConfig: max_subdivisions must be >= 1");
  }
  QuadratureConfig with(Substitution s) const {
    QuadratureConfig c = *this;
    c.substitution = s;
    return c;
  }
};

/// A point of (0,1) with its complement and log computed without
/// cancellation, whatever substitution produced it.
struct RNode {
  double r;
  double one_minus_r;
  double neg_log_r;
};

struct IntegrationResult {
  LogScaled value;
  LogScaled abs_error;
  LogScaled l1; ///< integral of |f|
  int subdivisions = 0;

  double relative_error() const {
    if (value.is_zero()) return abs_error.is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
    return static_cast<double>(std::exp(abs_error.logmag() - value.logmag()));
  }
};

namespace detail {

inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi;
  LogScaled value, error, l1;
};

// 15-point Gauss-Kronrod on [lo,hi] of a LogScaled-valued integrand, with
// the QUADPACK error heuristic applied in a common log scale.
template <class G>
Segment gk15(const G& g, double lo, double hi) {
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  LogScaled f[15];
  f[7] = g(c);
  for (int j = 0; j < 7; ++j) {
    f[j] = g(c - h * kXgk[j]);
    f[14 - j] = g(c + h * kXgk[j]);
  }
  long double m = -std::numeric_limits<long double>::infinity();
  for (const auto& v : f) {
    if (v.is_zero()) continue;
    if (!std::isfinite(static_cast<double>(v.logmag())))
      throw NonConvergence("adaptive quadrature: integrand not finite on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    m = std::max(m, v.logmag());
  }
  Segment s{lo, hi, {}, {}, {}};
  if (m == -std::numeric_limits<long double>::infinity()) return s;
  double v[15];
  for (int j = 0; j < 15; ++j) v[j] = f[j].is_zero() ? 0.0 : f[j].sign() * std::exp(static_cast<double>(f[j].logmag() - m));
  double resk = kWgk[7] * v[7], resg = kWg[3] * v[7], resabs = kWgk[7] * std::fabs(v[7]);
  for (int j = 0; j < 7; ++j) {
    const double pair = v[j] + v[14 - j];
    resk += kWgk[j] * pair;
    resabs += kWgk[j] * (std::fabs(v[j]) + std::fabs(v[14 - j]));
    if (j % 2 == 1) resg += kWg[j / 2] * pair;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::fabs(v[7] - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::fabs(v[j] - reskh) + std::fabs(v[14 - j] - reskh));
  double err = std::fabs(resk - resg);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs);
  const long double scale = m + std::log(static_cast<long double>(h));
  s.value = LogScaled::from(resk).shifted(scale);
  s.error = LogScaled::from(err).shifted(scale);
  s.l1 = LogScaled::from(resabs).shifted(scale);
  return s;
}

// Globally adaptive bisection on the segment with the largest error, seeded
// with the panels delimited by `edges` (ascending, at least two entries).
template <class G>
IntegrationResult adaptive(const G& g, const std::vector<double>& edges, const QuadratureConfig& cfg) {
  std::vector<Segment> segs;
  segs.reserve(edges.size() + 64);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) segs.push_back(gk15(g, edges[i], edges[i + 1]));
  IntegrationResult res;
  const long double log_rel = std::log(static_cast<long double>(cfg.rel_tol));
  const long double log_abs = std::log(static_cast<long double>(cfg.abs_tol));
  std::vector<LogScaled> buf(segs.size());
  auto sum = [&](auto field) {
    buf.resize(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) buf[i] = segs[i].*field;
    return log_sum(buf);
  };
  for (int iter = 0;; ++iter) {
    res.value = sum(&Segment::value);
    res.abs_error = sum(&Segment::error);
    res.l1 = sum(&Segment::l1);
    res.subdivisions = iter;
    if (res.abs_error.is_zero()) return res;
    long double target = -std::numeric_limits<long double>::infinity();
    if (!res.value.is_zero()) target = res.value.logmag() + log_rel;
    if (!res.l1.is_zero()) target = std::max(target, res.l1.logmag() + log_abs);
    if (res.abs_error.logmag() <= target) return res;
    if (iter >= cfg.max_subdivisions) break;
    auto worst = std::max_element(segs.begin(), segs.end(),
                                  [](const Segment& a, const Segment& b) { return a.error.magnitude_less(b.error); });
    const double mid = 0.5 * (worst->lo + worst->hi);
    if (!(mid > worst->lo && mid < worst->hi)) break; // interval exhausted at machine resolution
    const Segment left = gk15(g, worst->lo, mid);
    const Segment right = gk15(g, mid, worst->hi);
    *worst = left;
    segs.push_back(right);
  }
  std::ostringstream os;
  os << "adaptive quadrature did not converge: estimate " << res.value << ", error " << res.abs_error << " after "
     << res.subdivisions << " subdivisions";
  throw NonConvergence(os.str());
}

template <class G>
IntegrationResult adaptive(const G& g, double lo, double hi, const QuadratureConfig& cfg) {
  return adaptive(g, std::vector<double>{lo, hi}, cfg);
}

// Map r-breakpoints strictly inside (a,b) through `to_inner`, bracketed by
// the inner images of the endpoints.
template <class M>
std::vector<double> seed_edges(double lo, double hi, double a, double b, std::span<const double> breaks, M to_inner) {
  std::vector<double> e{lo};
  std::vector<double> inner;
  for (double r : breaks)
    if (r > a && r < b) inner.push_back(to_inner(r));
  std::sort(inner.begin(), inner.end());
  for (double u : inner)
    if (u > e.back() && u < hi) e.push_back(u);
  e.push_back(hi);
  return e;
}

} // namespace detail

/// Integrate f(RNode) -> LogScaled over [a,b] within [0,1] after the
/// configured endpoint substitution. An infinite substituted range is folded
/// onto [0,1) by w -> w/(1-w). Optional breakpoints (values of r) seed the
/// initial subdivision, e.g. at a known narrow peak of the integrand.
template <class F>
IntegrationResult integrate(const F& f, double a, double b, const QuadratureConfig& cfg,
                            std::span<const double> breaks = {}) {
  cfg.validate();
  require(0.0 <= a && a < b && b <= 1.0, "integrate: need 0 <= a < b <= 1");
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto fold = [](double u, double lo) { const double d = u - lo; return d / (1.0 + d); };
  switch (cfg.substitution) {
  case Substitution::identity: {
    auto g = [&](double r) { return f(RNode{r, 1.0 - r, -std::log(r)}); };
    return detail::adaptive(g, detail::seed_edges(a, b, a, b, breaks, [](double r) { return r; }), cfg);
  }
  case Substitution::log_at_zero: {
    // r = exp(-t), dr = exp(-t) dt; t decreases in r so edges are reflected
    const double tlo = -std::log(b);
    const double thi = a > 0.0 ? -std::log(a) : inf;
    auto at = [&](double t) {
      const double r = std::exp(-t);
      if (r == 0.0) return LogScaled::zero(); // beyond double range; weight exp(-t) < 1e-323
      return f(RNode{r, -std::expm1(-t), t}).shifted(-t);
    };
    if (thi < inf)
      return detail::adaptive(at, detail::seed_edges(tlo, thi, a, b, breaks, [](double r) { return -std::log(r); }), cfg);
    auto g = [&](double w) {
      const double om = 1.0 - w;
      if (om <= 0.0) return LogScaled::zero();
      return at(tlo + w / om).shifted(-2.0 * std::log(om));
    };
    auto to_w = [&](double r) { return fold(-std::log(r), tlo); };
    return detail::adaptive(g, detail::seed_edges(0.0, 1.0, a, b, breaks, to_w), cfg);
  }
  case Substitution::exp_at_one: {
    // r = 1 - exp(-v), dr = exp(-v) dv
    const double vlo = -std::log1p(-a);
    const double vhi = b < 1.0 ? -std::log1p(-b) : inf;
    auto at = [&](double v) {
      const double om = std::exp(-v);
      if (om == 0.0) return LogScaled::zero(); // beyond double range; weight exp(-v) < 1e-323
      return f(RNode{-std::expm1(-v), om, -std::log1p(-om)}).shifted(-v);
    };
    auto to_v = [](double r) { return -std::log1p(-r); };
    if (vhi < inf) return detail::adaptive(at, detail::seed_edges(vlo, vhi, a, b, breaks, to_v), cfg);
    auto g = [&](double w) {
      const double om = 1.0 - w;
      if (om <= 0.0) return LogScaled::zero();
      return at(vlo + w / om).shifted(-2.0 * std::log(om));
    };
    auto to_w = [&](double r) { return fold(to_v(r), vlo); };
    return detail::adaptive(g, detail::seed_edges(0.0, 1.0, a, b, breaks, to_w), cfg);
  }
  }
  throw DomainError("integrate: unknown substitution");
}

template <class F>
IntegrationResult integrate01(const F& f, const QuadratureConfig& cfg) {
  return integrate(f, 0.0, 1.0, cfg);
}

/// Plain double integral over [a,b] by adaptive Gauss-Kronrod; convenience
/// wrapper for oracles and smooth auxiliary integrals.
template <class F>
double integrate_plain(const F& f, double a, double b, double rel_tol = 1e-12, int max_subdivisions = 2000) {
  QuadratureConfig cfg;
  cfg.rel_tol = rel_tol;
  cfg.abs_tol = rel_tol * 1e-3;
  cfg.max_subdivisions = max_subdivisions;
  auto g = [&](double x) { return LogScaled::from(f(x)); };
  return detail::adaptive(g, a, b, cfg).value.to_double();
}

} // namespace riesz
