#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/hermite.hpp"
#include "riesz/kernels.hpp"
#include "riesz/log_scaled.hpp"
#include "riesz/quadrature.hpp"
#include "riesz/regions.hpp"

namespace riesz {

/// Where an input function lives: inside a ball, or everywhere but dominated
/// by a Gaussian (so that it is negligible beyond a fixed radius).
struct Support {
  enum class Kind { ball, gaussian };
  Kind kind = Kind::gaussian;
  Point center;
  double radius = 0.0;

  static Support ball(const Point& c, double r) {
    require(r > 0.0, "Support: radius must be positive");
    return {Kind::ball, c, r};
  }
  static Support gaussian(int n) { return {Kind::gaussian, Point(n), 0.0}; }
  bool contains(const Point& y) const { return kind == Kind::gaussian || distance(y, center) < radius; }
};

/// A function sampled on points, optionally backed by an exact evaluator.
struct GridFunction {
  int n = 0;
  std::vector<Point> points;
  std::vector<double> values;
  std::function<LogScaled(const Point&)> evaluator;
  Support support;

  bool has_evaluator() const { return static_cast<bool>(evaluator); }
  LogScaled eval(const Point& y) const {
    if (!evaluator) throw DomainError("GridFunction: no analytic evaluator attached");
    if (support.kind == Support::Kind::ball && !support.contains(y)) return LogScaled::zero();
    return evaluator(y);
  }
  /// Fill `values` from the evaluator at `points`.
  void sample() {
    values.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) values[i] = eval(points[i]).to_double();
  }
};

/// sum_i c_i x^{m_i}.
struct Polynomial {
  std::vector<std::pair<MultiIndex, double>> terms;

  double operator()(const Point& x) const {
    double s = 0.0;
    for (const auto& [m, c] : terms) {
      double t = c;
      for (int i = 0; i < x.dim(); ++i) t *= std::pow(x[i], m[i]);
      s += t;
    }
    return s;
  }
  int degree() const {
    int d = 0;
    for (const auto& t : terms) d = std::max(d, t.first.order());
    return d;
  }
};

/// Node of a y-quadrature rule.
struct YNode {
  Point y;
  double w;
  int band = 0; ///< excision band: 0 beyond eps, l inside (eps/2^l, eps/2^{l-1}]
};

struct PVConfig {
  double eps = 1e-3;
  int levels = 3;
  /// Extrapolation disagreement allowed, relative to the integral of |K g|.
  double tol = 1e-6;
  void validate() const {
    require(eps > 0.0, "PVConfig: eps must be positive");
    require(levels >= 2, "PVConfig: at least two Richardson levels");
    require(tol > 0.0, "PVConfig: tol must be positive");
  }
};

/// Resolution of the y-quadrature rules.
struct ApplyRule {
  int radial_order = 8;     ///< Gauss-Legendre nodes per radial panel
  int angles = 48;          ///< trapezoid angles (n = 2) / azimuths (n = 3)
  int polar = 16;           ///< Gauss-Legendre nodes in cos(theta) (n = 3) or cone angles
  int axial_order = 8;      ///< ball rule: nodes per axial panel
  int transverse_order = 12;///< ball rule: transverse nodes
  double gaussian_pad = 8.0;///< Gaussian inputs are truncated at |y| = |x| + pad
  double far_ratio = 0.5;   ///< ball rule once dist(x, ball) >= far_ratio * radius
};

namespace detail {

// Panel edges from a to b, first length h0, doubling, length capped at cap.
inline std::vector<double> graded_edges(double a, double b, double h0, double cap) {
  std::vector<double> e{a};
  double h = std::max(h0, 1e-300);
  while (e.back() < b) {
    e.push_back(std::min(b, e.back() + std::min(h, cap)));
    h *= 2.0;
  }
  return e;
}

// Orthonormal completion of the unit vector e.
inline std::vector<Point> orthonormal_complement(const Point& e) {
  const int n = e.dim();
  std::vector<Point> basis;
  for (int k = 0; k < n && static_cast<int>(basis.size()) < n - 1; ++k) {
    Point v(n);
    v[k] = 1.0;
    v -= dot(v, e) * e;
    for (const auto& b : basis) v -= dot(v, b) * b;
    const double nv = v.norm();
    if (nv > 1e-8) basis.push_back((1.0 / nv) * v);
  }
  return basis;
}

inline Point axis_or_first(const Point& c) {
  const double nc = c.norm();
  Point e(c.dim());
  if (nc > 0.0)
    e = (1.0 / nc) * c;
  else
    e[0] = 1.0;
  return e;
}

} // namespace detail

/// Quadrature for integrals over the ball B(c,R), graded toward the point of
/// the ball farthest from the origin, where weights like exp(|y|^2)
/// concentrate (scale 1/(2|c|) along the axis). The axial depth is tau = t^2
/// from the far pole on the far half and from the near pole on the near half,
/// which removes the square-root edge of the chord at both poles.
inline std::vector<YNode> ball_rule(const Point& c, double R, const ApplyRule& rule = {}) {
  require(R > 0.0, "ball_rule: radius must be positive");
  const int n = c.dim();
  const Point e = detail::axis_or_first(c);
  const auto perp = detail::orthonormal_complement(e);
  const double lam = std::min(R, 1.0 / (2.0 * std::max(c.norm(), 1e-12)));
  const double tmax = std::sqrt(R);
  const auto far = detail::graded_edges(0.0, tmax, std::sqrt(lam), tmax);
  const int m_near = std::min(16, static_cast<int>(std::ceil(std::sqrt(R / lam))));
  const auto& ga = gauss_legendre(rule.axial_order);
  const auto& gt = gauss_legendre(rule.transverse_order);
  std::vector<YNode> out;
  auto slab = [&](double s, double b, double wt) {
    const Point base = c + s * e;
    if (n == 1) {
      out.push_back({base, wt, 0});
    } else if (n == 2) {
      for (std::size_t j = 0; j < gt.nodes.size(); ++j)
        out.push_back({base + (b * gt.nodes[j]) * perp[0], wt * b * gt.weights[j], 0});
    } else {
      const int m = rule.angles;
      for (std::size_t j = 0; j < gt.nodes.size(); ++j) {
        const double rho = 0.5 * b * (gt.nodes[j] + 1.0);
        const double wr = 0.5 * b * gt.weights[j] * rho;
        for (int k = 0; k < m; ++k) {
          const double ph = 2.0 * std::numbers::pi * k / m;
          Point y = base + (rho * std::cos(ph)) * perp[0];
          if (n >= 3) y += (rho * std::sin(ph)) * perp[1];
          out.push_back({y, wt * wr * 2.0 * std::numbers::pi / m, 0});
        }
      }
    }
  };
  for (int side = 0; side < 2; ++side) {
    std::vector<double> edges = far;
    if (side == 1) {
      edges.clear();
      for (int i = 0; i <= m_near; ++i) edges.push_back(tmax * i / m_near);
    }
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double a = edges[p], h = edges[p + 1] - edges[p];
      for (std::size_t i = 0; i < ga.nodes.size(); ++i) {
        const double t = a + 0.5 * h * (ga.nodes[i] + 1.0);
        const double wt = 0.5 * h * ga.weights[i] * 2.0 * t; // d tau = 2t dt
        const double tau = t * t;
        const double b = t * std::sqrt(std::max(0.0, 2.0 * R - tau));
        slab(side == 0 ? R - tau : tau - R, b, wt);
      }
    }
  }
  return out;
}

/// gamma_{-1}(B(c,R)) via the graded ball rule.
inline LogScaled gamma_inv_ball(const Point& c, double R, const ApplyRule& rule = {}) {
  std::vector<LogScaled> terms;
  for (const auto& nd : ball_rule(c, R, rule)) terms.push_back(inv_gauss_density(nd.y) * LogScaled::from(nd.w));
  return log_sum(terms);
}

namespace detail {

struct Direction {
  Point w;
  double weight;
};

// Full-sphere directions.
inline std::vector<Direction> sphere_directions(int n, const ApplyRule& rule) {
  std::vector<Direction> d;
  if (n == 1) {
    d.push_back({Point{1.0}, 1.0});
    d.push_back({Point{-1.0}, 1.0});
  } else if (n == 2) {
    for (int k = 0; k < rule.angles; ++k) {
      const double ph = 2.0 * std::numbers::pi * (k + 0.5) / rule.angles;
      d.push_back({Point{std::cos(ph), std::sin(ph)}, 2.0 * std::numbers::pi / rule.angles});
    }
  } else if (n == 3) {
    const auto& g = gauss_legendre(rule.polar);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double u = g.nodes[i], s = std::sqrt(1.0 - u * u);
      for (int k = 0; k < rule.angles; ++k) {
        const double ph = 2.0 * std::numbers::pi * (k + 0.5) / rule.angles;
        d.push_back({Point{s * std::cos(ph), s * std::sin(ph), u}, g.weights[i] * 2.0 * std::numbers::pi / rule.angles});
      }
    }
  } else {
    throw DomainError("apply: polar rule implemented for n <= 3");
  }
  return d;
}

// Directions of the cone from x (outside the ball) subtended by B(c,R); the
// angle from the axis is th = th_max sin(psi), which makes the chord length
// smooth at the rim.
inline std::vector<Direction> cone_directions(const Point& x, const Point& c, double R, const ApplyRule& rule) {
  const int n = x.dim();
  const Point dv = c - x;
  const double D = dv.norm();
  const Point e = (1.0 / D) * dv;
  const double thmax = std::asin(std::min(1.0, R / D));
  std::vector<Direction> d;
  if (n == 1) {
    d.push_back({e, 1.0});
    return d;
  }
  const auto perp = orthonormal_complement(e);
  const auto& g = gauss_legendre(rule.polar);
  if (n == 2) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double psi = 0.5 * std::numbers::pi * g.nodes[i];
      const double th = thmax * std::sin(psi);
      const double w = 0.5 * std::numbers::pi * g.weights[i] * thmax * std::cos(psi);
      d.push_back({std::cos(th) * e + std::sin(th) * perp[0], w});
    }
  } else if (n == 3) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double psi = 0.25 * std::numbers::pi * (g.nodes[i] + 1.0);
      const double th = thmax * std::sin(psi);
      const double w = 0.25 * std::numbers::pi * g.weights[i] * thmax * std::cos(psi) * std::sin(th);
      for (int k = 0; k < rule.angles; ++k) {
        const double ph = 2.0 * std::numbers::pi * (k + 0.5) / rule.angles;
        const Point dir = std::cos(th) * e + (std::sin(th) * std::cos(ph)) * perp[0] + (std::sin(th) * std::sin(ph)) * perp[1];
        d.push_back({dir, w * 2.0 * std::numbers::pi / rule.angles});
      }
    }
  } else {
    throw DomainError("apply: polar rule implemented for n <= 3");
  }
  return d;
}

// Ray x + rho w against the sphere |y - c| = R: the rho-interval inside, if any.
inline bool ray_ball(const Point& x, const Point& w, const Point& c, double R, double& lo, double& hi) {
  const Point d = x - c;
  const double b = dot(w, d), q = d.norm2() - R * R;
  const double disc = b * b - q;
  if (disc <= 0.0) return false;
  const double s = std::sqrt(disc);
  lo = -b - s;
  hi = -b + s;
  return hi > 0.0;
}

} // namespace detail

/// Polar rule around x. Inside-support (or Gaussian) evaluation excises
/// rho < eps / 2^{levels-1}; the bands between the excision radii are tagged
/// for extrapolation.
inline std::vector<YNode> polar_rule(const Point& x, const Support& sup, bool singular, const PVConfig& pv,
                                     const ApplyRule& rule) {
  const int n = x.dim();
  const auto& gl = gauss_legendre(rule.radial_order);
  std::vector<YNode> out;
  const bool ball = sup.kind == Support::Kind::ball;
  const bool inside = ball && sup.contains(x);
  const auto dirs = (ball && !inside) ? detail::cone_directions(x, sup.center, sup.radius, rule)
                                      : detail::sphere_directions(n, rule);
  const double rho_gauss = x.norm() + rule.gaussian_pad;
  for (const auto& dir : dirs) {
    std::vector<double> edges;
    double start = 0.0, stop = 0.0;
    double in_lo = 0.0, in_hi = 0.0;
    const bool hits = ball && detail::ray_ball(x, dir.w, sup.center, sup.radius, in_lo, in_hi);
    if (singular) {
      for (int l = pv.levels - 1; l >= 0; --l) edges.push_back(pv.eps * std::ldexp(1.0, -l));
      start = pv.eps;
      stop = ball ? std::max(hits ? in_hi : 0.0, rho_gauss) : rho_gauss;
    } else {
      if (!hits) continue;
      start = std::max(in_lo, 0.0);
      stop = in_hi;
      edges.push_back(start);
    }
    const double h0 = singular ? pv.eps : std::max(start, 1e-3 * sup.radius);
    auto more = detail::graded_edges(start, stop, h0, 1.0);
    edges.insert(edges.end(), more.begin() + 1, more.end());
    if (singular && hits && in_hi > start && in_hi < stop) {
      edges.push_back(in_hi); // f jumps at the sphere
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double a = edges[p], h = edges[p + 1] - a;
      if (h <= 0.0) continue;
      int band = 0;
      if (singular)
        for (int l = 1; l < pv.levels; ++l)
          if (a < pv.eps * std::ldexp(1.0, -(l - 1)) * (1.0 - 1e-12)) band = l;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double rho = a + 0.5 * h * (gl.nodes[i] + 1.0);
        out.push_back({x + rho * dir.w, dir.weight * 0.5 * h * gl.weights[i] * std::pow(rho, n - 1), band});
      }
    }
  }
  return out;
}

/// R_alpha gamma = n^{-|alpha|/2} (-1)^{|alpha|} H_alpha gamma.
inline LogScaled riesz_of_gaussian(const MultiIndex& a, const Point& x) {
  const int k = a.order();
  LogScaled v = gauss_density(x) * LogScaled::from(hermite_multi(a, x)) *
                LogScaled::from_log(1, -0.5L * k * std::log(static_cast<long double>(x.dim())));
  return k % 2 ? -v : v;
}

/// The three values produced by one pass over the y-nodes.
struct ApplyResult {
  LogScaled full;  ///< R_alpha f(x)
  LogScaled local; ///< R_{alpha,loc} f(x)
  LogScaled global;///< R_{alpha,glob} f(x)
  double pv_error = 0.0; ///< extrapolation disagreement relative to the integral of |K g|
  std::size_t nodes = 0;
  bool excised = false;
};

namespace detail {

// Neville table for V(eps 2^{-l}) = V0 + a1 eps + a2 eps^2 + ...
inline std::pair<LogScaled, LogScaled> richardson(const std::vector<LogScaled>& v) {
  std::vector<LogScaled> t = v, prev;
  LogScaled last_diff;
  for (std::size_t m = 1; m < v.size(); ++m) {
    prev = t;
    const double f = 1.0 / (std::ldexp(1.0, static_cast<int>(m)) - 1.0);
    for (std::size_t l = v.size() - 1; l >= m; --l) t[l] = prev[l] + (prev[l] - prev[l - 1]) * LogScaled::from(f);
    last_diff = t.back() - prev.back();
  }
  return {t.back(), last_diff.abs()};
}

} // namespace detail

/// Apply R_alpha, its local and its global part to f at x.
///
/// Away from supp f the kernel is smooth and the integral is taken directly.
/// When x lies in the support the Gaussian c gamma with c = f(x)/gamma(x) is
/// subtracted: R_alpha f = int K (f - c gamma) + c R_alpha gamma, where the
/// first integral converges absolutely and the second is known in closed
/// form. The remaining small-|x-y| cutoff is removed by Richardson
/// extrapolation over eps, eps/2, ...
inline ApplyResult apply_all(const MultiIndex& a, const GridFunction& f, const Point& x, const PVConfig& pv,
                             const QuadratureConfig& cfg, const ApplyRule& rule = {}) {
  pv.validate();
  require(a.dim() == x.dim() && f.n == x.dim(), "apply: dimension mismatch");
  require(f.has_evaluator(), "apply: input needs an analytic evaluator");
  const Support& sup = f.support;
  const bool ball = sup.kind == Support::Kind::ball;
  const bool inside = !ball || sup.contains(x);
  ApplyResult res;
  std::vector<YNode> nodes;
  if (ball && !inside && distance(x, sup.center) - sup.radius >= rule.far_ratio * sup.radius)
    nodes = ball_rule(sup.center, sup.radius, rule);
  else
    nodes = polar_rule(x, sup, inside, pv, rule);
  res.nodes = nodes.size();
  res.excised = inside;
  const LogScaled c = inside ? f.eval(x) / gauss_density(x) : LogScaled::zero();
  std::vector<LogAccumulator> loc_band(inside ? pv.levels : 1);
  LogAccumulator glob_f, glob_g, absint;
  for (const auto& nd : nodes) {
    if (nd.y == x) continue;
    const LogScaled fy = f.eval(nd.y);
    const LogScaled g = inside ? fy - c * gauss_density(nd.y) : fy;
    const double ch = chi(x, nd.y);
    if (g.is_zero() && (c.is_zero() || ch == 1.0)) continue;
    const LogScaled k = riesz_kernel(a, x, nd.y, cfg).value * LogScaled::from(nd.w);
    if (ch > 0.0) loc_band[nd.band].add(k * g * LogScaled::from(ch));
    if (ch < 1.0) {
      glob_f.add(k * fy * LogScaled::from(1.0 - ch));
      if (!c.is_zero()) glob_g.add(k * gauss_density(nd.y) * LogScaled::from(1.0 - ch));
    }
    absint.add((k * g).abs());
  }
  LogScaled local;
  if (inside) {
    std::vector<LogScaled> v;
    LogAccumulator run;
    for (int l = 0; l < pv.levels; ++l) {
      run.add(loc_band[l].value());
      v.push_back(run.value());
    }
    auto [val, diff] = detail::richardson(v);
    local = val;
    const LogScaled scale = absint.value();
    res.pv_error = scale.is_zero() ? 0.0 : (diff / scale).to_double();
    if (res.pv_error > pv.tol)
      throw NonConvergence("apply: principal-value extrapolation unstable at x = " + [&] {
        std::ostringstream os;
        os << x << " (disagreement " << res.pv_error << ")";
        return os.str();
      }());
    local = local + c * (riesz_of_gaussian(a, x) - glob_g.value());
  } else {
    local = loc_band[0].value();
  }
  res.local = local;
  res.global = glob_f.value();
  res.full = res.local + res.global;
  return res;
}

inline LogScaled apply_riesz(const MultiIndex& a, const GridFunction& f, const Point& x, const PVConfig& pv,
                             const QuadratureConfig& cfg, const ApplyRule& rule = {}) {
  return apply_all(a, f, x, pv, cfg, rule).full;
}
inline LogScaled apply_loc(const MultiIndex& a, const GridFunction& f, const Point& x, const PVConfig& pv,
                           const QuadratureConfig& cfg, const ApplyRule& rule = {}) {
  return apply_all(a, f, x, pv, cfg, rule).local;
}
inline LogScaled apply_glob(const MultiIndex& a, const GridFunction& f, const Point& x, const PVConfig& pv,
                            const QuadratureConfig& cfg, const ApplyRule& rule = {}) {
  return apply_all(a, f, x, pv, cfg, rule).global;
}

/// gamma * p.
inline GridFunction gaussian_times(const Polynomial& p, int n) {
  GridFunction f;
  f.n = n;
  f.support = Support::gaussian(n);
  f.evaluator = [p](const Point& y) { return gauss_density(y) * LogScaled::from(p(y)); };
  return f;
}

/// 1_{B(c,R)} / gamma_{-1}(B(c,R)), unit norm in L^1(gamma_{-1}).
inline GridFunction normalized_ball_indicator(const Point& c, double R, const ApplyRule& rule = {}) {
  GridFunction f;
  f.n = c.dim();
  f.support = Support::ball(c, R);
  const LogScaled inv = LogScaled::one() / gamma_inv_ball(c, R, rule);
  f.evaluator = [inv](const Point&) { return inv; };
  return f;
}

} // namespace riesz
