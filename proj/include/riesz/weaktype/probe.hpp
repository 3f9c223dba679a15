#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "riesz/apply.hpp"
#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/log_scaled.hpp"
#include "riesz/parallel.hpp"
#include "riesz/quadrature.hpp"
#include "riesz/weaktype/lemma_kernels.hpp"
#include "riesz/weaktype/level_set.hpp"

namespace riesz {

using KernelFunction = std::function<LogScaled(const Point&, const Point&)>;

/// Cells of a centred radial grid with their exact gamma_{-1}-masses:
/// midpoint cells in r (geometric from r_min until the step reaches h, then
/// width h up to r_max) times equal angular cells (n = 2). n = 1 uses both half-lines.
struct RadialGrid {
  int n = 2;
  double r_min = 1e-4;
  double ratio = 1.005;
  double h = 1e-3;
  double r_max = 3.0;
  int angles = 16;

  std::vector<double> edges() const {
    require(r_min > 0.0 && r_min < r_max && ratio > 1.0 && h > 0.0, "RadialGrid: bad parameters");
    std::vector<double> e{0.0, r_min};
    while (e.back() * (ratio - 1.0) < h && e.back() * ratio < r_max) e.push_back(e.back() * ratio);
    const int m = std::max(1, static_cast<int>(std::ceil((r_max - e.back()) / h)));
    const double r0 = e.back(), hh = (r_max - r0) / m;
    for (int i = 1; i <= m; ++i) e.push_back(r0 + i * hh);
    return e;
  }
};

/// gamma_{-1} mass of the radial shell r1 < |x| < r2 per unit angle measure:
/// n = 1 one half-line, n = 2 a sector of unit angle.
inline LogScaled shell_mass(int n, double r1, double r2) {
  if (n == 2) // pi int r e^{r^2} dr = (pi/2)(e^{r2^2} - e^{r1^2})
    return LogScaled::from_log(1, std::log(0.5 * std::numbers::pi) + r2 * r2 +
                                      std::log(-std::expm1(r1 * r1 - r2 * r2)));
  require(n == 1, "shell_mass: n must be 1 or 2");
  // sqrt(pi) int e^{r^2} dr with the 4-point Gauss-Legendre rule in log scale
  const auto& gl = gauss_legendre(4);
  std::vector<LogScaled> t;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double r = 0.5 * (r1 + r2) + 0.5 * (r2 - r1) * gl.nodes[i];
    t.push_back(LogScaled::from_log(1, r * r + std::log(0.5 * (r2 - r1) * gl.weights[i])));
  }
  return log_sum(t).shifted(0.5 * std::log(std::numbers::pi));
}

struct GridCells {
  std::vector<Point> points;
  std::vector<LogScaled> mass;
  std::string description;
};

inline GridCells radial_cells(const RadialGrid& g) {
  require(g.n == 1 || g.n == 2, "radial_cells: n must be 1 or 2");
  const auto e = g.edges();
  GridCells c;
  const int na = g.n == 2 ? g.angles : 2;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    const double r = 0.5 * (e[i] + e[i + 1]);
    const LogScaled m = g.n == 2 ? shell_mass(2, e[i], e[i + 1]).shifted(std::log(2.0 * std::numbers::pi / na))
                                 : shell_mass(1, e[i], e[i + 1]);
    for (int k = 0; k < na; ++k) {
      Point p(g.n);
      if (g.n == 1) {
        p[0] = k == 0 ? r : -r;
      } else {
        const double ph = 2.0 * std::numbers::pi * (k + 0.5) / na;
        p[0] = r * std::cos(ph);
        p[1] = r * std::sin(ph);
      }
      c.points.push_back(p);
      c.mass.push_back(m);
    }
  }
  c.description = "|x| < " + std::to_string(g.r_max) + ", " + std::to_string(e.size() - 1) + " radial x " +
                  std::to_string(na) + " angular cells";
  return c;
}

/// int K(x,y) f(y) dy for f = normalized indicator of B(center, rho).
inline LogScaled apply_kernel_ball(const KernelFunction& k, const std::vector<YNode>& nodes, const LogScaled& height,
                                   const Point& x) {
  std::vector<LogScaled> t;
  t.reserve(nodes.size());
  for (const auto& nd : nodes) t.push_back(k(x, nd.y) * LogScaled::from(nd.w));
  return log_sum(t) * height;
}

struct CenterQuasinorm {
  Point center;
  LogScaled quasi_norm;
  LevelSetReport report;
};

struct ProbeResult {
  std::vector<CenterQuasinorm> centers;
  LogScaled max;
};

/// Weak-type probe: for each center y0 apply the kernel operator to
/// 1_{B(y0,rho)}/gamma_{-1}(B(y0,rho)) on the cells and report the
/// level-set quasi-norm.
inline ProbeResult weak_quasinorm_probe(const KernelFunction& k, const std::vector<Point>& centers, double rho,
                                        const GridCells& cells, const std::vector<LogScaled>& s_grid = {},
                                        int jobs = 1, const ApplyRule& rule = {}) {
  require(rho > 0.0, "weak_quasinorm_probe: radius must be positive");
  ProbeResult out;
  for (const auto& c : centers) {
    const auto nodes = ball_rule(c, rho, rule);
    const LogScaled height = LogScaled::one() / gamma_inv_ball(c, rho, rule);
    const auto tf = parallel_map<LogScaled>(
        cells.points.size(), [&](std::size_t i) { return apply_kernel_ball(k, nodes, height, cells.points[i]); }, jobs);
    WeightedSamples ws;
    for (std::size_t i = 0; i < tf.size(); ++i) ws.add(tf[i], cells.mass[i]);
    ws.domain = cells.description;
    ws.resolution = std::to_string(cells.points.size()) + " cells, " + std::to_string(nodes.size()) + " y-nodes";
    CenterQuasinorm cq{c, {}, level_set_report(ws, 1.0, s_grid)};
    cq.quasi_norm = cq.report.quasi_norm;
    if (out.max.magnitude_less(cq.quasi_norm)) out.max = cq.quasi_norm;
    out.centers.push_back(std::move(cq));
  }
  return out;
}

// ---------------------------------------------------------------------------
// The rank-one kernel e^{-|x|^2+|y|^2}|x|^{-mu}(1+|x|)^{-nu}: T f = phi(|x|) ||f||
// with phi(r) = pi^{-n/2} e^{-r^2} r^{-mu} (1+r)^{-nu} for ||f|| in L^1(gamma_{-1}).

inline double l42_log_phi(int n, double mu, double nu, double r) {
  return -0.5 * n * std::log(std::numbers::pi) - r * r - mu * std::log(r) - nu * std::log1p(r);
}

/// True when phi is strictly decreasing on (0, r_max], so that every
/// super-level set is a centred ball.
inline bool l42_decreasing(double mu, double nu, double r_max) {
  // d/dr log phi = -2r - mu/r - nu/(1+r)
  for (int i = 1; i <= 4000; ++i) {
    const double r = r_max * i / 4000.0;
    if (-2.0 * r - mu / r - nu / (1.0 + r) >= 0.0) return false;
  }
  return true;
}

/// gamma_{-1}(B(0,r)), closed form for n = 2, quadrature for n = 1.
inline LogScaled gamma_inv_centred_ball(int n, double r) {
  if (r <= 0.0) return LogScaled::zero();
  if (n == 2) return shell_mass(2, 0.0, r).shifted(std::log(2.0 * std::numbers::pi));
  require(n == 1, "gamma_inv_centred_ball: n must be 1 or 2");
  const double v = integrate_plain([](double t) { return std::exp(t * t); }, 0.0, r, 1e-13);
  return LogScaled::from(2.0 * std::sqrt(std::numbers::pi) * v);
}

/// Largest r in (0, r_hi] with log phi(r) = log s, by bisection; 0 if phi < s
/// throughout and r_hi if phi > s throughout.
inline double l42_largest_root(int n, double mu, double nu, long double log_s, double r_hi) {
  auto g = [&](double r) { return l42_log_phi(n, mu, nu, r) - log_s; };
  if (g(r_hi) > 0.0) return r_hi;
  // scan down for a sign change, then bisect the outermost one
  double hi = r_hi, lo = r_hi;
  for (;;) {
    lo = 0.5 * lo;
    if (lo < 1e-300) return 0.0;
    if (g(lo) > 0.0) break;
    hi = lo;
  }
  // the outermost crossing lies in (lo, hi]; scan finely for it
  const int m = 200;
  for (int i = m - 1; i >= 0; --i) {
    const double a = lo + (hi - lo) * i / m;
    if (g(a) > 0.0) {
      double b = lo + (hi - lo) * (i + 1) / m;
      double aa = a;
      for (int k = 0; k < 200 && b - aa > 1e-15 * b; ++k) {
        const double mid = 0.5 * (aa + b);
        (g(mid) > 0.0 ? aa : b) = mid;
      }
      return 0.5 * (aa + b);
    }
  }
  return lo;
}

/// Root-finding construction: for each s the largest root r_s of phi = s and
/// the measure of B(0, r_s) (truncated at r_max like the numerical grid).
inline LevelSetReport l42_root_oracle(int n, double mu, double nu, const std::vector<LogScaled>& s_grid, double r_max) {
  LevelSetReport rep;
  rep.domain = "|x| < " + std::to_string(r_max);
  rep.resolution = "root finding";
  for (std::size_t j = 0; j < s_grid.size(); ++j) {
    const double r = l42_largest_root(n, mu, nu, s_grid[j].logmag(), r_max);
    const LogScaled m = gamma_inv_centred_ball(n, r);
    rep.s.push_back(s_grid[j]);
    rep.measure.push_back(m);
    const LogScaled q = s_grid[j] * m;
    if (rep.quasi_norm.magnitude_less(q)) {
      rep.quasi_norm = q;
      rep.argmax = j;
    }
  }
  return rep;
}

/// Thresholds phi(r) for r log-spaced in [r_lo, r_hi], increasing in s.
inline std::vector<LogScaled> l42_thresholds(int n, double mu, double nu, double r_lo, double r_hi, int count) {
  std::vector<LogScaled> s;
  for (int i = 0; i < count; ++i) {
    const double r = r_hi * std::pow(r_lo / r_hi, static_cast<double>(i) / (count - 1));
    s.push_back(LogScaled::from_log(1, l42_log_phi(n, mu, nu, r)));
  }
  return s;
}

struct Lemma42Comparison {
  int n = 1;
  double mu = 0.0, nu = 0.0;
  bool inside = true;
  LogScaled numerical, oracle;
  double rel_diff = 0.0;
};

struct Lemma42Options {
  RadialGrid grid;
  double rho = 0.5;       ///< radius of the input ball
  double center = 1.5;    ///< its distance from the origin
  double r_lo = 1e-3;     ///< smallest radius whose level is tested
  int thresholds = 128;
  int jobs = 1;
};

/// Numerical quasi-norm of the rank-one operator (quadrature of the kernel
/// against a normalized ball indicator, level sets on a radial grid) against
/// the root-finding construction, on a common threshold grid.
inline Lemma42Comparison lemma42_compare(int n, double mu, double nu, Lemma42Options opt = {}) {
  require(n == 1 || n == 2, "lemma42_compare: n must be 1 or 2");
  opt.grid.n = n;
  if (!l42_decreasing(mu, nu, opt.grid.r_max))
    throw DomainError("lemma42_compare: phi not decreasing; level sets are not balls");
  LemmaKernelSpec spec = l42_spec(n, mu, nu);
  const KernelFunction k = [spec](const Point& x, const Point& y) { return lemma_kernel_eval(spec, x, y); };
  Point c(n);
  c[0] = opt.center;
  const auto s_grid = l42_thresholds(n, mu, nu, opt.r_lo, opt.grid.r_max, opt.thresholds);
  const auto probe = weak_quasinorm_probe(k, {c}, opt.rho, radial_cells(opt.grid), s_grid, opt.jobs);
  Lemma42Comparison out;
  out.n = n;
  out.mu = mu;
  out.nu = nu;
  out.inside = l42_hypotheses(n, mu, nu);
  out.numerical = probe.max;
  out.oracle = l42_root_oracle(n, mu, nu, s_grid, opt.grid.r_max).quasi_norm;
  out.rel_diff = std::fabs(static_cast<double>(std::exp(out.numerical.logmag() - out.oracle.logmag())) - 1.0);
  return out;
}

/// s gamma_{-1}(A_s) at s = phi(r) for small r, numerically on a radial grid
/// around the origin. Grows like r^{n-mu} when mu > n.
inline std::vector<double> l42_small_scale_profile(int n, double mu, double nu, const std::vector<double>& radii,
                                                   RadialGrid grid = {}) {
  grid.n = n;
  const auto cells = radial_cells(grid);
  std::vector<double> out;
  for (double r : radii) {
    const long double ls = l42_log_phi(n, mu, nu, r);
    LogAccumulator m;
    for (std::size_t i = 0; i < cells.points.size(); ++i)
      if (l42_log_phi(n, mu, nu, cells.points[i].norm()) > ls) m.add(cells.mass[i]);
    out.push_back((m.value() * LogScaled::from_log(1, ls)).to_double());
  }
  return out;
}

} // namespace riesz
