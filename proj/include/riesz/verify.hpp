#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "riesz/apply.hpp"
#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/hermite.hpp"
#include "riesz/kernels.hpp"
#include "riesz/parallel.hpp"
#include "riesz/quadrature.hpp"
#include "riesz/regions.hpp"
#include "riesz/spectral.hpp"
#include "riesz/weaktype/bound_sweep.hpp"
#include "riesz/weaktype/counterexample.hpp"
#include "riesz/weaktype/probe.hpp"

namespace riesz {

/// One verified property: measured value against a threshold.
struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation = "<="; ///< how measured is compared with threshold
  std::string detail;
  std::optional<SweepResult> sweep;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  double seconds = 0.0; ///< wall time; kept out of serialized reports

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  int jobs = 1;
  std::size_t samples = 1000;   ///< pairs per sweep (the sweep doubles it)
  std::string which = "all";    ///< lemma-bounds selector
  std::optional<int> alpha;     ///< l2-norms / cz-local: |alpha| (balanced index)
  std::optional<int> n;
  int B_max = 10000;
  bool refine = true;           ///< lemma-bounds: local polish of the best samples
};

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> s{"identities", "orthonormality", "semigroup", "cz-local", "lemma-bounds", "l2-norms"};
  return s;
}

namespace detail {

inline Check le_check(std::string name, double measured, double threshold, std::string detail = {}) {
  Check c;
  c.name = std::move(name);
  c.measured = measured;
  c.threshold = threshold;
  c.pass = std::isfinite(measured) && measured <= threshold;
  c.detail = std::move(detail);
  return c;
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline Point uniform_point(std::mt19937_64& g, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Point p(n);
  for (int i = 0; i < n; ++i) p[i] = u(g);
  return p;
}

} // namespace detail

// ---------------------------------------------------------------------------
// identities

/// Exponent identity and the y = y_x + y_perp geometry on 10^4 random triples
/// (x, y, r), n cycling through 1..3.
inline SuiteReport verify_identities(const VerifyOptions& opt = {}, std::size_t triples = 10000) {
  detail::Stopwatch sw;
  SuiteReport rep;
  rep.suite = "identities";
  std::mt19937_64 g(opt.seed);
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  double e_exp = 0.0, e_rx = 0.0, e_r0 = 0.0, e_rec = 0.0, e_orth = 0.0;
  for (std::size_t i = 0; i < triples; ++i) {
    const int n = 1 + static_cast<int>(i % 3);
    Point x = detail::uniform_point(g, n, -5.0, 5.0);
    const Point y = detail::uniform_point(g, n, -5.0, 5.0);
    const double r = ur(g);
    if (x.norm() < 1e-3) x[0] += 1.0;
    // -|x-ry|^2/(1-r^2) + |rx-y|^2/(1-r^2) = -|x|^2 + |y|^2
    const double d = 1.0 - r * r;
    const double a = -(x - r * y).norm2() / d, b = (r * x - y).norm2() / d;
    const double want = -x.norm2() + y.norm2();
    e_exp = std::max(e_exp, std::fabs(a + b - want) / std::max({1.0, std::fabs(a), std::fabs(b)}));

    const auto pd = decompose(x, y);
    const double lhs = (r * x - y).norm2();
    const double rhs = (r - pd.r0) * (r - pd.r0) * x.norm2() + pd.y_perp.norm2();
    e_rx = std::max(e_rx, std::fabs(lhs - rhs) / (1.0 + x.norm2() + y.norm2()));
    const double one = std::fabs(1.0 - pd.r0), geo = (x - pd.y_parallel).norm() / x.norm();
    e_r0 = std::max(e_r0, std::fabs(one - geo) / (1.0 + std::fabs(pd.r0)));
    for (int k = 0; k < n; ++k) {
      const double s = pd.y_parallel[k] + pd.y_perp[k];
      // one ulp of the largest of the three terms
      const double big = std::max({std::fabs(y[k]), std::fabs(pd.y_parallel[k]), std::fabs(pd.y_perp[k])});
      const double ulp = std::nextafter(big, std::numeric_limits<double>::infinity()) - big;
      e_rec = std::max(e_rec, std::fabs(s - y[k]) / std::max(ulp, std::numeric_limits<double>::denorm_min()));
    }
    e_orth = std::max(e_orth, std::fabs(dot(pd.y_perp, x)) / (1.0 + x.norm() * y.norm()));
  }
  const std::string on = "on " + std::to_string(triples) + " random triples";
  rep.checks.push_back(detail::le_check("exponent identity (relative)", e_exp, 1e-12, on));
  rep.checks.push_back(detail::le_check("|rx-y|^2 = |r-r0|^2|x|^2 + |y_perp|^2 (relative)", e_rx, 1e-12, on));
  rep.checks.push_back(detail::le_check("|1-r0| = |x-y_x|/|x| (relative)", e_r0, 1e-12, on));
  rep.checks.push_back(detail::le_check("y_x + y_perp = y (ulps)", e_rec, 1.0, on));
  rep.checks.push_back(detail::le_check("y_perp . x = 0 (relative)", e_orth, 1e-12, on));
  rep.seconds = sw.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// orthonormality

/// Gram matrix of {gamma h_b : |b| <= D} in L^2(gamma_{-1}) by Gauss-Hermite:
/// the integrand gamma^2 h_b h_c gamma_{-1} = pi^{-n/2} h_b h_c e^{-|x|^2}.
inline double gram_deviation(int n, int D, int order = 24) {
  require(order > D, "gram_deviation: order must exceed D");
  const auto basis = multi_indices_upto(n, D);
  const auto& gh = gauss_hermite(order);
  const int m = static_cast<int>(gh.nodes.size());
  std::vector<std::vector<double>> G(basis.size(), std::vector<double>(basis.size(), 0.0));
  std::vector<int> idx(n, 0);
  std::vector<double> hv(basis.size());
  Point p(n);
  for (;;) {
    double w = std::pow(std::numbers::pi, -0.5 * n);
    for (int i = 0; i < n; ++i) {
      p[i] = gh.nodes[idx[i]];
      w *= gh.weights[idx[i]];
    }
    for (std::size_t j = 0; j < basis.size(); ++j) hv[j] = h_normalized(basis[j], p);
    for (std::size_t j = 0; j < basis.size(); ++j)
      for (std::size_t k = j; k < basis.size(); ++k) G[j][k] += w * hv[j] * hv[k];
    int i = 0;
    while (i < n && ++idx[i] == m) idx[i++] = 0;
    if (i == n) break;
  }
  double dev = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (std::size_t k = j; k < basis.size(); ++k) dev = std::max(dev, std::fabs(G[j][k] - (j == k ? 1.0 : 0.0)));
  return dev;
}

inline SuiteReport verify_orthonormality(const VerifyOptions& = {}) {
  detail::Stopwatch sw;
  SuiteReport rep;
  rep.suite = "orthonormality";
  for (int n : {1, 2})
    rep.checks.push_back(detail::le_check("gamma h_b orthonormal, n=" + std::to_string(n) + ", |b| <= 10",
                                          gram_deviation(n, 10), 1e-8, "max |G - I|"));
  rep.seconds = sw.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// semigroup

namespace detail {

// Iterated adaptive integral of f over [lo,hi]^n (n <= 2), with the integral
// of |f| alongside.
template <class F>
std::pair<double, double> box_integral(const F& f, int n, double lo, double hi, double tol) {
  if (n == 1) {
    const double v = integrate_plain([&](double t) { return f(Point{t}); }, lo, hi, tol);
    const double a = integrate_plain([&](double t) { return std::fabs(f(Point{t})); }, lo, hi, tol);
    return {v, a};
  }
  require(n == 2, "box_integral: n must be 1 or 2");
  const double v = integrate_plain(
      [&](double s) { return integrate_plain([&](double t) { return f(Point{s, t}); }, lo, hi, tol); }, lo, hi, tol);
  // |f| only sets the scale: a loose tolerance will do
  const double a = integrate_plain(
      [&](double s) { return integrate_plain([&](double t) { return std::fabs(f(Point{s, t})); }, lo, hi, 1e-4); }, lo,
      hi, 1e-4);
  return {v, a};
}

} // namespace detail

/// Heat kernel: eigenfunctions gamma H_b with eigenvalue n+|b|, unit mass,
/// and the semigroup law in n = 1.
inline SuiteReport verify_semigroup(const VerifyOptions& = {}) {
  detail::Stopwatch sw;
  SuiteReport rep;
  rep.suite = "semigroup";
  const double L = 9.0;
  double e_eig = 0.0, e_mass = 0.0;
  for (int n : {1, 2}) {
    const std::vector<Point> xs = n == 1 ? std::vector<Point>{Point{0.3}, Point{-0.7}, Point{1.1}}
                                         : std::vector<Point>{Point{0.3, -0.4}, Point{-0.7, 0.9}};
    for (double t : {0.25, 1.0})
      for (const auto& x : xs) {
        // the integrand in y is a Gaussian bump around e^t x: integrate on a box around it
        const double c = std::exp(t) * std::max(std::fabs(x[0]), n == 2 ? std::fabs(x[1]) : 0.0);
        for (const auto& b : multi_indices_upto(n, 4)) {
          auto f = [&](const Point& y) {
            return (heat_kernel(t, x, y) * gauss_density(y)).to_double() * hermite_multi(b, y);
          };
          const auto [v, a] = detail::box_integral(f, n, -L - c, L + c, 1e-10);
          const double want = std::exp(-(n + b.order()) * t) * gauss_density(x).to_double() * hermite_multi(b, x);
          e_eig = std::max(e_eig, std::fabs(v - want) / a);
        }
        auto h = [&](const Point& y) { return heat_kernel(t, x, y).to_double(); };
        const double span = std::exp(t) * (L + c);
        e_mass = std::max(e_mass, std::fabs(detail::box_integral(h, n, -span, span, 1e-11).first - 1.0));
      }
  }
  rep.checks.push_back(detail::le_check("heat eigenfunctions gamma H_b, |b| <= 4, n <= 2, t in {0.25,1}", e_eig, 1e-6,
                                        "error relative to the integral of |H_t gamma H_b|"));
  rep.checks.push_back(detail::le_check("heat kernel mass = 1", e_mass, 1e-8, "absolute"));
  double e_sg = 0.0;
  const double t = 0.3, s = 0.5;
  for (double x : {-1.0, 0.2, 0.9})
    for (double z : {-0.5, 0.4, 1.3}) {
      auto f = [&](double w) { return (heat_kernel(t, Point{x}, Point{w}) * heat_kernel(s, Point{w}, Point{z})).to_double(); };
      const double c = std::exp(t) * std::fabs(x);
      const double v = integrate_plain(f, -c - 12.0, c + 12.0, 1e-12);
      const double want = heat_kernel(t + s, Point{x}, Point{z}).to_double();
      e_sg = std::max(e_sg, std::fabs(v - want) / want);
    }
  rep.checks.push_back(detail::le_check("semigroup H_0.3 * H_0.5 = H_0.8, n=1", e_sg, 1e-6, "relative"));
  rep.seconds = sw.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// cz-local

inline PairSampler cz_sampler(int n) {
  PairSampler s;
  s.n = n;
  s.local = true;
  s.x_max = 5.0;
  s.rho_min = 1e-3; // keeps the difference step h ~ 1e-4 an order below |x-y|
  s.accept = [](const Point& x, const Point& y) { return in_N(2.0, x, y) && !(x == y); };
  return s;
}

/// Sup of |K||x-y|^n and (|grad_x K| + |grad_y K|)|x-y|^{n+1} over N_2
/// samples, with the doubling-stability flag; plain sampling, no polish.
inline SuiteReport verify_cz_local(const VerifyOptions& opt = {}) {
  detail::Stopwatch sw;
  SuiteReport rep;
  rep.suite = "cz-local";
  const int n = opt.n.value_or(2);
  std::vector<int> orders{1, 2, 3};
  if (opt.alpha) orders = {*opt.alpha};
  const QuadratureConfig q{.rel_tol = 1e-10, .abs_tol = 1e-14};
  SweepOptions so;
  so.refine = false;
  so.jobs = opt.jobs;
  for (int k : orders) {
    const MultiIndex a = MultiIndex::balanced(n, k);
    auto kern = [a, q](const Point& x, const Point& y) { return riesz_kernel(a, x, y, KernelForm::direct, q).value; };
    const PairFunction target = [kern](const Point& x, const Point& y) { return kern(x, y).abs(); };
    const PairFunction bound = [](const Point& x, const Point& y) {
      return detail::pow_ls(distance(x, y), -x.dim());
    };
    const PairFunction grad = [kern](const Point& x, const Point& y) {
      const auto [gx, gy] = kernel_gradient_norms(kern, x, y);
      return LogScaled::from(gx + gy);
    };
    const PairFunction gbound = [](const Point& x, const Point& y) {
      return detail::pow_ls(distance(x, y), -(x.dim() + 1));
    };
    const std::string tag = " alpha=" + a.to_string() + " n=" + std::to_string(n);
    for (int which = 0; which < 2; ++which) {
      const auto r = bound_ratio_sweep(which ? grad : target, which ? gbound : bound, cz_sampler(n), opt.samples,
                                       opt.seed + 31 * k + which, so);
      Check c = detail::le_check(which ? "|grad K| |x-y|^{n+1}" + tag : "|K| |x-y|^n" + tag, r.change(),
                                 kStabilityTolerance, "relative change of the sup when the sample doubles");
      c.pass = r.finite && r.stable;
      c.sweep = r;
      rep.checks.push_back(std::move(c));
    }
  }
  rep.seconds = sw.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// lemma-bounds

inline SuiteReport verify_lemma_bounds(const VerifyOptions& opt = {}) {
  detail::Stopwatch sw;
  SuiteReport rep;
  rep.suite = "lemma-bounds";
  SweepOptions so;
  so.refine = opt.refine;
  so.jobs = opt.jobs;
  const auto entries = select_bounds(opt.which);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const auto r = bound_ratio_sweep(e.target, e.bound, e.sampler, opt.samples, opt.seed + 1009 * (i + 1), so);
    Check c = detail::le_check(e.name, r.change(), kStabilityTolerance,
                               "estimate " + e.lemma + "; relative change of the max ratio when the sample doubles");
    c.pass = r.finite && r.stable;
    c.sweep = r;
    rep.checks.push_back(std::move(c));
  }
  rep.seconds = sw.seconds();
  return rep;
}

// ---------------------------------------------------------------------------
// l2-norms

inline SuiteReport verify_l2_norms(const VerifyOptions& opt = {}) {
  detail::Stopwatch sw;
  SuiteReport rep;
  rep.suite = "l2-norms";
  auto one = [&](int n, const MultiIndex& a) {
    const auto nb = l2_norm_bound(a, n, opt.B_max);
    const std::string name = "l2 bound alpha=" + a.to_string() + " n=" + std::to_string(n) +
                             " B_max=" + std::to_string(opt.B_max);
    std::ostringstream d;
    d.precision(17);
    d << "bound " << nb.bound << ", argmax b=" << nb.argmax << ", tail monotone " << (nb.tail_monotone ? "yes" : "no");
    Check c;
    c.name = name;
    c.measured = nb.bound;
    c.detail = d.str();
    if (n == 1 && a.order() == 1) {
      c.threshold = std::numbers::sqrt2;
      c.relation = "== (1e-10)";
      c.pass = std::fabs(nb.bound - std::numbers::sqrt2) <= 1e-10;
    } else if (n == 1 && a.order() == 2) {
      c.threshold = std::sqrt(8.0);
      c.relation = "== (1e-10), argmax b=0";
      c.pass = std::fabs(nb.bound - std::sqrt(8.0)) <= 1e-10 && nb.argmax.order() == 0;
    } else if (a.order() == 1) {
      c.threshold = std::numbers::sqrt2;
      c.relation = "<=";
      c.pass = nb.bound <= std::numbers::sqrt2 * (1.0 + 1e-12);
    } else {
      c.threshold = std::numeric_limits<double>::infinity();
      c.relation = "finite";
      c.pass = std::isfinite(nb.bound);
    }
    rep.checks.push_back(std::move(c));
  };
  if (opt.alpha || opt.n) {
    const int n = opt.n.value_or(1);
    one(n, MultiIndex::balanced(n, opt.alpha.value_or(1)));
  } else {
    one(1, MultiIndex{1});
    one(1, MultiIndex{2});
    one(2, MultiIndex{1, 0});
  }
  rep.seconds = sw.seconds();
  return rep;
}

inline SuiteReport run_verify_suite(const std::string& suite, const VerifyOptions& opt = {}) {
  if (suite == "identities") return verify_identities(opt);
  if (suite == "orthonormality") return verify_orthonormality(opt);
  if (suite == "semigroup") return verify_semigroup(opt);
  if (suite == "cz-local") return verify_cz_local(opt);
  if (suite == "lemma-bounds") return verify_lemma_bounds(opt);
  if (suite == "l2-norms") return verify_l2_norms(opt);
  throw DomainError("unknown verify suite '" + suite + "'");
}

// ---------------------------------------------------------------------------
// experiments used by the acceptance run

struct OracleComparison {
  int n = 1;
  MultiIndex alpha;
  std::size_t points = 0;
  double rel_l2 = 0.0;
};

/// Quadrature vs spectral application of R_alpha to f = gamma p, p a seeded
/// random polynomial of degree `degree`, relative l^2 error over `points`
/// evaluation points in [-2.5, 2.5]^n.
inline OracleComparison oracle_equivalence(const MultiIndex& a, int degree, std::size_t points, std::uint64_t seed,
                                           int jobs = 1) {
  const int n = a.dim();
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  Polynomial p;
  for (const auto& m : multi_indices_upto(n, degree)) p.terms.push_back({m, uc(g)});
  const GridFunction f = gaussian_times(p, n);
  AnalyzeOptions ao;
  ao.order = degree + 8;
  const auto c = analyze(f.evaluator, n, degree, ao);
  const auto rc = apply_riesz_spectral(c, a);
  std::vector<Point> xs;
  for (std::size_t i = 0; i < points; ++i) xs.push_back(detail::uniform_point(g, n, -2.5, 2.5));
  const PVConfig pv;
  const QuadratureConfig q{.rel_tol = 1e-9, .abs_tol = 1e-13};
  const auto quad = parallel_map<double>(
      xs.size(), [&](std::size_t i) { return apply_riesz(a, f, xs[i], pv, q).to_double(); }, jobs);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double s = synthesize(rc, xs[i]);
    num += (quad[i] - s) * (quad[i] - s);
    den += s * s;
  }
  return {n, a, points, std::sqrt(num / den)};
}

/// Expected counterexample behaviour by |alpha| on n = 2: growth for |alpha|
/// >= 3, flat values for |alpha| <= 2.
struct CounterexampleVerdict {
  bool pass = false;
  double slope = 0.0;
  double spread = 0.0; ///< max/min of the values across eta
  std::string expectation;
};

inline CounterexampleVerdict counterexample_verdict(int order, const CounterexampleResult& r) {
  require(r.has_fit, "counterexample_verdict: need at least three eta values");
  CounterexampleVerdict v;
  v.slope = r.fit.slope;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& row : r.rows) {
    lo = std::min(lo, row.quasi_norm.to_double());
    hi = std::max(hi, row.quasi_norm.to_double());
  }
  v.spread = hi / lo;
  if (order <= 2) {
    v.expectation = "slope <= 0.3 and spread < 3";
    v.pass = v.slope <= 0.3 && v.spread < 3.0;
  } else if (order == 3) {
    v.expectation = "slope >= 0.6";
    v.pass = v.slope >= 0.6;
  } else {
    v.expectation = "slope >= 1.5";
    v.pass = v.slope >= 1.5;
  }
  return v;
}

/// (mu, nu) grid for the rank-one comparison: the hypothesis boundary
/// mu + nu = n - 2 and mu = n, plus interior points, restricted to pairs
/// for which phi is decreasing.
inline std::vector<std::pair<double, double>> lemma42_grid(int n) {
  if (n == 1) return {{0.0, 0.0}, {1.0, -2.0}, {1.0, 0.0}, {1.0, 1.0}, {0.5, 0.0}, {0.5, -1.5}};
  return {{0.0, 0.0}, {1.0, -1.0}, {2.0, 0.0}, {2.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}, {0.5, 0.5}, {2.0, -2.0}};
}

} // namespace riesz
