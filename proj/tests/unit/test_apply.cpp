#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "riesz/riesz.hpp"

using namespace riesz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

QuadratureConfig kq() {
  QuadratureConfig q;
  q.rel_tol = 1e-9;
  q.abs_tol = 1e-13;
  return q;
}

// prod_i b(y_i - c_i) with the smooth bump b(u) = exp(1 - 1/(1-u^2)) on (-1,1)
GridFunction product_bump(const Point& c) {
  GridFunction f;
  f.n = c.dim();
  f.support = Support::ball(c, std::sqrt(static_cast<double>(c.dim())));
  f.evaluator = [c](const Point& y) {
    long double l = 0;
    for (int i = 0; i < c.dim(); ++i) {
      const double u = y[i] - c[i];
      if (std::fabs(u) >= 1.0) return LogScaled::zero();
      l += 1.0 - 1.0 / (1.0 - u * u);
    }
    return LogScaled::from_log(1, l);
  };
  return f;
}

std::vector<double> h_table(double s, int D) {
  std::vector<double> v(D + 1);
  double a = 1, b = std::numbers::sqrt2 * s;
  for (int k = 0; k <= D; ++k) {
    v[k] = a;
    const double nx = std::sqrt(2.0 / (k + 2)) * s * b - std::sqrt((k + 1.0) / (k + 2)) * a;
    a = b;
    b = nx;
  }
  return v;
}

// 1-d coefficients int b(s-c) h_k(s) ds by fine Gauss-Legendre panels
std::vector<double> bump_coefficients(double c, int D) {
  std::vector<double> out(D + 1, 0.0);
  const auto& gl = gauss_legendre(24);
  const int P = 200;
  const double h = 2.0 / P;
  for (int p = 0; p < P; ++p)
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double s = c - 1 + h * (p + 0.5 * (gl.nodes[i] + 1)), u = s - c;
      const double w = 0.5 * h * gl.weights[i] * std::exp(1 - 1 / (1 - u * u));
      const auto t = h_table(s, D);
      for (int k = 0; k <= D; ++k) out[k] += w * t[k];
    }
  return out;
}

// R_alpha f(x) from the Hermite expansion of the product bump. The series is
// Abel-damped by exp(-t(|b|+n)) and extrapolated to t = 0 (two Richardson
// steps); undamped truncations converge far too slowly for compact support.
double spectral_bump_oracle(const MultiIndex& a, const Point& c, const Point& x) {
  const int n = x.dim(), k = a.order();
  auto damped = [&](double t) {
    const int D = static_cast<int>(40.0 / t);
    std::vector<std::vector<double>> cf, hx;
    for (int i = 0; i < n; ++i) {
      cf.push_back(bump_coefficients(c[i], D));
      hx.push_back(h_table(x[i], D + k));
    }
    double s = 0.0;
    if (n == 1) {
      for (int b = 0; b <= D; ++b)
        s += std::exp(-t * (b + 1)) * riesz_multiplier(a, MultiIndex{b}, 1) * cf[0][b] * hx[0][b + a[0]];
    } else {
      for (int b1 = 0; b1 <= D; ++b1)
        for (int b2 = 0; b1 + b2 <= D; ++b2) {
          const double m = riesz_multiplier(a, MultiIndex{b1, b2}, 2);
          s += std::exp(-t * (b1 + b2 + 2)) * m * cf[0][b1] * cf[1][b2] * hx[0][b1 + a[0]] * hx[1][b2 + a[1]];
        }
    }
    return gauss_density(x).to_double() * s;
  };
  const double t = 0.04, A = damped(t), B = damped(t / 2), C = damped(t / 4);
  const double r1 = 2 * B - A, r2 = 2 * C - B;
  return (4 * r2 - r1) / 3;
}

} // namespace

TEST_CASE("Gaussian input follows the eigen-ladder", "[apply]") {
  // R_1 (gamma h_0) = -sqrt2 gamma h_1
  const auto f = gaussian_times(Polynomial{{{MultiIndex{0}, 1.0}}}, 1);
  for (double x : {0.5, 1.0, 2.0}) {
    const double want = -std::numbers::sqrt2 * gamma_h(MultiIndex{1}, Point{x}).to_double();
    CHECK_THAT(apply_riesz(MultiIndex{1}, f, Point{x}, PVConfig{}, kq()).to_double(), WithinRel(want, 1e-3));
  }
  // a non-eigen Gaussian polynomial through the spectral path
  const auto r = oracle_equivalence(MultiIndex{1}, 3, 10, 5, 1);
  CHECK(r.rel_l2 <= 1e-3);
}

TEST_CASE("zero input", "[apply]") {
  const auto f = gaussian_times(Polynomial{}, 2);
  CHECK(apply_riesz(MultiIndex{1, 1}, f, Point{0.3, 0.2}, PVConfig{}, kq()).is_zero());
  GridFunction g;
  g.n = 1;
  g.support = Support::ball(Point{0.0}, 1.0);
  g.evaluator = [](const Point&) { return LogScaled::zero(); };
  CHECK(apply_riesz(MultiIndex{2}, g, Point{0.5}, PVConfig{}, kq()).is_zero());
}

TEST_CASE("local and global parts add up", "[apply]") {
  const auto f = product_bump(Point{0.5, -0.3});
  std::mt19937_64 g(41);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const Point x{u(g), u(g)};
    const auto a = MultiIndex::balanced(2, 1 + i % 3);
    const auto r = apply_all(a, f, x, PVConfig{}, kq());
    const double sum = (r.local + r.global).to_double(), full = r.full.to_double();
    CHECK(std::fabs(sum - full) <= 1e-8 * std::max(std::fabs(full), 1e-12));
  }
}

TEST_CASE("local part vanishes far from the support", "[apply]") {
  const auto f = normalized_ball_indicator(Point{3.0, 0.0}, 1.0);
  const Point x{-2.0, 1.0};
  const auto r = apply_all(MultiIndex{1, 1}, f, x, PVConfig{}, kq());
  CHECK(r.local.is_zero());
  CHECK(r.global == r.full);
  CHECK_FALSE(r.full.is_zero());
}

TEST_CASE("counterexample geometry is purely global", "[apply]") {
  const double eta = 6.0;
  const Point z{eta, eta};
  const auto f = normalized_ball_indicator(z, 1.0);
  const Point e = (1.0 / z.norm()) * z, perp{-e[1], e[0]};
  for (double s : {4.0 / 3.0 + 0.01, 1.4, 1.49})
    for (double v : {-0.9, 0.0, 0.5}) {
      const Point x = (s * z.norm()) * e + v * perp;
      for (const auto& nd : ball_rule(z, 1.0)) REQUIRE_FALSE(in_N(2.0, x, nd.y));
      const auto r = apply_all(MultiIndex{2, 1}, f, x, PVConfig{}, kq());
      CHECK(r.local.is_zero());
      CHECK(r.global == r.full);
    }
}

TEST_CASE("quadrature path matches the spectral path on a smooth bump", "[apply]") {
  // smooth bumps need more y-nodes than the indicator-oriented defaults
  ApplyRule rule;
  rule.axial_order = 32;
  rule.transverse_order = 48;
  rule.radial_order = 24;
  rule.angles = 96;
  rule.polar = 32;
  for (int n : {1, 2}) {
    Point c(n);
    c[0] = 0.5;
    if (n == 2) c[1] = -0.3;
    const auto f = product_bump(c);
    for (int k : {1, 2, 3}) {
      const auto a = MultiIndex::balanced(n, k);
      double num = 0.0, den = 0.0;
      for (double xs : {-1.2, 2.0, 2.6}) {
        Point x(n);
        x[0] = xs;
        if (n == 2) x[1] = 0.4;
        const double q = apply_riesz(a, f, x, PVConfig{}, kq(), rule).to_double();
        const double o = spectral_bump_oracle(a, c, x);
        num += (q - o) * (q - o);
        den += o * o;
      }
      INFO("n=" << n << " alpha=" << a);
      CHECK(std::sqrt(num / den) <= 1e-3);
    }
  }
}

TEST_CASE("principal value is stable under halving the excision", "[apply]") {
  const auto f = product_bump(Point{0.5});
  for (double x : {0.2, 0.9}) {
    PVConfig pv;
    const auto r1 = apply_all(MultiIndex{1}, f, Point{x}, pv, kq());
    pv.eps /= 2;
    const auto r2 = apply_all(MultiIndex{1}, f, Point{x}, pv, kq());
    REQUIRE(r1.excised);
    const double v1 = r1.full.to_double(), v2 = r2.full.to_double();
    INFO("x=" << x << " " << v1 << " " << v2 << " pv_error " << r1.pv_error);
    CHECK(std::fabs(v1 - v2) <= pv.tol * std::fabs(v1));
  }
}

TEST_CASE("apply errors", "[apply]") {
  GridFunction g;
  g.n = 1;
  g.support = Support::gaussian(1);
  CHECK_THROWS_AS(apply_riesz(MultiIndex{1}, g, Point{0.0}, PVConfig{}, kq()), DomainError);
  const auto f = gaussian_times(Polynomial{{{MultiIndex{0}, 1.0}}}, 1);
  CHECK_THROWS_AS(apply_riesz(MultiIndex{1, 0}, f, Point{0.0, 0.0}, PVConfig{}, kq()), DomainError);
  PVConfig bad;
  bad.levels = 1;
  CHECK_THROWS_AS(apply_riesz(MultiIndex{1}, f, Point{0.0}, bad, kq()), DomainError);
}

TEST_CASE("ball rule integrates the inverse Gaussian", "[apply]") {
  // gamma_{-1}([-1,1]) = sqrt(pi) * 2 * 1.46265174590718...
  double series = 0.0, term = 1.0;
  for (int k = 0; k < 40; ++k) {
    series += term / (2 * k + 1);
    term /= (k + 1);
  }
  CHECK_THAT(gamma_inv_ball(Point{0.0}, 1.0).to_double(), WithinRel(2.0 * std::sqrt(std::numbers::pi) * series, 1e-8));
  // disc of radius R at the origin: pi * pi (e^{R^2} - 1)
  CHECK_THAT(gamma_inv_ball(Point{0.0, 0.0}, 1.5).to_double(),
             WithinRel(std::numbers::pi * std::numbers::pi * std::expm1(2.25), 1e-8));
}
