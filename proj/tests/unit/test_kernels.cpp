#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "riesz/riesz.hpp"

using namespace riesz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Abel-summed spectral kernels in n = 1, exp(-t(k+1)) damping, then Richardson
// in t: the damped series are kernels of T e^{-tA}, smooth in t off the
// diagonal, while plain truncation of the Riesz series does not converge.
//   A^{-1}:  gamma(x) sum_k (k+1)^{-1} h_k(x) h_k(y)
//   R_1:     -sqrt2 gamma(x) sum_k h_{k+1}(x) h_k(y)   (ladder, eigenvalue k+1)
double abel_sum(double t, double x, double y, bool riesz) {
  const int K = static_cast<int>(45.0 / t);
  double ax = 1, bx = std::numbers::sqrt2 * x, ay = 1, by = std::numbers::sqrt2 * y, s = 0;
  for (int k = 0; k < K; ++k) {
    const double w = std::exp(-t * (k + 1));
    s += riesz ? w * bx * ay : w * ax * ay / (k + 1);
    const double c1 = std::sqrt(2.0 / (k + 2)), c2 = std::sqrt((k + 1.0) / (k + 2));
    const double nx = c1 * x * bx - c2 * ax, ny = c1 * y * by - c2 * ay;
    ax = bx;
    bx = nx;
    ay = by;
    by = ny;
  }
  const double g = std::exp(-x * x) / std::sqrt(std::numbers::pi);
  return riesz ? -std::numbers::sqrt2 * g * s : g * s;
}

double spectral_oracle(double x, double y, bool riesz) {
  const double t = 0.004;
  const double a = abel_sum(t, x, y, riesz), b = abel_sum(t / 2, x, y, riesz), c = abel_sum(t / 4, x, y, riesz);
  const double r1 = 2 * b - a, r2 = 2 * c - b;
  return (4 * r2 - r1) / 3;
}

QuadratureConfig tight() {
  QuadratureConfig q;
  q.rel_tol = 1e-12;
  q.abs_tol = 1e-15;
  return q;
}

} // namespace

TEST_CASE("integrand hand value", "[kernels]") {
  // r = 1/2, n = 1, a = 1, x = 1, y = 0:
  // (log 2)^{-1/2} (3/4)^{-1} H_1(2/sqrt3) e^{-4/3}
  const RNode nd{0.5, 0.5, std::log(2.0)};
  const double want = std::pow(std::log(2.0), -0.5) * (4.0 / 3.0) * (4.0 / std::sqrt(3.0)) * std::exp(-4.0 / 3.0);
  const auto v = riesz_integrand(MultiIndex{1}, nd, Point{1.0}, Point{0.0}, KernelForm::direct);
  CHECK_THAT(v.to_double(), WithinRel(want, 1e-14));
  // factored form differs by exactly e^{-|x|^2+|y|^2}
  const auto f = riesz_integrand(MultiIndex{1}, nd, Point{1.0}, Point{0.0}, KernelForm::factored);
  CHECK_THAT(static_cast<double>(v.logmag() - f.logmag()), WithinAbs(-1.0, 1e-14));
}

TEST_CASE("integrand forms differ by the Gaussian ratio at every r", "[kernels]") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0), ur(0.01, 0.99);
  for (int i = 0; i < 500; ++i) {
    const int n = 1 + i % 3;
    Point x(n), y(n);
    for (int j = 0; j < n; ++j) {
      x[j] = u(g);
      y[j] = u(g);
    }
    const double r = ur(g);
    const RNode nd{r, 1 - r, -std::log(r)};
    const auto a = MultiIndex::balanced(n, 1 + i % 4);
    const auto d = riesz_integrand(a, nd, x, y, KernelForm::direct);
    const auto f = riesz_integrand(a, nd, x, y, KernelForm::factored);
    if (d.is_zero() || f.is_zero()) continue;
    CHECK(d.sign() == f.sign());
    CHECK(std::fabs(static_cast<double>(d.logmag() - f.logmag()) - (-x.norm2() + y.norm2())) <
          1e-9 * (1 + x.norm2() + y.norm2()));
  }
}

TEST_CASE("integrand near r = 0 for |alpha| = 2", "[kernels]") {
  // (-log r)^0 = 1: the integrand tends to r^{n-1} H_a(x) e^{-|x|^2}
  const Point x{0.8, -0.4}, y{1.0, 2.0};
  const MultiIndex a{1, 1};
  const double r = 1e-12;
  const auto v = riesz_integrand(a, RNode{r, 1 - r, -std::log(r)}, x, y, KernelForm::direct);
  CHECK_THAT(v.to_double() / r, WithinRel(hermite_multi(a, x) * std::exp(-x.norm2()), 1e-9));
}

TEST_CASE("direct and factored kernels agree", "[kernels]") {
  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  QuadratureConfig q;
  q.rel_tol = 1e-10;
  q.abs_tol = 1e-14;
  int compared = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + i % 3;
    Point x(n), y(n);
    for (int j = 0; j < n; ++j) {
      x[j] = u(g);
      y[j] = u(g);
    }
    const auto a = MultiIndex::balanced(n, 1 + (i / 3) % 4);
    const auto d = riesz_kernel(a, x, y, KernelForm::direct, q);
    const auto f = riesz_kernel(a, x, y, KernelForm::factored, q);
    // relative error is measured against the integral of |integrand|
    const double rel = ((d.value - f.value).abs() / d.value.abs()).to_double();
    const double allowed = 10 * std::max({q.rel_tol, d.rel_error, f.rel_error});
    INFO("n=" << n << " a=" << a << " x=" << x << " y=" << y << " rel=" << rel);
    CHECK(rel <= allowed);
    ++compared;
  }
  CHECK(compared == 100);
}

TEST_CASE("Riesz kernel against the spectral series", "[kernels]") {
  const double want = spectral_oracle(0.5, 1.5, true);
  const double got = riesz_kernel(MultiIndex{1}, Point{0.5}, Point{1.5}, tight()).value.to_double();
  CHECK_THAT(got, WithinRel(want, 1e-4));
}

TEST_CASE("fractional power kernel", "[kernels]") {
  SECTION("b = 1 against the spectral series") {
    const double want = spectral_oracle(0.0, 2.0, false);
    CHECK_THAT(frac_power_kernel(1.0, Point{0.0}, Point{2.0}, tight()).to_double(), WithinRel(want, 1e-6));
  }
  SECTION("symmetry up to the Gaussian factor") {
    for (const auto& [x, y] : {std::pair{Point{0.3, -1.0}, Point{2.0, 0.5}}, std::pair{Point{-1.0}, Point{1.5}}}) {
      const auto kxy = frac_power_kernel(0.5, x, y, tight()), kyx = frac_power_kernel(0.5, y, x, tight());
      CHECK_THAT(static_cast<double>(kxy.logmag() - kyx.logmag()), WithinAbs(-x.norm2() + y.norm2(), 1e-9));
    }
  }
  SECTION("positive in the global region") {
    const Point x{4.0, 0.0}, y{-3.0, 5.0};
    REQUIRE(in_G(x, y));
    const auto v = frac_power_kernel(1.0, x, y, tight());
    CHECK(v.sign() == 1);
    CHECK(std::isfinite(static_cast<double>(v.logmag())));
  }
  SECTION("diagonal") {
    CHECK_THROWS_AS(frac_power_kernel(0.5, Point{1.0, 1.0}, Point{1.0, 1.0}, tight()), DomainError);
    CHECK_NOTHROW(frac_power_kernel(1.0, Point{1.0}, Point{1.0}, tight()));
    CHECK_THROWS_AS(frac_power_kernel(0.0, Point{1.0}, Point{2.0}, tight()), DomainError);
  }
}

TEST_CASE("heat kernel decay and semigroup suite", "[kernels]") {
  long double prev = heat_kernel(0.5, Point{0.0}, Point{1.0}).logmag();
  for (double r : {2.0, 4.0, 8.0, 16.0, 64.0}) {
    const long double v = heat_kernel(0.5, Point{0.0}, Point{r}).logmag();
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < -1000.0L);
  const auto rep = verify_semigroup();
  for (const auto& c : rep.checks) {
    INFO(c.name << " measured " << c.measured << " threshold " << c.threshold);
    CHECK(c.pass);
  }
}

TEST_CASE("Riesz kernel is singular like |x-y|^{-n} near the diagonal", "[kernels]") {
  // |alpha| = n: in n = 1 the |alpha| = 2 kernel is bounded off the diagonal
  // (the singular part of d^2 A^{-1} is a point mass), so take |alpha| = 1 there
  for (int n : {1, 2}) {
    const auto a = MultiIndex::balanced(n, n);
    Point x(n), w(n);
    x[0] = 0.7;
    w[0] = 0.6;
    if (n == 2) {
      x[1] = -0.2;
      w[1] = 0.8;
    }
    std::vector<double> scaled;
    for (double rho : {1e-2, 1e-3, 1e-4}) {
      const Point y = x + rho * w;
      scaled.push_back(riesz_kernel(a, x, y, QuadratureConfig{}).value.abs().to_double() * std::pow(rho, n));
    }
    INFO("n=" << n << " " << scaled[0] << " " << scaled[1] << " " << scaled[2]);
    CHECK(std::isfinite(scaled[2]));
    CHECK(scaled[2] / scaled[1] == Catch::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("kernel errors and form selection", "[kernels]") {
  QuadratureConfig q;
  CHECK_THROWS_AS(riesz_kernel(MultiIndex{1}, Point{1.0}, Point{1.0}, q), DomainError);
  CHECK_THROWS_AS(riesz_kernel(MultiIndex{0}, Point{1.0}, Point{2.0}, q), DomainError);
  CHECK_THROWS_AS(riesz_kernel(MultiIndex{1, 0}, Point{1.0}, Point{2.0}, q), DomainError);
  CHECK(default_form(Point{1.0}, Point{1.1}) == KernelForm::direct);
  CHECK(default_form(Point{1.0}, Point{3.0}) == KernelForm::factored);
}

TEST_CASE("central-difference kernel gradient", "[kernels]") {
  // e^{x.y}: grad_x = y e^{x.y}, grad_y = x e^{x.y}
  auto k = [](const Point& x, const Point& y) { return LogScaled::from_log(1, dot(x, y)); };
  const Point x{0.3, -0.5}, y{1.2, 0.4};
  const auto [gx, gy] = kernel_gradient_norms(k, x, y);
  const double e = std::exp(dot(x, y));
  CHECK_THAT(gx, WithinRel(y.norm() * e, 1e-7));
  CHECK_THAT(gy, WithinRel(x.norm() * e, 1e-7));
}
