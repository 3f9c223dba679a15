#include "catch_amalgamated.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "riesz/riesz.hpp"

using namespace riesz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Hermite polynomial values", "[hermite]") {
  CHECK(hermite1d(0, 7.0) == 1.0);
  CHECK(hermite1d(1, 3.0) == 6.0);
  CHECK(hermite1d(3, 2.0) == 40.0); // 8s^3 - 12s
  CHECK(hermite_multi(MultiIndex{0, 0}, Point{3.0, -1.0}) == 1.0);
  CHECK(hermite_multi(MultiIndex{1, 1}, Point{1.0, 2.0}) == 8.0);
  CHECK(hermite_multi(MultiIndex{2, 0}, Point{1.0, 5.0}) == 2.0);
  CHECK_THROWS_AS(hermite_multi(MultiIndex{1}, Point{1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(hermite1d(-1, 0.0), DomainError);
}

TEST_CASE("normalized Hermite functions", "[hermite]") {
  CHECK(h_normalized(MultiIndex{0}, Point{2.5}) == 1.0);
  CHECK_THAT(h_normalized(MultiIndex{1}, Point{0.7}), WithinRel(std::numbers::sqrt2 * 0.7, 1e-15));
  CHECK_THAT(h_normalized(MultiIndex{2}, Point{1.0}), WithinRel(1.0 / std::numbers::sqrt2, 1e-15));
  // against 2^{-k/2} (k!)^{-1/2} H_k at moderate degree
  for (int k = 0; k <= 20; ++k)
    for (double s : {-2.0, 0.3, 1.7}) {
      const double want = hermite1d(k, s) * std::exp(-0.5 * k * std::log(2.0) - 0.5 * std::lgamma(k + 1.0));
      CHECK_THAT(hermite1d_normalized(k, s), WithinAbs(want, 1e-12 * (1.0 + std::fabs(want))));
    }
}

TEST_CASE("Gaussian densities", "[hermite]") {
  CHECK_THAT(gauss_density(Point{0.0}).to_double(), WithinRel(1.0 / std::sqrt(std::numbers::pi), 1e-15));
  for (const Point& x : {Point{0.0}, Point{3.0, -4.0}, Point{30.0, 0.0}, Point{1.0, 2.0, 3.0}})
    CHECK((gauss_density(x) * inv_gauss_density(x)).logmag() == 0.0L);
  const auto g = inv_gauss_density(Point{18.0, 24.0});
  CHECK(std::isfinite(static_cast<double>(g.logmag())));
  CHECK_THAT(static_cast<double>(g.logmag()), WithinRel(900.0 + std::log(std::numbers::pi), 1e-15));
}

TEST_CASE("three-term recurrence", "[hermite]") {
  for (int k = 1; k <= 30; ++k)
    for (int i = 0; i <= 40; ++i) {
      const double s = -5.0 + 0.25 * i;
      const double a = hermite1d(k + 1, s), b = 2 * s * hermite1d(k, s), c = 2 * k * hermite1d(k - 1, s);
      const double scale = std::max({std::fabs(a), std::fabs(b), std::fabs(c), 1.0});
      CHECK(std::fabs(a - b + c) <= 1e-8 * scale);
    }
}

TEST_CASE("Rodrigues formula by finite differences", "[hermite]") {
  // (-1)^k e^{s^2} d^k/ds^k e^{-s^2}, central k-th differences with two Richardson steps
  auto kth = [](int k, double s, double h) {
    double acc = 0.0, binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      const double t = s + (0.5 * k - j) * h;
      acc += (j % 2 ? -1.0 : 1.0) * binom * std::exp(-t * t);
      binom = binom * (k - j) / (j + 1);
    }
    return acc / std::pow(h, k);
  };
  for (int k = 0; k <= 4; ++k)
    for (int i = 0; i <= 24; ++i) {
      const double s = -3.0 + 0.25 * i, h = 0.05;
      const double d1 = (4.0 * kth(k, s, h / 2) - kth(k, s, h)) / 3.0;
      const double d2 = (4.0 * kth(k, s, h / 4) - kth(k, s, h / 2)) / 3.0;
      const double d = (16.0 * d2 - d1) / 15.0;
      const double fd = (k % 2 ? -1.0 : 1.0) * std::exp(s * s) * d;
      CHECK(std::fabs(fd - hermite1d(k, s)) <= 1e-5 * std::max(1.0, std::fabs(hermite1d(k, s))));
    }
}

TEST_CASE("orthonormality in L2(gamma_{-1})", "[hermite]") {
  CHECK(gram_deviation(1, 10) < 1e-8);
  CHECK(gram_deviation(2, 10) < 1e-8);
}

namespace {
// nested central differences for d^a f
double fd_partial(const std::function<double(const Point&)>& f, const Point& x, const MultiIndex& a, double h) {
  for (int i = 0; i < a.dim(); ++i)
    if (a[i] > 0) {
      MultiIndex r = a;
      r.set(i, a[i] - 1);
      Point xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      return (fd_partial(f, xp, r, h) - fd_partial(f, xm, r, h)) / (2 * h);
    }
  return f(x);
}
} // namespace

TEST_CASE("derivative ladder and its sign", "[hermite]") {
  // d^a (gamma h_b) = (-1)^{|a|} 2^{|a|/2} sqrt((b+a)!/b!) gamma h_{b+a}
  int checked = 0;
  for (int n : {1, 2})
    for (const auto& a : multi_indices_upto(n, 3)) {
      if (a.order() == 0) continue;
      for (const auto& b : multi_indices_upto(n, 6)) {
        auto f = [&](const Point& x) { return gamma_h(b, x).to_double(); };
        const double mag = std::exp(0.5 * a.order() * std::log(2.0) + 0.5 * log_factorial_ratio(b, a));
        for (double s : {-1.3, 0.2, 0.9}) {
          Point x(n);
          for (int i = 0; i < n; ++i) x[i] = s + 0.37 * i;
          const double fd = fd_partial(f, x, a, 5e-4);
          const double want = ladder_sign(a, b) * mag * gamma_h(b + a, x).to_double();
          INFO("a=" << a << " b=" << b << " x=" << x);
          CHECK(std::fabs(fd - want) <= 1e-4);
          ++checked;
        }
      }
    }
  CHECK(checked > 0);
}
