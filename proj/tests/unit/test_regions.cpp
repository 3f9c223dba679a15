#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "riesz/riesz.hpp"

using namespace riesz;
using Catch::Matchers::WithinAbs;

namespace {
std::pair<Point, Point> random_pair(std::mt19937_64& g, int n) {
  // mix of near-diagonal and far pairs so every band of u is hit
  std::uniform_real_distribution<double> u(-6.0, 6.0), lr(-4.0, 1.0);
  Point x(n), w(n);
  for (int i = 0; i < n; ++i) {
    x[i] = u(g);
    w[i] = u(g);
  }
  w *= std::pow(10.0, lr(g)) / w.norm();
  return {x, x + w};
}
} // namespace

TEST_CASE("membership examples", "[regions]") {
  CHECK(in_N(1.0, Point{3.0, 4.0}, Point{3.0, 4.0}));
  CHECK(in_N(2.0, Point{-7.0}, Point{-7.0}));
  CHECK_THAT(local_scale(Point{10.0, 0.0}, Point{10.5, 0.0}), WithinAbs(10.75, 1e-14));
  CHECK_FALSE(in_N(2.0, Point{10.0, 0.0}, Point{10.5, 0.0}));
  CHECK_THAT(local_scale(Point{0.0, 0.0}, Point{0.24, 0.32}), WithinAbs(0.56, 1e-14));
  CHECK(in_N(1.0, Point{0.0, 0.0}, Point{0.24, 0.32}));
  CHECK(in_G(Point{10.0, 0.0}, Point{10.5, 0.0}));
  CHECK_THROWS_AS(in_N(0.0, Point{0.0}, Point{1.0}), DomainError);
}

TEST_CASE("cutoff profile", "[regions]") {
  CHECK(chi_profile(0.3) == 1.0);
  CHECK(chi_profile(1.0) == 1.0);
  CHECK(chi_profile(1.5) == 0.5);
  CHECK(chi_profile(2.0) == 0.0);
  CHECK(chi_profile(3.0) == 0.0);
  CHECK(chi(Point{1.0, 1.0}, Point{1.0, 1.001}) == 1.0);
  CHECK(chi(Point{0.0}, Point{1.0}) == 0.0); // u = 1 * (1 + 0 + 1) = 2
  // |y| (1 + |y|) = 3/2
  CHECK_THAT(chi(Point{0.0}, Point{0.5 * (std::sqrt(7.0) - 1.0)}), WithinAbs(0.5, 1e-12));
}

TEST_CASE("sandwich 1_{N1} <= chi <= 1_{N2}", "[regions]") {
  std::mt19937_64 g(21);
  for (int i = 0; i < 10000; ++i) {
    const auto [x, y] = random_pair(g, 1 + i % 3);
    const double c = chi(x, y);
    CHECK((in_N(1.0, x, y) ? 1.0 : 0.0) <= c);
    CHECK(c <= (in_N(2.0, x, y) ? 1.0 : 0.0));
  }
}

TEST_CASE("gradient bound and finite differences", "[regions]") {
  CHECK(kChiGradientConstant <= 15.0);
  std::mt19937_64 g(22);
  double worst = 0.0;
  int in_band = 0;
  for (int i = 0; i < 10000; ++i) {
    const int n = 1 + i % 3;
    const auto [x, y] = random_pair(g, n);
    if (x == y) continue;
    const auto [gx, gy] = grad_chi(x, y);
    const double dist = distance(x, y);
    worst = std::max(worst, (gx.norm() + gy.norm()) * dist);
    const double u = local_scale(x, y);
    if (u <= 1.0 || u >= 2.0) continue;
    ++in_band;
    // central differences, step well inside the band
    const double h = 1e-6 * dist;
    for (int k = 0; k < n; ++k) {
      Point xp = x, xm = x, yp = y, ym = y;
      xp[k] += h;
      xm[k] -= h;
      yp[k] += h;
      ym[k] -= h;
      const double fx = (chi(xp, y) - chi(xm, y)) / (2 * h), fy = (chi(x, yp) - chi(x, ym)) / (2 * h);
      const double scale = 1.0 / dist;
      CHECK(std::fabs(fx - gx[k]) <= 1e-5 * scale);
      CHECK(std::fabs(fy - gy[k]) <= 1e-5 * scale);
    }
  }
  INFO("largest (|grad_x chi| + |grad_y chi|)|x-y| = " << worst);
  CHECK(worst <= kChiGradientConstant);
  CHECK(in_band > 100);
}

TEST_CASE("pairs in G are separated", "[regions]") {
  std::mt19937_64 g(23);
  int seen = 0;
  while (seen < 10000) {
    const auto [x, y] = random_pair(g, 1 + seen % 3);
    if (!in_G(x, y)) continue;
    ++seen;
    CHECK(distance(x, y) * (1.0 + x.norm()) >= 0.5);
  }
}

TEST_CASE("kernel split", "[regions]") {
  auto k = [](const Point& x, const Point& y) { return LogScaled::from(1.0 / distance(x, y)); };
  const Point x{3.0, 0.0};
  {
    const auto [l, g] = split_kernel(k, x, Point{0.0, 3.0});
    CHECK(l.is_zero());
    CHECK(g == k(x, Point{0.0, 3.0}));
  }
  {
    const auto [l, g] = split_kernel(k, x, Point{3.0, 0.01});
    CHECK(g.is_zero());
    CHECK(l == k(x, Point{3.0, 0.01}));
  }
  std::mt19937_64 gen(24);
  for (int i = 0; i < 1000; ++i) {
    const auto [p, q] = random_pair(gen, 2);
    const auto v = k(p, q);
    const auto [l, g] = split_kernel(k, p, q);
    const double sum = (l + g).to_double(), want = v.to_double();
    CHECK(std::fabs(sum - want) <= 2.0 * (std::nextafter(want, 2 * want) - want));
  }
  CHECK_THROWS_AS(split_kernel(k, x, x), DomainError);
}
