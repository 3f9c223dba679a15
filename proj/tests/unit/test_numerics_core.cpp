#include "catch_amalgamated.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "riesz/riesz.hpp"

using namespace riesz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
double ulps_apart(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / std::fabs(std::nextafter(a, b) - a);
}
} // namespace

TEST_CASE("LogScaled arithmetic", "[numerics]") {
  const auto a = LogScaled::from(3.0), b = LogScaled::from(-5.0);
  CHECK_THAT((a + b).to_double(), WithinRel(-2.0, 1e-15));
  CHECK_THAT((a - b).to_double(), WithinRel(8.0, 1e-15));
  CHECK_THAT((a * b).to_double(), WithinRel(-15.0, 1e-15));
  CHECK_THAT((a / b).to_double(), WithinRel(-0.6, 1e-15));
  CHECK((a - a).is_zero());
  CHECK((a + LogScaled::zero()) == a);
  CHECK(b.abs().sign() == 1);
  CHECK(LogScaled::zero().sign() == 0);
  CHECK_THROWS_AS(a / LogScaled::zero(), DomainError);

  // far outside the double range
  const auto big = LogScaled::from_log(1, 1e5L), small = LogScaled::from_log(1, -1e5L);
  CHECK((big * small).logmag() == 0.0L);
  CHECK((big + big).logmag() == Catch::Approx(1e5 + std::log(2.0)));
  CHECK(small.magnitude_less(big));
  CHECK(std::isinf(big.to_double()));
}

TEST_CASE("LogScaled round trip within one ulp", "[numerics]") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> e(-300.0, 300.0), m(1.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = (i % 2 ? -1 : 1) * m(g) * std::pow(10.0, e(g));
    CHECK(ulps_apart(LogScaled::from(x).to_double(), x) <= 1.0);
  }
}

TEST_CASE("LogScaled multiplication commutes exactly, addition associates to rounding", "[numerics]") {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const auto a = LogScaled::from_log(1, u(g)), b = LogScaled::from_log(-1, u(g)), c = LogScaled::from_log(1, u(g));
    CHECK(a * b == b * a);
    CHECK(a + c == c + a);
    const auto l = (a + c) + c.shifted(1.0L), r = a + (c + c.shifted(1.0L));
    CHECK(std::fabs(static_cast<double>(l.logmag() - r.logmag())) < 1e-15 * (1.0 + std::fabs(static_cast<double>(l.logmag()))));
  }
}

TEST_CASE("log_sum", "[numerics]") {
  const std::vector<LogScaled> v{LogScaled::from(2.0), LogScaled::from(3.0)};
  CHECK_THAT(static_cast<double>(log_sum(v).logmag()), WithinAbs(std::log(5.0), 1e-15));
  const std::vector<LogScaled> c{LogScaled::from_log(1, 700.0L), LogScaled::from_log(-1, 700.0L)};
  CHECK(log_sum(c).is_zero());
  CHECK(log_sum(std::vector<LogScaled>{}).is_zero());

  // 1000 mixed-sign terms against 50-digit arithmetic
  using big = boost::multiprecision::cpp_bin_float_50;
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> l(-40.0, 40.0);
  std::vector<LogScaled> t;
  big ref = 0;
  for (int i = 0; i < 1000; ++i) {
    const double lm = l(g);
    const int s = i % 3 == 0 ? -1 : 1;
    t.push_back(LogScaled::from_log(s, lm));
    ref += s * boost::multiprecision::exp(big(lm));
  }
  const auto got = log_sum(t);
  REQUIRE(got.sign() == (ref > 0 ? 1 : -1));
  const double ref_log = static_cast<double>(boost::multiprecision::log(boost::multiprecision::abs(ref)));
  CHECK(std::fabs(static_cast<double>(got.logmag()) - ref_log) < 1e-12);
}

TEST_CASE("LogAccumulator matches log_sum", "[numerics]") {
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> l(-800.0, 800.0);
  std::vector<LogScaled> t;
  LogAccumulator acc;
  for (int i = 0; i < 200; ++i) {
    t.push_back(LogScaled::from_log(i % 2 ? 1 : -1, l(g)));
    acc.add(t.back());
  }
  const auto a = acc.value(), b = log_sum(t);
  CHECK(a.sign() == b.sign());
  CHECK(std::fabs(static_cast<double>(a.logmag() - b.logmag())) < 1e-12);
}

TEST_CASE("polar decomposition", "[geometry]") {
  const auto d = decompose(Point{2.0, 0.0}, Point{1.0, 1.0});
  CHECK(d.r0 == 0.5);
  CHECK(d.y_parallel[0] == 1.0);
  CHECK(d.y_parallel[1] == 0.0);
  CHECK(d.y_perp[0] == 0.0);
  CHECK(d.y_perp[1] == 1.0);
  CHECK_THAT(d.theta, WithinAbs(std::numbers::pi / 4, 1e-15));

  const auto d1 = decompose(Point{3.0}, Point{-1.5});
  CHECK(d1.r0 == -0.5);
  CHECK(d1.y_perp[0] == 0.0);
  CHECK_THAT(d1.theta, WithinAbs(std::numbers::pi, 1e-15));

  CHECK_THROWS_AS(decompose(Point{0.0, 0.0}, Point{1.0, 1.0}), DomainError);

  // y = x gives r0 = 1 to rounding
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const Point x{u(g), u(g), u(g)};
    CHECK(std::fabs(decompose(x, x).r0 - 1.0) <= 4 * std::numeric_limits<double>::epsilon());
  }
}

TEST_CASE("multi-index helpers", "[geometry]") {
  CHECK(MultiIndex::balanced(2, 3) == MultiIndex{2, 1});
  CHECK(MultiIndex::balanced(3, 1) == MultiIndex{1, 0, 0});
  CHECK((MultiIndex{1, 2}).order() == 3);
  CHECK((MultiIndex{1, 2}).to_string() == "(1,2)");
  CHECK_THROWS_AS((MultiIndex{1, -1}), DomainError);
  CHECK_THROWS_AS(Point(0), DomainError);
}

TEST_CASE("Gauss rules integrate their weight", "[quadrature]") {
  for (int m : {1, 4, 16, 64}) {
    const auto& gl = gauss_legendre(m);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      s += gl.weights[i];
      s2 += gl.weights[i] * gl.nodes[i] * gl.nodes[i];
    }
    CHECK_THAT(s, WithinRel(2.0, 1e-14));
    if (m >= 2) CHECK_THAT(s2, WithinRel(2.0 / 3.0, 1e-13));
  }
  for (int m : {2, 10, 40}) {
    const auto& gh = gauss_hermite(m);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
      s += gh.weights[i];
      s2 += gh.weights[i] * gh.nodes[i] * gh.nodes[i];
    }
    CHECK_THAT(s, WithinRel(std::sqrt(std::numbers::pi), 1e-13));
    CHECK_THAT(s2, WithinRel(0.5 * std::sqrt(std::numbers::pi), 1e-13));
  }
}

TEST_CASE("adaptive r-integration", "[quadrature]") {
  QuadratureConfig cfg;
  auto one = [](const RNode&) { return LogScaled::one(); };
  CHECK_THAT(integrate01(one, cfg).value.to_double(), WithinRel(1.0, 1e-14));

  // int_0^1 (-log r)^{-1/2} dr = Gamma(1/2)
  auto lg = [](const RNode& nd) { return LogScaled::from_log(1, -0.5L * std::log(static_cast<long double>(nd.neg_log_r))); };
  CHECK_THAT(integrate01(lg, cfg.with(Substitution::log_at_zero)).value.to_double(),
             WithinRel(std::sqrt(std::numbers::pi), 1e-10));

  // int_0^1 (1-r)^{-3/2} e^{-1/(1-r)} dr = sqrt(pi) erfc(1)
  auto ex = [](const RNode& nd) {
    return LogScaled::from_log(1, -1.5L * std::log(static_cast<long double>(nd.one_minus_r)) - 1.0L / nd.one_minus_r);
  };
  const double want = std::sqrt(std::numbers::pi) * std::erfc(1.0);
  CHECK_THAT(integrate01(ex, cfg.with(Substitution::exp_at_one)).value.to_double(), WithinRel(want, 1e-10));
  // the same by a composite trapezoid in s = 1/(1-r), int_1^inf s^{-1/2} e^{-s} ds, one Richardson step
  {
    auto trap = [](int m) {
      const double hi = 60.0, h = (hi - 1.0) / m;
      double t = 0.0;
      for (int i = 0; i <= m; ++i) {
        const double s = 1.0 + i * h;
        t += (i == 0 || i == m ? 0.5 : 1.0) * std::exp(-s) / std::sqrt(s);
      }
      return t * h;
    };
    CHECK_THAT((4.0 * trap(400000) - trap(200000)) / 3.0, WithinRel(want, 1e-10));
  }

  // the error estimate shrinks with the tolerance
  auto wiggly = [](const RNode& nd) { return LogScaled::from(std::cos(40.0 * nd.r) + 2.0); };
  double prev = 1.0;
  for (double tol : {1e-4, 1e-8, 1e-12}) {
    QuadratureConfig c;
    c.rel_tol = tol;
    const auto r = integrate01(wiggly, c);
    CHECK(r.relative_error() <= prev);
    CHECK_THAT(r.value.to_double(), WithinRel(2.0 + std::sin(40.0) / 40.0, std::max(tol, 1e-14) * 10));
    prev = r.relative_error();
  }

  QuadratureConfig tight;
  tight.rel_tol = 1e-14;
  tight.max_subdivisions = 1;
  auto spike = [](const RNode& nd) { return LogScaled::from(1.0 / (1e-6 + (nd.r - 0.3) * (nd.r - 0.3))); };
  CHECK_THROWS_AS(integrate01(spike, tight), NonConvergence);
  CHECK_THROWS_AS(integrate(one, 0.5, 0.2, cfg), DomainError);
}

TEST_CASE("heat kernel and the exponent identity", "[kernels]") {
  // t = log 2, x = y = 0, n = 1: (pi (1 - 1/4))^{-1/2} e^{-t} = 1/sqrt(3 pi)
  CHECK_THAT(heat_kernel(std::log(2.0), Point{0.0}, Point{0.0}).to_double(),
             WithinRel(1.0 / std::sqrt(3.0 * std::numbers::pi), 1e-14));
  // x=(1,0), y=(0,1), r=1/2: both exponents are -5/3
  const Point x{1.0, 0.0}, y{0.0, 1.0};
  const double r = 0.5, d = 1 - r * r;
  const double direct = -(x - r * y).norm2() / d, factored = -(r * x - y).norm2() / d;
  CHECK_THAT(direct, WithinAbs(-5.0 / 3.0, 1e-15));
  CHECK_THAT(factored, WithinAbs(-5.0 / 3.0, 1e-15));
  CHECK_THAT(direct - factored, WithinAbs(-x.norm2() + y.norm2(), 1e-15));
  CHECK_THROWS_AS(heat_kernel(0.0, Point{0.0}, Point{0.0}), DomainError);
}

TEST_CASE("exact identities hold on random triples", "[numerics]") {
  const auto rep = verify_identities({}, 2000);
  for (const auto& c : rep.checks) {
    INFO(c.name << " measured " << c.measured);
    CHECK(c.pass);
  }
}
