// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "riesz/riesz.hpp"

using namespace riesz;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  detail::Stopwatch sw;
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double t = sw.seconds();
  std::ostringstream os;
  os.precision(4);
  os << t << " s (limit " << limit_s << " s)";
  if (t >= limit_s) {
    o.pass = false;
    o.detail += "; over the runtime limit";
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " [" << title << "]: " << o.detail << "; "
            << os.str() << std::endl;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Outcome from_suites(const std::vector<SuiteReport>& reps) {
  Outcome o{true, ""};
  for (const auto& r : reps)
    for (const auto& c : r.checks) {
      if (!c.pass) o.pass = false;
      if (!o.detail.empty()) o.detail += "; ";
      o.detail += c.name + " = " + fmt(c.measured) + (c.pass ? "" : " (FAILED)");
    }
  return o;
}

} // namespace

int main() {
  const int jobs = resolve_jobs(0);
  VerifyOptions vo;
  vo.jobs = jobs;

  criterion(1, "exact identities on 1e4 triples", 5.0, [&] { return from_suites({verify_identities(vo)}); });

  criterion(2, "orthonormality, heat eigenfunctions, semigroup", 60.0,
            [&] { return from_suites({verify_orthonormality(vo), verify_semigroup(vo)}); });

  criterion(3, "L2 operator norms, B_max = 1e4", 5.0, [&] { return from_suites({verify_l2_norms(vo)}); });

  criterion(4, "spectral vs quadrature R_alpha, 50 points, rel l2 <= 1e-3", 600.0, [&] {
    Outcome o{true, ""};
    for (int n : {1, 2})
      for (int k : {1, 2, 3}) {
        const auto r = oracle_equivalence(MultiIndex::balanced(n, k), 6, 50, 7 + 10 * n + k, jobs);
        const bool ok = r.rel_l2 <= 1e-3;
        o.pass = o.pass && ok;
        o.detail += (o.detail.empty() ? "" : "; ") + std::string("n=") + std::to_string(n) + " alpha=" +
                    r.alpha.to_string() + " " + fmt(r.rel_l2) + (ok ? "" : " (FAILED)");
      }
    return o;
  });

  criterion(5, "local CZ sups stable under doubling (n=2, |alpha| = 1..3)", 600.0, [&] {
    VerifyOptions v = vo;
    v.samples = 1000;
    const auto rep = verify_cz_local(v);
    Outcome o{rep.pass(), ""};
    for (const auto& c : rep.checks)
      o.detail += (o.detail.empty() ? "" : "; ") + c.name + " sup " + fmt(c.sweep->max_ratio) + " change " +
                  fmt(c.sweep->change()) + (c.pass ? "" : " (FAILED)");
    return o;
  });

  criterion(6, "counterexample growth law, n=2, eta in {4,6,8,10}", 1800.0, [&] {
    Outcome o{true, ""};
    for (int k : {1, 2, 3, 4}) {
      CounterexampleConfig c;
      c.alpha = MultiIndex::balanced(2, k);
      c.etas = {4, 6, 8, 10};
      c.jobs = jobs;
      const auto res = counterexample_lower_bound(c);
      const auto v = counterexample_verdict(k, res);
      o.pass = o.pass && v.pass;
      o.detail += (o.detail.empty() ? "" : "; ") + std::string("|alpha|=") + std::to_string(k) + " slope " +
                  fmt(v.slope) + " spread " + fmt(v.spread) + " (" + v.expectation + ")" + (v.pass ? "" : " FAILED");
    }
    return o;
  });

  criterion(7, "rank-one lemma: quadrature vs root finding within 2%", 120.0, [&] {
    Outcome o{true, ""};
    double worst = 0.0;
    std::size_t count = 0;
    for (int n : {1, 2})
      for (auto [mu, nu] : lemma42_grid(n)) {
        Lemma42Options opt;
        opt.jobs = jobs;
        const auto r = lemma42_compare(n, mu, nu, opt);
        worst = std::max(worst, r.rel_diff);
        ++count;
        if (r.rel_diff > 0.02) {
          o.pass = false;
          o.detail += "n=" + std::to_string(n) + " mu=" + fmt(mu) + " nu=" + fmt(nu) + " off by " + fmt(r.rel_diff) + "; ";
        }
      }
    o.detail += std::to_string(count) + " (mu,nu) points, max relative difference " + fmt(worst);
    return o;
  });

  criterion(8, "every global-part estimate has a finite, stable sweep", 1200.0, [&] {
    const auto rep = verify_lemma_bounds(vo);
    Outcome o{rep.pass(), ""};
    std::size_t bad = 0;
    double worst = 0.0;
    for (const auto& c : rep.checks) {
      worst = std::max(worst, c.sweep->change());
      if (!c.pass) {
        ++bad;
        o.detail += c.name + " unstable (change " + fmt(c.sweep->change()) + "); ";
      }
    }
    o.detail += std::to_string(rep.checks.size()) + " sweeps, " + std::to_string(bad) + " unstable, largest change " +
                fmt(worst);
    return o;
  });

  std::cout << (failures ? "FAILED: " + std::to_string(failures) + " criteria" : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
