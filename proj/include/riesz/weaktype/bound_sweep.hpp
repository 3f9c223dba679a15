#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/kernels.hpp"
#include "riesz/log_scaled.hpp"
#include "riesz/parallel.hpp"
#include "riesz/regions.hpp"
#include "riesz/weaktype/lemma_kernels.hpp"

namespace riesz {

using PairFunction = std::function<LogScaled(const Point&, const Point&)>;
using PairPredicate = std::function<bool(const Point&, const Point&)>;

/// Random (x,y) pairs. Global mode: x = |x| x', y = r0 x + |y_perp| e with
/// |x| and |y_perp| log-uniform and r0 uniform, or (half of the time, when
/// the range reaches 1) log-uniform in its distance to 1. Local mode:
/// y = x + rho w with rho log-uniform, for sampling near the diagonal.
struct PairSampler {
  int n = 2;
  bool local = false;
  double x_min = 0.1, x_max = 10.0;
  double r0_lo = -3.0, r0_hi = 3.0;
  double perp_min = 1e-4, perp_max = 4.0;
  double rho_min = 1e-3; ///< local mode; rho_max = 2 / (1 + 2|x|)
  PairPredicate accept;
  int max_attempts = 1000;
};

namespace detail {

inline double log_uniform(std::mt19937_64& g, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(g));
}

inline Point random_unit(std::mt19937_64& g, int n) {
  std::normal_distribution<double> nd;
  for (;;) {
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = nd(g);
    const double r = p.norm();
    if (r > 1e-12) return (1.0 / r) * p;
  }
}

inline std::pair<Point, Point> draw_pair(const PairSampler& s, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int k = 0; k < s.max_attempts; ++k) {
    const Point xd = random_unit(g, s.n);
    if (s.local) {
      const double nx = u01(g) * s.x_max;
      const Point x = nx * xd;
      const double rho = log_uniform(g, s.rho_min, 2.0 / (1.0 + 2.0 * nx));
      const Point y = x + rho * random_unit(g, s.n);
      if (!s.accept || s.accept(x, y)) return {x, y};
      continue;
    }
    const Point x = log_uniform(g, s.x_min, s.x_max) * xd;
    double r0;
    const bool near_one = s.r0_lo < 1.0 && s.r0_hi > 1.0 - 1e-12;
    const bool above_one = s.r0_lo < 1.0 + 1e-12 && s.r0_hi > 1.0;
    if ((near_one || above_one) && u01(g) < 0.5) {
      const double side = (near_one && above_one) ? (u01(g) < 0.5 ? -1.0 : 1.0) : (near_one ? -1.0 : 1.0);
      const double room = side < 0 ? 1.0 - s.r0_lo : s.r0_hi - 1.0;
      r0 = 1.0 + side * log_uniform(g, 1e-6 * room, room);
    } else {
      r0 = s.r0_lo + (s.r0_hi - s.r0_lo) * u01(g);
    }
    Point y = r0 * x;
    if (s.n > 1) {
      Point e = random_unit(g, s.n);
      e -= dot(e, xd) * xd;
      if (e.norm() < 1e-8) continue;
      y += (log_uniform(g, s.perp_min, s.perp_max) / e.norm()) * e;
    }
    if (!s.accept || s.accept(x, y)) return {x, y};
  }
  throw NonConvergence("bound sweep: sampler acceptance too low");
}

} // namespace detail

struct SweepResult {
  double max_ratio = 0.0;      ///< from the 2N sample
  double max_ratio_half = 0.0; ///< from its first N
  Point argmax_x, argmax_y;
  std::size_t samples = 0;
  bool finite = true;
  bool stable = true; ///< max over 2N within 20% of the max over N

  double change() const { return max_ratio_half > 0.0 ? max_ratio / max_ratio_half - 1.0 : 0.0; }
};

inline constexpr double kStabilityTolerance = 0.2;

struct SweepOptions {
  /// Polish the best samples by a random local search before taking the sup.
  /// Suprema of these ratios sit on thin boundary layers (r0 -> 1 at the edge
  /// of G, say) that plain sampling reaches only slowly.
  bool refine = true;
  int refine_starts = 6;
  int refine_steps = 400;
  int jobs = 1;
};

namespace detail {

inline double pair_ratio(const PairFunction& target, const PairFunction& bound, const Point& x, const Point& y) {
  const LogScaled t = target(x, y);
  if (t.is_zero()) return 0.0;
  const LogScaled b = bound(x, y);
  if (b.is_zero() || b.sign() < 0) throw DomainError("bound_ratio_sweep: bound not strictly positive");
  return static_cast<double>(std::exp(t.logmag() - b.logmag()));
}

struct Best {
  double ratio = 0.0;
  Point x, y;
};

// Random local search from (x,y). Moves alternate between Gaussian steps in
// (x,y) and multiplicative steps in the natural coordinates |x|, 1 - r0 and
// |y_perp|; both step sizes shrink geometrically.
inline Best polish(const PairFunction& target, const PairFunction& bound, const PairSampler& s, Best b, int steps,
                   std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  double scale = 0.5 * std::min(distance(b.x, b.y), std::max(b.x.norm(), 1e-3));
  double sigma = 1.0;
  const double shrink = std::pow(1e-4, 1.0 / std::max(steps, 1));
  for (int k = 0; k < steps; ++k, scale *= shrink, sigma *= shrink) {
    Point x = b.x, y = b.y;
    if (k % 2 == 0 || s.local) {
      for (int i = 0; i < s.n; ++i) {
        x[i] += scale * nd(g);
        y[i] += scale * nd(g);
      }
    } else {
      const auto pd = decompose(b.x, b.y);
      x = std::exp(sigma * nd(g)) * b.x;
      const double r0 = 1.0 - (1.0 - pd.r0) * std::exp(sigma * nd(g));
      y = r0 * x + std::exp(sigma * nd(g)) * pd.y_perp;
    }
    const double nx = x.norm();
    if (nx == 0.0 || nx > s.x_max || (!s.local && nx < s.x_min) || x == y || (s.accept && !s.accept(x, y))) continue;
    double r;
    try {
      r = pair_ratio(target, bound, x, y);
    } catch (const NonConvergence&) {
      continue;
    }
    if (r > b.ratio) b = {r, x, y};
  }
  return b;
}

inline Best refined_max(const PairFunction& target, const PairFunction& bound, const PairSampler& s,
                        const std::vector<std::pair<Point, Point>>& pts, const std::vector<double>& ratios,
                        std::size_t upto, const SweepOptions& opt, std::uint64_t seed) {
  std::vector<std::size_t> idx(upto);
  for (std::size_t i = 0; i < upto; ++i) idx[i] = i;
  const std::size_t k = opt.refine ? std::min<std::size_t>(opt.refine_starts, upto) : 1;
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](auto a, auto b) { return ratios[a] > ratios[b]; });
  Best best{ratios[idx[0]], pts[idx[0]].first, pts[idx[0]].second};
  if (!opt.refine || best.ratio == 0.0) return best;
  std::mt19937_64 g(seed);
  for (std::size_t j = 0; j < k; ++j) {
    const Best b = polish(target, bound, s, {ratios[idx[j]], pts[idx[j]].first, pts[idx[j]].second},
                          opt.refine_steps, g);
    if (b.ratio > best.ratio) best = b;
  }
  return best;
}

} // namespace detail

/// sup target/bound over 2*count nested seeded samples; the first count
/// form the coarse sample for the stability flag.
inline SweepResult bound_ratio_sweep(const PairFunction& target, const PairFunction& bound, const PairSampler& sampler,
                                     std::size_t count, std::uint64_t seed, const SweepOptions& opt = {}) {
  require(count >= 1, "bound_ratio_sweep: empty sample");
  std::mt19937_64 g(seed);
  std::vector<std::pair<Point, Point>> pts;
  pts.reserve(2 * count);
  for (std::size_t i = 0; i < 2 * count; ++i) pts.push_back(detail::draw_pair(sampler, g));
  const auto ratios = parallel_map<double>(
      pts.size(), [&](std::size_t i) { return detail::pair_ratio(target, bound, pts[i].first, pts[i].second); },
      opt.jobs);
  SweepResult r;
  r.samples = pts.size();
  for (double v : ratios)
    if (!std::isfinite(v)) r.finite = false;
  if (!r.finite) {
    r.max_ratio = std::numeric_limits<double>::infinity();
    r.stable = false;
    return r;
  }
  const auto half = detail::refined_max(target, bound, sampler, pts, ratios, count, opt, seed ^ 0x9e3779b97f4a7c15ULL);
  const auto full = detail::refined_max(target, bound, sampler, pts, ratios, 2 * count, opt, seed ^ 0x7f4a7c159e3779b9ULL);
  r.max_ratio_half = half.ratio;
  r.max_ratio = std::max(full.ratio, half.ratio); // the 2N sample contains the N sample
  const auto& arg = full.ratio >= half.ratio ? full : half;
  r.argmax_x = arg.x;
  r.argmax_y = arg.y;
  r.finite = std::isfinite(r.max_ratio);
  r.stable = r.finite && r.max_ratio <= (1.0 + kStabilityTolerance) * r.max_ratio_half;
  return r;
}

/// One registered pointwise estimate target <= C bound.
struct BoundEntry {
  std::string lemma; ///< e.g. "2.3.2", "A10", "3.2"
  std::string name;  ///< lemma plus parameters and the bound used
  PairFunction target, bound;
  PairSampler sampler;
};

namespace detail {

inline LogScaled pow_ls(double v, double p) {
  require(v > 0.0, "pow_ls: non-positive base");
  return LogScaled::from_log(1, p * std::log(v));
}

// (1+|x|)^n ∧ (|x| sin θ)^{-n}
inline LogScaled local_global_min(const Point& x, const Point& y) {
  const int n = x.dim();
  const double st = x.norm() * std::sin(decompose(x, y).theta);
  long double lg = n * std::log1p(x.norm());
  if (st > 0.0) lg = std::min<long double>(lg, -n * std::log(st));
  return LogScaled::from_log(1, lg);
}

inline LogScaled xsin_pow(const Point& x, const Point& y) {
  const double st = x.norm() * std::sin(decompose(x, y).theta);
  require(st > 0.0, "bound: |x| sin(theta) vanishes");
  return pow_ls(st, -x.dim());
}

inline PairFunction lemma_fn(LemmaKernelSpec s) {
  return [s](const Point& x, const Point& y) { return lemma_kernel_eval(s, x, y); };
}

inline double r0_of(const Point& x, const Point& y) { return dot(x, y) / x.norm2(); }

} // namespace detail

/// Every pointwise global-part kernel estimate, plus the local r-integral
/// estimate, as sweep entries.
inline std::vector<BoundEntry> bound_registry() {
  using detail::lemma_fn;
  using detail::pow_ls;
  std::vector<BoundEntry> reg;
  auto G = [](const Point& x, const Point& y) { return in_G(x, y); };
  auto tag = [](int a, int n) { return " a=" + std::to_string(a) + " n=" + std::to_string(n); };
  auto sampler = [&](int n, double lo, double hi, PairPredicate acc) {
    PairSampler s;
    s.n = n;
    s.r0_lo = lo;
    s.r0_hi = hi;
    s.accept = std::move(acc);
    return s;
  };

  // |K_{R_alpha}| <= C e^{-|x|^2+|y|^2} sum_a (K1^a + K2^a) on G
  for (int n : {1, 2})
    for (int k : {1, 2}) {
      std::vector<MultiIndex> as{MultiIndex::balanced(n, k)};
      if (n == 2 && k == 2) {
        MultiIndex m(2);
        m.set(0, 2);
        as.push_back(m);
      }
      for (const auto& al : as) {
        BoundEntry e;
        e.lemma = "glob-decomp";
        e.name = "glob-decomp alpha=" + al.to_string() + " n=" + std::to_string(n) + " vs e^{-|x|^2+|y|^2} sum_a (K1^a+K2^a)";
        e.target = [al](const Point& x, const Point& y) {
          QuadratureConfig q{.rel_tol = 1e-9, .abs_tol = 1e-13};
          return riesz_kernel(al, x, y, q).value.abs();
        };
        e.bound = [al, n](const Point& x, const Point& y) {
          LogAccumulator acc;
          for (int a = 0; a <= al.order(); ++a) {
            acc.add(lemma_kernel_eval(lemma_spec(LemmaKernel::K1, n, a), x, y));
            acc.add(lemma_kernel_eval(lemma_spec(LemmaKernel::K2, n, a), x, y));
          }
          return acc.value().shifted(detail::log_gauss_ratio(x, y));
        };
        e.sampler = sampler(n, -3.0, 3.0, G);
        reg.push_back(std::move(e));
      }
    }

  for (int n : {1, 2})
    for (int a = 0; a <= 2; ++a) {
      const auto K = [&](LemmaKernel id) { return lemma_fn(lemma_spec(id, n, a)); };
      // Step 1, far case: K1^a <= C |x|^{1-n} when |y| >= 2|x|
      reg.push_back({"K1", "K1-far" + tag(a, n) + " vs |x|^{1-n}", K(LemmaKernel::K1),
                     [](const Point& x, const Point&) { return pow_ls(x.norm(), 1.0 - x.dim()); },
                     sampler(n, -8.0, 8.0, [](const Point& x, const Point& y) {
                       return in_G(x, y) && y.norm() >= 2.0 * x.norm();
                     })});
      // near case
      reg.push_back({"K1", "K1-near" + tag(a, n) + " vs e^{-|y_perp|^2}|x|^{a-1}(|y|/|x|)^{n-1}+|x|^{a-n}",
                     K(LemmaKernel::K1),
                     [a](const Point& x, const Point& y) {
                       const int n = x.dim();
                       const double nx = x.norm();
                       const auto pd = decompose(x, y);
                       LogAccumulator acc;
                       acc.add(LogScaled::from_log(1, -pd.y_perp.norm2() + (a - 1) * std::log(nx) +
                                                          (n - 1) * (std::log(y.norm()) - std::log(nx))));
                       acc.add(pow_ls(nx, a - n));
                       return acc.value();
                     },
                     sampler(n, -2.0, 2.0, [](const Point& x, const Point& y) {
                       return in_G(x, y) && y.norm() < 2.0 * x.norm() && y.norm() > 0.0;
                     })});
      // 2.1 and 2.2
      for (auto [id, lo, hi, lab] : {std::tuple{LemmaKernel::K21, -4.0, 1.0 / 3.0, "2.1"},
                                     std::tuple{LemmaKernel::K22, 2.0, 6.0, "2.2"}}) {
        const std::string L = lab;
        auto acc = [lo, hi](const Point& x, const Point& y) {
          const double r0 = detail::r0_of(x, y);
          return in_G(x, y) && r0 >= lo && r0 <= hi;
        };
        reg.push_back({L, L + tag(a, n) + " vs [(1+|r0|)^2|x|^2+|y_perp|^2]^{-n/2}", K(id),
                       [](const Point& x, const Point& y) {
                         const auto pd = decompose(x, y);
                         const double m = std::pow(1.0 + std::fabs(pd.r0), 2) * x.norm2() + pd.y_perp.norm2();
                         return pow_ls(m, -0.5 * x.dim());
                       },
                       sampler(n, lo, hi, acc)});
        reg.push_back({L, L + tag(a, n) + " vs |x|^{-n}", K(id),
                       [](const Point& x, const Point&) { return pow_ls(x.norm(), -x.dim()); }, sampler(n, lo, hi, acc)});
      }
      auto mid = [](const Point& x, const Point& y) {
        const double r0 = detail::r0_of(x, y);
        return in_G(x, y) && r0 > 1.0 / 3.0 && r0 < 2.0;
      };
      auto mid1 = [](const Point& x, const Point& y) {
        const double r0 = detail::r0_of(x, y);
        return in_G(x, y) && r0 > 1.0 / 3.0 && r0 < 1.0;
      };
      reg.push_back({"2.3.2", "2.3.2" + tag(a, n) + " vs (1+|x|)^n ∧ (|x|sinθ)^{-n}", K(LemmaKernel::K232),
                     detail::local_global_min, sampler(n, 1.0 / 3.0, 2.0, mid)});
      reg.push_back({"2.3.3", "2.3.3" + tag(a, n) + " vs (|x-y_x|+|y_perp|)^{-n}", K(LemmaKernel::K233),
                     [](const Point& x, const Point& y) {
                       const auto pd = decompose(x, y);
                       return pow_ls((x - pd.y_parallel).norm() + pd.y_perp.norm(), -x.dim());
                     },
                     sampler(n, 1.0 / 3.0, 2.0, mid)});
      reg.push_back({"2.3.3", "2.3.3" + tag(a, n) + " vs (1+|x|)^n ∧ (|x|sinθ)^{-n}", K(LemmaKernel::K233),
                     detail::local_global_min, sampler(n, 1.0 / 3.0, 2.0, mid)});
      reg.push_back({"2.3.1", "2.3.1" + tag(a, n) + " vs A^a + B^a", K(LemmaKernel::K231),
                     [a, n](const Point& x, const Point& y) {
                       return lemma_kernel_eval(lemma_spec(LemmaKernel::A, n, a), x, y) +
                              lemma_kernel_eval(lemma_spec(LemmaKernel::B, n, a), x, y);
                     },
                     sampler(n, 1.0 / 3.0, 1.0, mid1)});
      reg.push_back({"B", "B" + tag(a, n) + " vs (1+|x|)^n", K(LemmaKernel::B),
                     [](const Point& x, const Point&) { return pow_ls(1.0 + x.norm(), x.dim()); },
                     sampler(n, 1.0 / 3.0, 1.0, mid1)});
      if (n >= 2)
        reg.push_back({"B", "B" + tag(a, n) + " vs (|x|sinθ)^{-n}", K(LemmaKernel::B), detail::xsin_pow,
                       sampler(n, 1.0 / 3.0, 1.0, mid1)});
      reg.push_back({"1xn", "1xn" + tag(a, n) + " A^a vs (1+|x|)^n", K(LemmaKernel::A),
                     [](const Point& x, const Point&) { return pow_ls(1.0 + x.norm(), x.dim()); },
                     sampler(n, 1.0 / 3.0, 1.0, mid1)});
    }

  for (int n : {1, 2}) {
    reg.push_back({"stimaint", "stimaint n=" + std::to_string(n) + " vs sqrt(1-r0)/|x| ∧ (1-r0)",
                   lemma_fn(lemma_spec(LemmaKernel::S, n)),
                   [](const Point& x, const Point& y) {
                     const double d = 1.0 - detail::r0_of(x, y);
                     return LogScaled::from(std::min(std::sqrt(d) / x.norm(), d));
                   },
                   sampler(n, 1.0 / 3.0, 1.0, [](const Point& x, const Point& y) {
                     const double r0 = detail::r0_of(x, y);
                     return in_G(x, y) && r0 > 1.0 / 3.0 && r0 < 1.0;
                   })});
  }

  // A^0, A^1, A^2 against (|x| sin θ)^{-n}; meaningful for n >= 2
  auto mid1 = [](const Point& x, const Point& y) {
    const double r0 = detail::r0_of(x, y);
    return in_G(x, y) && r0 > 1.0 / 3.0 && r0 < 1.0;
  };
  for (int n : {2, 3}) {
    const std::string nn = " n=" + std::to_string(n);
    reg.push_back({"A10", "A10" + nn + " A^0 vs (|x|sinθ)^{-n}", lemma_fn(lemma_spec(LemmaKernel::A, n, 0)),
                   detail::xsin_pow, sampler(n, 1.0 / 3.0, 1.0, mid1)});
    reg.push_back({"A11", "A11" + nn + " A^1 vs (|x|sinθ)^{-n}", lemma_fn(lemma_spec(LemmaKernel::A, n, 1)),
                   detail::xsin_pow, sampler(n, 1.0 / 3.0, 1.0, mid1)});
    reg.push_back({"A2-near", "A2-near" + nn + " A^2 1_{|x||x-y_x|<=1} vs (|x|sinθ)^{-n}",
                   lemma_fn(lemma_spec(LemmaKernel::A, n, 2)), detail::xsin_pow,
                   sampler(n, 1.0 / 3.0, 1.0, [mid1](const Point& x, const Point& y) {
                     const double r0 = detail::r0_of(x, y);
                     return mid1(x, y) && x.norm2() * (1.0 - r0) <= 1.0;
                   })});
    LemmaKernelSpec l44 = lemma_spec(LemmaKernel::L44, n, 0, 1.0 / 3.0);
    reg.push_back({"A2-far", "A2-far" + nn + " A^2 1_{|x||x-y_x|>=1} vs L44 kernel (delta=1/3)",
                   lemma_fn(lemma_spec(LemmaKernel::A, n, 2)),
                   [l44](const Point& x, const Point& y) {
                     return lemma_kernel_eval(l44, x, y).shifted(-detail::log_gauss_ratio(x, y));
                   },
                   sampler(n, 1.0 / 3.0, 1.0, [mid1](const Point& x, const Point& y) {
                     const double r0 = detail::r0_of(x, y);
                     return mid1(x, y) && x.norm2() * (1.0 - r0) >= 1.0;
                   })});
  }

  // local r-integral: int_0^1 |x-ry|^nu (1-r^2)^{-(n+mu)/2} e^{-|x-ry|^2/(1-r^2)} dr <~ |x-y|^{-(n+mu-nu-2)} on N_2
  for (int n : {1, 2})
    for (auto [mu, nu] : {std::pair{3.0, 0.0}, std::pair{2.0, 0.0}, std::pair{3.0, 1.0}, std::pair{4.0, 2.0},
                          std::pair{4.0, 1.0}, std::pair{6.0, 3.0}}) {
      BoundEntry e;
      e.lemma = "3.2";
      e.name = "3.2 n=" + std::to_string(n) + " mu=" + std::to_string(static_cast<int>(mu)) +
               " nu=" + std::to_string(static_cast<int>(nu)) + " vs |x-y|^{-(n+mu-nu-2)}";
      e.target = [mu, nu](const Point& x, const Point& y) {
        const int n = x.dim();
        auto f = [&](const RNode& nd) {
          if (nd.one_minus_r <= 0.0) return LogScaled::zero();
          const double d = nd.one_minus_r * (1.0 + nd.r);
          const double p = detail::shifted_norm2(x, y, nd, false);
          if (p / d > 1e5) return LogScaled::zero();
          long double lg = -0.5L * (n + mu) * std::log(d) - p / d;
          if (nu != 0.0) {
            if (p == 0.0) return LogScaled::zero();
            lg += 0.5L * nu * std::log(p);
          }
          return LogScaled::from_log(1, lg);
        };
        return detail::integrate_split(f, QuadratureConfig{.rel_tol = 1e-9, .abs_tol = 1e-13},
                                       detail::kernel_breakpoints(x, y))
            .value;
      };
      e.bound = [mu, nu](const Point& x, const Point& y) { return pow_ls(distance(x, y), -(x.dim() + mu - nu - 2.0)); };
      PairSampler s;
      s.n = n;
      s.local = true;
      s.x_max = 5.0;
      s.accept = [](const Point& x, const Point& y) { return in_N(2.0, x, y) && !(x == y); };
      e.sampler = s;
      reg.push_back(std::move(e));
    }
  return reg;
}

/// Registry entries for a lemma id ("all", "2.3.2", "5.2.3.2", "A10", ...).
inline std::vector<BoundEntry> select_bounds(const std::string& which) {
  auto reg = bound_registry();
  if (which == "all") return reg;
  std::string key = which;
  if (key.rfind("5.", 0) == 0) key = key.substr(2);
  std::vector<BoundEntry> out;
  for (auto& e : reg)
    if (e.lemma == key) out.push_back(e);
  if (out.empty()) throw DomainError("unknown estimate id '" + which + "'");
  return out;
}

} // namespace riesz
