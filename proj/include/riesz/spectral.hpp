#pragma once

#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/hermite.hpp"
#include "riesz/log_scaled.hpp"
#include "riesz/quadrature.hpp"

namespace riesz {

/// All multi-indices of dimension n with |b| <= D, by shell then with larger
/// leading entries first.
inline std::vector<MultiIndex> multi_indices_upto(int n, int D) {
  require(D >= 0, "multi_indices_upto: negative degree");
  std::vector<MultiIndex> out;
  MultiIndex cur(n);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      cur.set(i, left);
      out.push_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur.set(i, v);
      rec(i + 1, left - v);
    }
  };
  for (int d = 0; d <= D; ++d) rec(0, d);
  return out;
}

/// Coefficients c_b = (f, gamma h_b) in L^2(gamma_{-1}) for |b| <= D.
class SpectralCoefficients {
public:
  SpectralCoefficients() = default;
  SpectralCoefficients(int n, int D) : n_(n), D_(D), basis_(multi_indices_upto(n, D)), c_(basis_.size(), 0.0) {
    for (std::size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], static_cast<int>(i));
  }

  int dim() const { return n_; }
  int max_degree() const { return D_; }
  std::size_t size() const { return c_.size(); }
  const MultiIndex& index(std::size_t i) const { return basis_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }

  double at(const MultiIndex& b) const {
    auto it = index_.find(b);
    return it == index_.end() ? 0.0 : c_[it->second];
  }
  void set(const MultiIndex& b, double v) {
    auto it = index_.find(b);
    if (it == index_.end()) throw DomainError("SpectralCoefficients: index " + b.to_string() + " beyond degree");
    c_[it->second] = v;
  }

  double norm2() const {
    double s = 0.0;
    for (double v : c_) s += v * v;
    return s;
  }

  /// Share of the squared norm carried by the top shell |b| = D.
  double top_shell_fraction() const {
    const double tot = norm2();
    if (tot == 0.0) return 0.0;
    double top = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (basis_[i].order() == D_) top += c_[i] * c_[i];
    return top / tot;
  }

  std::vector<std::string> warnings;

private:
  int n_ = 0, D_ = 0;
  std::vector<MultiIndex> basis_;
  std::vector<double> c_;
  std::map<MultiIndex, int> index_;
};

struct AnalyzeOptions {
  /// Gauss-Hermite nodes per coordinate; must exceed D.
  int order = 0;
  /// If set, f is taken to vanish outside [lo,hi]^n and is integrated with
  /// composite Gauss-Legendre panels there instead of Gauss-Hermite.
  bool box = false;
  double lo = 0.0, hi = 0.0;
  int panels = 8;
  int panel_order = 16;
  /// Top-shell energy share above which a truncation warning is attached.
  double decay_warning = 1e-6;
};

/// c_b = integral of f h_b dx, with f given in log domain. In Gauss-Hermite
/// mode the weight exp(-|x|^2) is divided out of f in log domain, so that
/// Gaussian-dominated inputs like gamma * p lose no digits.
inline SpectralCoefficients analyze(const std::function<LogScaled(const Point&)>& f, int n, int D,
                                    const AnalyzeOptions& opt) {
  require(n >= 1 && n <= 3, "analyze: dimension must be 1..3");
  require(D >= 0, "analyze: negative degree");
  SpectralCoefficients c(n, D);
  std::vector<double> x, w;
  if (opt.box) {
    require(opt.hi > opt.lo && opt.panels >= 1 && opt.panel_order >= 1, "analyze: invalid box");
    const auto& gl = gauss_legendre(opt.panel_order);
    const double h = (opt.hi - opt.lo) / opt.panels;
    for (int p = 0; p < opt.panels; ++p)
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        x.push_back(opt.lo + h * (p + 0.5 * (gl.nodes[i] + 1.0)));
        w.push_back(0.5 * h * gl.weights[i]);
      }
  } else {
    require(opt.order >= D + 1, "analyze: quadrature order must be at least D+1");
    const auto& gh = gauss_hermite(opt.order);
    x = gh.nodes;
    w = gh.weights;
  }
  // per-node values of all h_b via 1-d tables
  const int m = static_cast<int>(x.size());
  std::vector<std::vector<double>> h1(m, std::vector<double>(D + 1));
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= D; ++k) h1[i][k] = hermite1d_normalized(k, x[i]);
  std::vector<int> idx(n, 0);
  std::vector<double> acc(c.size(), 0.0);
  Point p(n);
  for (;;) {
    double wt = 1.0;
    for (int i = 0; i < n; ++i) {
      p[i] = x[idx[i]];
      wt *= w[idx[i]];
    }
    LogScaled fx = f(p) * LogScaled::from(wt);
    if (!opt.box) fx = fx.shifted(p.norm2());
    const double fv = fx.to_double();
    if (fv != 0.0)
      for (std::size_t j = 0; j < c.size(); ++j) {
        const MultiIndex& b = c.index(j);
        double hb = 1.0;
        for (int i = 0; i < n; ++i) hb *= h1[idx[i]][b[i]];
        acc[j] += fv * hb;
      }
    int i = 0;
    while (i < n && ++idx[i] == m) idx[i++] = 0;
    if (i == n) break;
  }
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = acc[j];
  if (D > 0 && c.top_shell_fraction() > opt.decay_warning) {
    std::ostringstream os;
    os << "top-shell energy fraction " << c.top_shell_fraction() << " exceeds " << opt.decay_warning
       << "; raise D or the quadrature order";
    c.warnings.push_back(os.str());
  }
  return c;
}

/// sum_b c_b (gamma h_b)(x), in log domain.
inline LogScaled synthesize_log(const SpectralCoefficients& c, const Point& x) {
  require(x.dim() == c.dim(), "synthesize: dimension mismatch");
  const int D = c.max_degree();
  std::vector<std::vector<double>> h1(x.dim(), std::vector<double>(D + 1));
  for (int i = 0; i < x.dim(); ++i)
    for (int k = 0; k <= D; ++k) h1[i][k] = hermite1d_normalized(k, x[i]);
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0.0) continue;
    double hb = c[j];
    for (int i = 0; i < x.dim(); ++i) hb *= h1[i][c.index(j)[i]];
    s += hb;
  }
  return gauss_density(x) * LogScaled::from(s);
}

inline double synthesize(const SpectralCoefficients& c, const Point& x) { return synthesize_log(c, x).to_double(); }

/// Multiplier (|b|+n)^{-b} of A^{-b}; b = 0 is the identity.
inline SpectralCoefficients apply_frac_power(const SpectralCoefficients& c, double b) {
  require(b >= 0.0, "apply_frac_power: b must be non-negative");
  SpectralCoefficients out = c;
  for (std::size_t j = 0; j < c.size(); ++j) out[j] = c[j] * std::pow(c.index(j).order() + c.dim(), -b);
  return out;
}

/// Ladder coefficient mapping c_b to the coefficient of R_alpha f at b+alpha.
inline double riesz_multiplier(const MultiIndex& a, const MultiIndex& b, int n) {
  const int k = a.order();
  return ladder_sign(a, b) * std::exp(0.5 * k * std::numbers::ln2 + 0.5 * log_factorial_ratio(b, a) -
                                      0.5 * k * std::log(static_cast<double>(b.order() + n)));
}

/// R_alpha f = d^alpha A^{-|alpha|/2} f; the output degree grows by |alpha|.
inline SpectralCoefficients apply_riesz_spectral(const SpectralCoefficients& c, const MultiIndex& a) {
  require(a.dim() == c.dim(), "apply_riesz_spectral: dimension mismatch");
  require(a.order() >= 1, "apply_riesz_spectral: |alpha| must be at least 1");
  SpectralCoefficients out(c.dim(), c.max_degree() + a.order());
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] != 0.0) out.set(c.index(j) + a, riesz_multiplier(a, c.index(j), c.dim()) * c[j]);
  return out;
}

struct NormBound {
  double bound = 0.0;   ///< sqrt of the supremum of the squared multiplier
  MultiIndex argmax;    ///< first b attaining it
  bool tail_monotone = false; ///< shell maxima non-increasing over the upper half of the range
  std::size_t evaluated = 0;
};

/// sup over |b| <= B_max of sqrt(2^{|a|} (b+a)!/(b! (|b|+n)^{|a|})). Entries of
/// b outside supp(a) only enlarge the denominator, so the search runs over b
/// supported on supp(a).
inline NormBound l2_norm_bound(const MultiIndex& a, int n, int B_max) {
  require(a.dim() == n, "l2_norm_bound: dimension mismatch");
  require(B_max >= 0, "l2_norm_bound: B_max must be non-negative");
  std::vector<int> supp;
  for (int i = 0; i < n; ++i)
    if (a[i] > 0) supp.push_back(i);
  const int s = static_cast<int>(supp.size());
  double combos = 1.0;
  for (int i = 1; i <= s; ++i) combos *= static_cast<double>(B_max + i) / i;
  require(combos <= 2e8, "l2_norm_bound: search space too large; lower B_max");
  const int k = a.order();
  const double p2 = std::ldexp(1.0, k);
  std::vector<double> shell_max(B_max + 1, 0.0);
  NormBound nb;
  double best = -1.0;
  MultiIndex b(n);
  auto ratio = [&](int tot) {
    double r = p2;
    const double den = tot + n;
    for (int i : supp)
      for (int j = 1; j <= a[i]; ++j) r *= (b[i] + j) / den;
    return r;
  };
  std::function<void(int, int)> rec = [&](int i, int tot) {
    if (i == s) {
      const double r = ratio(tot);
      ++nb.evaluated;
      shell_max[tot] = std::max(shell_max[tot], r);
      if (r > best) {
        best = r;
        nb.argmax = b;
      }
      return;
    }
    for (int v = 0; tot + v <= B_max; ++v) {
      b.set(supp[i], v);
      rec(i + 1, tot + v);
    }
    b.set(supp[i], 0);
  };
  rec(0, 0);
  nb.bound = std::sqrt(best);
  nb.tail_monotone = true;
  for (int d = B_max / 2 + 1; d <= B_max; ++d)
    if (shell_max[d] > shell_max[d - 1]) nb.tail_monotone = false;
  return nb;
}

/// Flat text table: a header "# n D" and one row per nonzero coefficient
/// with the b entries followed by the value.
inline void write_coefficients(std::ostream& os, const SpectralCoefficients& c) {
  os << "# " << c.dim() << ' ' << c.max_degree() << '\n';
  os.precision(17);
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0.0) continue;
    for (int i = 0; i < c.dim(); ++i) os << c.index(j)[i] << ' ';
    os << c[j] << '\n';
  }
}

inline SpectralCoefficients read_coefficients(std::istream& is) {
  std::string hash;
  int n = 0, D = 0;
  if (!(is >> hash >> n >> D) || hash != "#") throw DomainError("read_coefficients: missing '# n D' header");
  SpectralCoefficients c(n, D);
  for (;;) {
    MultiIndex b(n);
    int v = 0;
    if (!(is >> v)) break;
    b.set(0, v);
    for (int i = 1; i < n; ++i) {
      if (!(is >> v)) throw DomainError("read_coefficients: truncated row");
      b.set(i, v);
    }
    double val = 0.0;
    if (!(is >> val)) throw DomainError("read_coefficients: truncated row");
    c.set(b, val);
  }
  return c;
}

} // namespace riesz
