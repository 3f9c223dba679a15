#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/hermite.hpp"
#include "riesz/log_scaled.hpp"
#include "riesz/quadrature.hpp"

namespace riesz {

/// Box spanned by orthonormal axes through an origin:
/// {origin + sum_i u_i axes[i] : lo_i <= u_i <= hi_i}.
struct OrientedBox {
  Point origin;
  std::vector<Point> axes;
  std::vector<double> lo, hi;

  static OrientedBox aligned(const Point& lo, const Point& hi) {
    OrientedBox b;
    const int n = lo.dim();
    b.origin = Point(n);
    for (int i = 0; i < n; ++i) {
      Point e(n);
      e[i] = 1.0;
      b.axes.push_back(e);
      b.lo.push_back(lo[i]);
      b.hi.push_back(hi[i]);
    }
    return b;
  }
  int dim() const { return static_cast<int>(axes.size()); }
  Point at(std::span<const double> u) const {
    Point p = origin;
    for (int i = 0; i < dim(); ++i) p += u[i] * axes[i];
    return p;
  }
};

struct MeasureResult {
  LogScaled value;
  double relative_change = 0.0; ///< between resolution and twice the resolution
  bool warning = false;
  double standard_error = 0.0;  ///< Monte Carlo only, relative
  std::string note;
};

namespace detail {

// Composite Gauss-Legendre masked tensor sum of gamma_{-1} over the box.
inline LogScaled masked_tensor_measure(const std::function<bool(const Point&)>& in, const OrientedBox& box,
                                       int panels, int order) {
  const int n = box.dim();
  const auto& gl = gauss_legendre(order);
  std::vector<std::vector<double>> u(n), w(n);
  for (int i = 0; i < n; ++i) {
    const double h = (box.hi[i] - box.lo[i]) / panels;
    for (int p = 0; p < panels; ++p)
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        u[i].push_back(box.lo[i] + h * (p + 0.5 * (gl.nodes[k] + 1.0)));
        w[i].push_back(0.5 * h * gl.weights[k]);
      }
  }
  const int m = panels * order;
  std::vector<int> idx(n, 0);
  std::vector<double> uu(n);
  LogAccumulator acc;
  for (;;) {
    double wt = 1.0;
    for (int i = 0; i < n; ++i) {
      uu[i] = u[i][idx[i]];
      wt *= w[i][idx[i]];
    }
    const Point x = box.at(uu);
    if (in(x)) acc.add(inv_gauss_density(x) * LogScaled::from(wt));
    int i = 0;
    while (i < n && ++idx[i] == m) idx[i++] = 0;
    if (i == n) break;
  }
  return acc.value();
}

} // namespace detail

/// gamma_{-1}(region) for a region inside `box`. `resolution` is the number
/// of Gauss-Legendre panels per axis (4 nodes each); the result is computed
/// at resolution and 2*resolution, the finer value returned, and a warning
/// raised when the two differ by more than 1%.
inline MeasureResult gamma_inv_measure(const std::function<bool(const Point&)>& in, const OrientedBox& box,
                                       int resolution) {
  require(box.dim() >= 1 && box.dim() <= kMaxDim, "gamma_inv_measure: bad box");
  require(resolution >= 1, "gamma_inv_measure: resolution must be positive");
  for (int i = 0; i < box.dim(); ++i) require(box.hi[i] > box.lo[i], "gamma_inv_measure: empty box side");
  const LogScaled coarse = detail::masked_tensor_measure(in, box, resolution, 4);
  const LogScaled fine = detail::masked_tensor_measure(in, box, 2 * resolution, 4);
  MeasureResult r;
  r.value = fine;
  if (!fine.is_zero() || !coarse.is_zero()) {
    const LogScaled big = fine.magnitude_less(coarse) ? coarse : fine;
    r.relative_change = ((fine - coarse).abs() / big).to_double();
  }
  if (r.relative_change > 0.01) {
    r.warning = true;
    r.note = "resolution insufficient: doubling changed the measure by " + std::to_string(100 * r.relative_change) + "%";
  }
  return r;
}

namespace detail {

// Inverse-CDF sampler for the density proportional to exp(u^2) on [a,b],
// tabulated in log domain.
class ExpSquareSampler {
public:
  ExpSquareSampler(double a, double b, int table = 4096) : a_(a), b_(b), cdf_(table + 1) {
    const double h = (b - a) / table;
    std::vector<LogScaled> cells(table);
    for (int i = 0; i < table; ++i) {
      // exact cell mass of exp(u^2) by 4-point Gauss-Legendre
      const auto& gl = gauss_legendre(4);
      std::vector<LogScaled> t;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double u = a + h * (i + 0.5 * (gl.nodes[k] + 1.0));
        t.push_back(LogScaled::from_log(1, static_cast<long double>(u) * u + std::log(0.5 * h * gl.weights[k])));
      }
      cells[i] = log_sum(t);
    }
    log_total_ = log_sum(cells);
    LogAccumulator run;
    cdf_[0] = 0.0;
    for (int i = 0; i < table; ++i) {
      run.add(cells[i]);
      cdf_[i + 1] = (run.value() / log_total_).to_double();
    }
    cdf_.back() = 1.0;
  }
  const LogScaled& total() const { return log_total_; }
  double operator()(double p) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
    const std::size_t i = std::clamp<std::size_t>(it - cdf_.begin(), 1, cdf_.size() - 1);
    const double f = (p - cdf_[i - 1]) / std::max(cdf_[i] - cdf_[i - 1], 1e-300);
    const double h = (b_ - a_) / (cdf_.size() - 1);
    return a_ + h * (i - 1 + std::clamp(f, 0.0, 1.0));
  }

private:
  double a_, b_;
  std::vector<double> cdf_;
  LogScaled log_total_;
};

} // namespace detail

/// Monte Carlo gamma_{-1}(region) for an axis-aligned box (used for n = 3):
/// importance sampling with density proportional to exp(|x|^2) on the box,
/// which is a product of one-dimensional densities.
inline MeasureResult gamma_inv_measure_mc(const std::function<bool(const Point&)>& in, const OrientedBox& box,
                                          std::size_t samples, std::uint64_t seed) {
  require(samples >= 2, "gamma_inv_measure_mc: need at least two samples");
  const int n = box.dim();
  std::vector<detail::ExpSquareSampler> samp;
  LogScaled mass = LogScaled::from_log(1, 0.5L * n * std::log(std::numbers::pi_v<long double>));
  for (int i = 0; i < n; ++i) {
    samp.emplace_back(box.lo[i], box.hi[i]);
    mass *= samp.back().total();
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::size_t hits = 0;
  std::vector<double> u(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) u[i] = samp[i](uni(rng));
    if (in(box.at(u))) ++hits;
  }
  const double p = static_cast<double>(hits) / samples;
  MeasureResult r;
  r.value = mass * LogScaled::from(p);
  r.standard_error = p > 0.0 ? std::sqrt(p * (1.0 - p) / samples) / p : 0.0;
  r.note = "monte carlo, " + std::to_string(samples) + " samples, seed " + std::to_string(seed);
  return r;
}

} // namespace riesz
