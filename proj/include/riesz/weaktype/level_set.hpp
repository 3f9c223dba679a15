#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/log_scaled.hpp"

namespace riesz {

/// Values of |Tf| on quadrature cells together with the gamma_{-1}-mass of
/// each cell (quadrature weight times density).
struct WeightedSamples {
  std::vector<LogScaled> value;
  std::vector<LogScaled> mass;
  std::string domain; ///< description of the truncation domain
  std::string resolution;

  void add(const LogScaled& v, const LogScaled& m) {
    value.push_back(v.abs());
    mass.push_back(m);
  }
  std::size_t size() const { return value.size(); }
};

struct LevelSetReport {
  std::vector<LogScaled> s;        ///< thresholds, increasing
  std::vector<LogScaled> measure;  ///< gamma_{-1}{|Tf| > s}
  LogScaled quasi_norm;            ///< max_s s * measure / f_norm
  std::size_t argmax = 0;
  std::string domain;
  std::string resolution;

  double quasi_norm_value() const { return quasi_norm.to_double(); }
};

/// `count` thresholds log-spaced on [top * lo_ratio, top].
inline std::vector<LogScaled> log_spaced_thresholds(const LogScaled& top, double lo_ratio = 1e-6, int count = 64) {
  require(count >= 2 && lo_ratio > 0.0 && lo_ratio < 1.0, "log_spaced_thresholds: bad grid");
  std::vector<LogScaled> s;
  const long double l0 = top.logmag() + std::log(static_cast<long double>(lo_ratio));
  for (int i = 0; i < count; ++i)
    s.push_back(LogScaled::from_log(1, l0 + (top.logmag() - l0) * i / (count - 1)));
  return s;
}

/// Level-set measures of |Tf| over the sampled domain. An empty s-grid
/// selects the default 64 thresholds spanning [max|Tf| 1e-6, max|Tf|].
inline LevelSetReport level_set_report(const WeightedSamples& tf, double f_norm, std::vector<LogScaled> s_grid = {}) {
  require(f_norm > 0.0, "level_set_report: f_norm must be positive");
  require(tf.value.size() == tf.mass.size(), "level_set_report: size mismatch");
  LevelSetReport rep;
  rep.domain = tf.domain;
  rep.resolution = tf.resolution;
  std::vector<std::size_t> order(tf.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return tf.value[b].magnitude_less(tf.value[a]); });
  LogScaled top;
  if (!order.empty()) top = tf.value[order.front()];
  if (top.is_zero()) {
    rep.quasi_norm = LogScaled::zero();
    return rep;
  }
  if (s_grid.empty()) s_grid = log_spaced_thresholds(top);
  std::sort(s_grid.begin(), s_grid.end(), [](const LogScaled& a, const LogScaled& b) { return a.magnitude_less(b); });
  // prefix masses over decreasing |Tf|
  std::vector<LogScaled> prefix(order.size() + 1);
  LogAccumulator run;
  for (std::size_t i = 0; i < order.size(); ++i) {
    run.add(tf.mass[order[i]]);
    prefix[i + 1] = run.value();
  }
  const LogScaled norm = LogScaled::from(f_norm);
  for (std::size_t j = 0; j < s_grid.size(); ++j) {
    // number of samples with |Tf| > s
    const auto it = std::partition_point(order.begin(), order.end(),
                                         [&](std::size_t i) { return s_grid[j].magnitude_less(tf.value[i]); });
    const LogScaled m = prefix[it - order.begin()];
    rep.s.push_back(s_grid[j]);
    rep.measure.push_back(m);
    const LogScaled q = s_grid[j] * m / norm;
    if (rep.quasi_norm.magnitude_less(q)) {
      rep.quasi_norm = q;
      rep.argmax = j;
    }
  }
  return rep;
}

} // namespace riesz
