#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "riesz/apply.hpp"
#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/log_scaled.hpp"
#include "riesz/parallel.hpp"
#include "riesz/quadrature.hpp"
#include "riesz/weaktype/level_set.hpp"
#include "riesz/weaktype/slope.hpp"

namespace riesz {

/// Lower-bound experiment for R_alpha on the tube
/// J(z) = {|x_perp| < 1, (4/3)|z| < x.z/|z| < (3/2)|z|}, z = (eta, ..., eta),
/// with f the normalized indicator of B(z, radius).
struct CounterexampleConfig {
  MultiIndex alpha;
  std::vector<double> etas;
  double radius = 1.0;
  // coarse evaluation grid over J (Gauss-Legendre panels)
  double u_panel = 0.25;
  int u_order = 6;
  int v_panels = 2;
  int v_order = 6;
  int azimuths = 12; ///< n = 3 only
  // fine grid for the level sets
  double fine_u_scale = 100.0; ///< cell width 1 / (fine_u_scale * u_max)
  int fine_v_cells = 200;
  int thresholds = 64;
  double threshold_ratio = 1e-6;
  QuadratureConfig kernel{.rel_tol = 1e-8, .abs_tol = 1e-12};
  ApplyRule rule;
  int jobs = 1;

  void validate() const {
    const int n = alpha.dim();
    require(n >= 1 && n <= 3, "counterexample: dimension must be 1..3");
    require(alpha.order() >= 1, "counterexample: |alpha| must be at least 1");
    require(!etas.empty(), "counterexample: empty eta list");
    require(radius > 0.0, "counterexample: radius must be positive");
    for (double eta : etas) {
      require(eta >= 4.0, "counterexample: eta must be at least 4 (eta = " + std::to_string(eta) + ")");
      // J starts at (4/3)|z| along z while the ball reaches |z| + radius
      require((4.0 / 3.0) * eta * std::sqrt(static_cast<double>(n)) > eta * std::sqrt(static_cast<double>(n)) + radius,
              "counterexample: tube and ball overlap for eta = " + std::to_string(eta));
    }
    require(u_panel > 0.0 && u_order >= 2 && v_panels >= 1 && v_order >= 2 && azimuths >= 3,
            "counterexample: bad coarse grid");
    require(fine_u_scale > 0.0 && fine_v_cells >= 1, "counterexample: bad fine grid");
  }
};

struct CounterexampleRow {
  double eta = 0.0;
  LogScaled quasi_norm;  ///< tube-restricted lower bound of the weak quasi-norm
  LogScaled tube_measure;
  LogScaled max_abs_tf;
  LevelSetReport report;
  std::size_t coarse_points = 0;
  std::size_t fine_cells = 0;
  int sign = 0; ///< common sign of R_alpha f on the coarse grid, 0 if mixed
};

struct CounterexampleResult {
  std::vector<CounterexampleRow> rows;
  SlopeFit fit;
  bool has_fit = false;
};

namespace detail {

inline std::vector<double> lagrange_weights(const std::vector<double>& nodes, double t) {
  std::vector<double> w(nodes.size(), 1.0);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j)
      if (j != i) w[i] *= (t - nodes[j]) / (nodes[i] - nodes[j]);
  return w;
}

// Composite Gauss-Legendre nodes on [a,b]; panel p holds indices
// [p*order, (p+1)*order).
inline std::vector<double> panel_nodes(double a, double b, int panels, int order) {
  const auto& gl = gauss_legendre(order);
  std::vector<double> x;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    for (int k = 0; k < order; ++k) x.push_back(a + h * (p + 0.5 * (gl.nodes[k] + 1.0)));
  return x;
}

// Interpolation of panel data to t: (first node index, weights).
inline std::pair<int, std::vector<double>> panel_interp(const std::vector<double>& nodes, double a, double b,
                                                        int panels, int order, double t) {
  const double h = (b - a) / panels;
  const int p = std::clamp(static_cast<int>((t - a) / h), 0, panels - 1);
  std::vector<double> loc(nodes.begin() + p * order, nodes.begin() + (p + 1) * order);
  return {p * order, lagrange_weights(loc, t)};
}

} // namespace detail

/// Tube-restricted weak quasi-norm lower bound for one eta.
inline CounterexampleRow counterexample_row(const CounterexampleConfig& cfg, double eta) {
  const int n = cfg.alpha.dim();
  Point z(n);
  for (int i = 0; i < n; ++i) z[i] = eta;
  const double zn = z.norm();
  const Point e = (1.0 / zn) * z;
  const auto perp = detail::orthonormal_complement(e);
  const GridFunction f = normalized_ball_indicator(z, cfg.radius, cfg.rule);
  const PVConfig pv;

  const double u0 = (4.0 / 3.0) * zn, u1 = 1.5 * zn;
  const int up = std::max(1, static_cast<int>(std::ceil((u1 - u0) / cfg.u_panel)));
  const auto un = detail::panel_nodes(u0, u1, up, cfg.u_order);
  // transverse coordinates: v in (-1,1) for n = 2; polar (rho, phi) in the unit disk for n = 3
  const auto vn = n >= 2 ? detail::panel_nodes(n == 2 ? -1.0 : 0.0, 1.0, cfg.v_panels, cfg.v_order) : std::vector<double>{0.0};
  const int az = n == 3 ? cfg.azimuths : 1;
  auto point = [&](double u, double v, double ph) {
    Point x = u * e;
    if (n == 2) x += v * perp[0];
    if (n == 3) x += (v * std::cos(ph)) * perp[0] + (v * std::sin(ph)) * perp[1];
    return x;
  };
  const std::size_t nu = un.size(), nv = vn.size();
  const std::size_t count = nu * nv * az;
  struct Val {
    double phi = 0.0; // log|R f| + |x|^2
    int sign = 0;
  };
  auto vals = parallel_map<Val>(
      count,
      [&](std::size_t idx) {
        const std::size_t iu = idx / (nv * az), iv = (idx / az) % nv, ia = idx % az;
        const Point x = point(un[iu], vn[iv], 2.0 * std::numbers::pi * (ia + 0.5) / az);
        const LogScaled r = apply_glob(cfg.alpha, f, x, pv, cfg.kernel, cfg.rule);
        Val out;
        out.sign = r.sign();
        out.phi = r.is_zero() ? -std::numeric_limits<double>::infinity() : static_cast<double>(r.logmag()) + x.norm2();
        return out;
      },
      cfg.jobs);

  CounterexampleRow row;
  row.eta = eta;
  row.coarse_points = count;
  row.sign = vals.front().sign;
  for (const auto& v : vals)
    if (v.sign != row.sign) row.sign = 0;

  // fine midpoint grid; phi interpolated panelwise, first across v, then u
  const double hu = 1.0 / (cfg.fine_u_scale * u1);
  const int fu = std::max(1, static_cast<int>(std::ceil((u1 - u0) / hu)));
  const double du = (u1 - u0) / fu;
  const int fv = n >= 2 ? cfg.fine_v_cells : 1;
  const double v0 = n == 2 ? -1.0 : 0.0;
  const double dv = n >= 2 ? (1.0 - v0) / fv : 1.0;
  // phi at coarse u nodes, fine v cells (and azimuth)
  std::vector<double> phi_uv(nu * fv * az);
  for (int jv = 0; jv < fv; ++jv) {
    std::pair<int, std::vector<double>> iw{0, {1.0}};
    if (n >= 2) iw = detail::panel_interp(vn, v0, 1.0, cfg.v_panels, cfg.v_order, v0 + (jv + 0.5) * dv);
    for (std::size_t iu = 0; iu < nu; ++iu)
      for (int ia = 0; ia < az; ++ia) {
        double s = 0.0;
        for (std::size_t k = 0; k < iw.second.size(); ++k) s += iw.second[k] * vals[(iu * nv + iw.first + k) * az + ia].phi;
        phi_uv[(iu * fv + jv) * az + ia] = s;
      }
  }
  WeightedSamples ws;
  ws.value.reserve(static_cast<std::size_t>(fu) * fv * az);
  ws.mass.reserve(ws.value.capacity());
  const long double log_pi_half = 0.5L * n * std::log(std::numbers::pi_v<long double>);
  LogAccumulator tube;
  for (int ju = 0; ju < fu; ++ju) {
    const double u = u0 + (ju + 0.5) * du;
    const auto iw = detail::panel_interp(un, u0, u1, up, cfg.u_order, u);
    for (int jv = 0; jv < fv; ++jv) {
      const double v = v0 + (jv + 0.5) * dv;
      for (int ia = 0; ia < az; ++ia) {
        double phi = 0.0;
        for (std::size_t k = 0; k < iw.second.size(); ++k) phi += iw.second[k] * phi_uv[((iw.first + k) * fv + jv) * az + ia];
        const double x2 = u * u + v * v;
        double cell = du * (n >= 2 ? dv : 1.0);
        if (n == 3) cell *= v * 2.0 * std::numbers::pi / az;
        const LogScaled mass = LogScaled::from_log(1, log_pi_half + x2 + std::log(static_cast<long double>(cell)));
        ws.add(LogScaled::from_log(1, static_cast<long double>(phi) - x2), mass);
        tube.add(mass);
      }
    }
  }
  ws.domain = "tube J(z), eta=" + std::to_string(eta);
  ws.resolution = std::to_string(fu) + "x" + std::to_string(fv * az) + " fine cells from " + std::to_string(count) +
                  " coarse evaluations";
  row.fine_cells = ws.size();
  row.tube_measure = tube.value();
  for (const auto& v : ws.value)
    if (row.max_abs_tf.magnitude_less(v)) row.max_abs_tf = v;
  row.report = level_set_report(ws, 1.0, log_spaced_thresholds(row.max_abs_tf, cfg.threshold_ratio, cfg.thresholds));
  row.quasi_norm = row.report.quasi_norm;
  return row;
}

inline CounterexampleResult counterexample_lower_bound(const CounterexampleConfig& cfg) {
  cfg.validate();
  CounterexampleResult res;
  for (double eta : cfg.etas) res.rows.push_back(counterexample_row(cfg, eta));
  if (res.rows.size() >= 3) {
    std::vector<double> e, v;
    for (const auto& r : res.rows) {
      e.push_back(r.eta);
      v.push_back(r.quasi_norm.to_double());
    }
    res.fit = slope_fit(e, v);
    res.has_fit = true;
  }
  return res;
}

} // namespace riesz
