#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <span>
#include <string>

#include "riesz/error.hpp"

namespace riesz {

inline constexpr int kMaxDim = 8;

/// Point of R^n with inline storage (no heap traffic in kernel loops).
class Point {
public:
  Point() = default;
  explicit Point(int n) : n_(n) {
    require(n >= 1 && n <= kMaxDim, "Point: dimension out of range");
  }
  Point(std::initializer_list<double> c) : n_(static_cast<int>(c.size())) {
    require(n_ >= 1 && n_ <= kMaxDim, "Point: dimension out of range");
    std::copy(c.begin(), c.end(), c_.begin());
  }
  explicit Point(std::span<const double> c) : n_(static_cast<int>(c.size())) {
    require(n_ >= 1 && n_ <= kMaxDim, "Point: dimension out of range");
    std::copy(c.begin(), c.end(), c_.begin());
  }

  int dim() const { return n_; }
  double& operator[](int i) { return c_[i]; }
  double operator[](int i) const { return c_[i]; }
  std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(n_)}; }

  double norm2() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += c_[i] * c_[i];
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  Point& operator+=(const Point& o) {
    for (int i = 0; i < n_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (int i = 0; i < n_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Point& operator*=(double s) {
    for (int i = 0; i < n_; ++i) c_[i] *= s;
    return *this;
  }
  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend bool operator==(const Point& a, const Point& b) {
    return a.n_ == b.n_ && std::equal(a.c_.begin(), a.c_.begin() + a.n_, b.c_.begin());
  }

  friend std::ostream& operator<<(std::ostream& os, const Point& p) {
    os << '(';
    for (int i = 0; i < p.n_; ++i) os << (i ? "," : "") << p.c_[i];
    return os << ')';
  }

private:
  int n_ = 0;
  std::array<double, kMaxDim> c_{};
};

inline double dot(const Point& a, const Point& b) {
  require(a.dim() == b.dim(), "dot: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }

/// Multi-index alpha in N^n.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(int n) : n_(n) {
    require(n >= 1 && n <= kMaxDim, "MultiIndex: dimension out of range");
  }
  MultiIndex(std::initializer_list<int> e) : n_(static_cast<int>(e.size())) {
    require(n_ >= 1 && n_ <= kMaxDim, "MultiIndex: dimension out of range");
    std::copy(e.begin(), e.end(), e_.begin());
    for (int i = 0; i < n_; ++i) require(e_[i] >= 0, "MultiIndex: negative entry");
  }
  explicit MultiIndex(std::span<const int> e) : n_(static_cast<int>(e.size())) {
    require(n_ >= 1 && n_ <= kMaxDim, "MultiIndex: dimension out of range");
    std::copy(e.begin(), e.end(), e_.begin());
    for (int i = 0; i < n_; ++i) require(e_[i] >= 0, "MultiIndex: negative entry");
  }

  int dim() const { return n_; }
  int operator[](int i) const { return e_[i]; }
  void set(int i, int v) {
    require(v >= 0, "MultiIndex: negative entry");
    e_[i] = v;
  }
  int order() const { return std::accumulate(e_.begin(), e_.begin() + n_, 0); }

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    require(a.n_ == b.n_, "MultiIndex: dimension mismatch");
    MultiIndex r(a.n_);
    for (int i = 0; i < a.n_; ++i) r.e_[i] = a.e_[i] + b.e_[i];
    return r;
  }
  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.n_ == b.n_ && std::equal(a.e_.begin(), a.e_.begin() + a.n_, b.e_.begin());
  }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    if (a.order() != b.order()) return a.order() < b.order();
    // within a shell, larger leading entries come first
    return std::lexicographical_compare(b.e_.begin(), b.e_.begin() + b.n_, a.e_.begin(), a.e_.begin() + a.n_);
  }

  std::string to_string() const {
    std::string s = "(";
    for (int i = 0; i < n_; ++i) s += (i ? "," : "") + std::to_string(e_[i]);
    return s + ")";
  }
  friend std::ostream& operator<<(std::ostream& os, const MultiIndex& m) { return os << m.to_string(); }

  /// The multi-index of order `order` in n dimensions whose entries differ by
  /// at most one, larger entries first: order 3 in n=2 gives (2,1).
  static MultiIndex balanced(int n, int order) {
    require(order >= 0, "MultiIndex: negative order");
    MultiIndex m(n);
    for (int i = 0; i < n; ++i) m.e_[i] = order / n + (i < order % n ? 1 : 0);
    return m;
  }

private:
  int n_ = 0;
  std::array<int, kMaxDim> e_{};
};

/// y = y_par + y_perp relative to a nonzero x, with y_par = r0 * x and theta
/// the angle between x and y.
struct PolarDecomposition {
  Point y_parallel;
  Point y_perp;
  double r0 = 0.0;
  double theta = 0.0;
};

inline PolarDecomposition decompose(const Point& x, const Point& y) {
  require(x.dim() == y.dim(), "decompose: dimension mismatch");
  const double nx2 = x.norm2();
  if (!(nx2 > 0.0)) throw DomainError("decompose: degenerate x (|x| = 0)");
  PolarDecomposition d;
  d.r0 = dot(x, y) / nx2;
  d.y_parallel = d.r0 * x;
  d.y_perp = y - d.y_parallel;
  if (x.dim() == 1) { // exact: no perpendicular direction
    d.y_parallel = y;
    d.y_perp = Point(1);
    d.r0 = y[0] / x[0];
  }
  // atan2 stays accurate near collinearity where acos of a clamped cosine
  // loses half the digits of the perpendicular component.
  d.theta = std::atan2(d.y_perp.norm() * std::sqrt(nx2), dot(x, y));
  return d;
}

} // namespace riesz
