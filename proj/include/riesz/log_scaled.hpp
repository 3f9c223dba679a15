#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <ostream>

#include "riesz/error.hpp"

namespace riesz {

/// A real number stored as sign and natural log of its magnitude.
///
/// Kernel values in this library carry factors like exp(-|x|^2 + |y|^2) that
/// leave the double range for |y| beyond ~27, so every kernel-valued quantity
/// travels as a LogScaled and is converted to a plain double only at output
/// boundaries. The log-magnitude is held in long double so that conversion
/// from and back to double is accurate to within one ulp across the whole
/// double range.
class LogScaled {
public:
  constexpr LogScaled() = default;

  static constexpr LogScaled zero() { return {}; }
  static constexpr LogScaled one() { return from_log(1, 0.0L); }

  /// Build from sign and log-magnitude. A zero sign or a -inf log-magnitude
  /// both produce the canonical zero.
  static constexpr LogScaled from_log(int sign, long double logmag) {
    LogScaled v;
    if (sign == 0 || logmag == -std::numeric_limits<long double>::infinity()) return v;
    v.sign_ = sign > 0 ? 1 : -1;
    v.logmag_ = logmag;
    return v;
  }

  static LogScaled from(double x) {
    if (x == 0.0) return {};
    return from_log(x > 0 ? 1 : -1, std::log(std::fabs(static_cast<long double>(x))));
  }

  int sign() const { return sign_; }
  long double logmag() const { return logmag_; }
  bool is_zero() const { return sign_ == 0; }

  double to_double() const {
    if (sign_ == 0) return 0.0;
    return static_cast<double>(sign_ * std::exp(logmag_));
  }

  LogScaled abs() const { return from_log(sign_ != 0 ? 1 : 0, logmag_); }
  LogScaled operator-() const { return from_log(-sign_, logmag_); }

  friend LogScaled operator*(const LogScaled& a, const LogScaled& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return {};
    return from_log(a.sign_ * b.sign_, a.logmag_ + b.logmag_);
  }
  friend LogScaled operator/(const LogScaled& a, const LogScaled& b) {
    if (b.sign_ == 0) throw DomainError("LogScaled: division by zero");
    if (a.sign_ == 0) return {};
    return from_log(a.sign_ * b.sign_, a.logmag_ - b.logmag_);
  }
  friend LogScaled operator+(const LogScaled& a, const LogScaled& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    const LogScaled& hi = a.logmag_ >= b.logmag_ ? a : b;
    const LogScaled& lo = a.logmag_ >= b.logmag_ ? b : a;
    const long double ratio = std::exp(lo.logmag_ - hi.logmag_);
    const long double s = hi.sign_ == lo.sign_ ? 1.0L + ratio : 1.0L - ratio;
    if (s == 0.0L) return {};
    return from_log(hi.sign_, hi.logmag_ + std::log(s));
  }
  friend LogScaled operator-(const LogScaled& a, const LogScaled& b) { return a + (-b); }

  LogScaled& operator*=(const LogScaled& o) { return *this = *this * o; }
  LogScaled& operator+=(const LogScaled& o) { return *this = *this + o; }

  /// Scale by exp(delta).
  LogScaled shifted(long double delta) const { return from_log(sign_, logmag_ + delta); }

  friend bool operator==(const LogScaled&, const LogScaled&) = default;

  /// Magnitude comparison (ignores sign).
  bool magnitude_less(const LogScaled& o) const {
    if (sign_ == 0) return o.sign_ != 0;
    if (o.sign_ == 0) return false;
    return logmag_ < o.logmag_;
  }

  friend std::ostream& operator<<(std::ostream& os, const LogScaled& v) {
    return os << (v.sign_ < 0 ? "-" : v.sign_ > 0 ? "+" : "0") << "exp(" << static_cast<double>(v.logmag_) << ")";
  }

private:
  int sign_ = 0;
  long double logmag_ = -std::numeric_limits<long double>::infinity();
};

/// Streaming signed sum in log domain. Terms are accumulated relative to the
/// largest magnitude seen so far; the running sum is rescaled whenever a
/// larger term arrives.
class LogAccumulator {
public:
  void add(const LogScaled& v) {
    if (v.is_zero()) return;
    if (empty_) {
      shift_ = v.logmag();
      sum_ = v.sign();
      empty_ = false;
      return;
    }
    if (v.logmag() > shift_) {
      sum_ *= std::exp(shift_ - v.logmag());
      shift_ = v.logmag();
    }
    sum_ += v.sign() * std::exp(v.logmag() - shift_);
  }
  void add_scaled(const LogScaled& v, double w) { add(v * LogScaled::from(w)); }

  LogScaled value() const {
    if (empty_ || sum_ == 0.0L) return LogScaled::zero();
    return LogScaled::from_log(sum_ > 0 ? 1 : -1, shift_ + std::log(std::fabs(sum_)));
  }

private:
  bool empty_ = true;
  long double shift_ = 0.0L;
  long double sum_ = 0.0L;
};

/// Exact signed sum computed with a max-shift. Empty input gives zero.
inline LogScaled log_sum(std::span<const LogScaled> values) {
  long double shift = -std::numeric_limits<long double>::infinity();
  for (const auto& v : values)
    if (!v.is_zero() && v.logmag() > shift) shift = v.logmag();
  if (shift == -std::numeric_limits<long double>::infinity()) return LogScaled::zero();
  long double sum = 0.0L, comp = 0.0L;
  for (const auto& v : values) {
    if (v.is_zero()) continue;
    // Kahan summation keeps the shifted sum accurate for long inputs.
    const long double term = v.sign() * std::exp(v.logmag() - shift) - comp;
    const long double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  if (sum == 0.0L) return LogScaled::zero();
  return LogScaled::from_log(sum > 0 ? 1 : -1, shift + std::log(std::fabs(sum)));
}

} // namespace riesz
