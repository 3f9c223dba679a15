#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <locale>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "riesz/apply.hpp"
#include "riesz/error.hpp"
#include "riesz/geometry.hpp"
#include "riesz/log_scaled.hpp"

namespace riesz {

/// Shortest round-trip decimal form; independent of the C++ locale.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

/// Decimal form of a LogScaled that also works outside the double range:
/// mantissa and a base-10 exponent computed from the log-magnitude.
inline std::string format_log_scaled(const LogScaled& v) {
  if (v.is_zero()) return "0";
  const long double l = v.logmag();
  if (std::fabs(l) < 700.0L) return format_double(v.to_double());
  const long double l10 = l / std::numbers::ln10_v<long double>;
  long double e = std::floor(l10);
  double m = static_cast<double>(std::pow(10.0L, l10 - e));
  if (m >= 10.0) {
    m /= 10.0;
    e += 1;
  }
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(16);
  os << (v.sign() < 0 ? "-" : "") << std::fixed << m << 'e' << static_cast<long long>(e);
  return os.str();
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  if (b < e && *b == '+') ++b;
  auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e) throw DomainError("not a number: '" + s + "'");
  return v;
}

/// Split on any of the separator characters, dropping empty fields.
inline std::vector<std::string> split_fields(const std::string& line, const std::string& seps = ", \t") {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  for (const auto& f : split_fields(s)) v.push_back(parse_double(f));
  return v;
}

inline Point parse_point(const std::string& s, int n) {
  const auto v = parse_list(s);
  if (static_cast<int>(v.size()) != n)
    throw DomainError("expected " + std::to_string(n) + " coordinates, got '" + s + "'");
  return Point(std::span<const double>(v));
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_escape(fields[i]);
  os << '\n';
}

// ---------------------------------------------------------------------------
// key=value configuration

/// Flat key=value text: '#' starts a comment, blank lines are ignored, keys
/// and values are trimmed. Later lines override earlier ones.
class KeyValueConfig {
public:
  static KeyValueConfig parse(std::istream& is) {
    KeyValueConfig c;
    std::string line;
    int no = 0;
    while (std::getline(is, line)) {
      ++no;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      const auto t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw DomainError("config line " + std::to_string(no) + ": expected key=value");
      const auto k = trim(t.substr(0, eq));
      if (k.empty()) throw DomainError("config line " + std::to_string(no) + ": empty key");
      c.set(k, trim(t.substr(eq + 1)));
    }
    return c;
  }

  void set(const std::string& k, const std::string& v) {
    auto it = std::find_if(kv_.begin(), kv_.end(), [&](const auto& p) { return p.first == k; });
    if (it == kv_.end())
      kv_.emplace_back(k, v);
    else
      it->second = v;
  }
  bool has(const std::string& k) const {
    return std::any_of(kv_.begin(), kv_.end(), [&](const auto& p) { return p.first == k; });
  }
  std::string get(const std::string& k) const {
    for (const auto& [kk, v] : kv_)
      if (kk == k) return v;
    throw DomainError("config: missing key '" + k + "'");
  }
  /// Entries in first-appearance order.
  const std::vector<std::pair<std::string, std::string>>& entries() const { return kv_; }

  void write(std::ostream& os, const std::string& prefix = "") const {
    for (const auto& [k, v] : kv_) os << prefix << k << '=' << v << '\n';
  }

private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }
  std::vector<std::pair<std::string, std::string>> kv_;
};

// ---------------------------------------------------------------------------
// GridFunction text form: header x1,...,xn,value then one row per point

inline void write_grid_function(std::ostream& os, const GridFunction& f) {
  require(f.points.size() == f.values.size(), "write_grid_function: values not sampled");
  std::vector<std::string> h;
  for (int i = 0; i < f.n; ++i) h.push_back("x" + std::to_string(i + 1));
  h.push_back("value");
  write_csv_row(os, h);
  for (std::size_t j = 0; j < f.points.size(); ++j) {
    std::vector<std::string> row;
    for (int i = 0; i < f.n; ++i) row.push_back(format_double(f.points[j][i]));
    row.push_back(format_double(f.values[j]));
    write_csv_row(os, row);
  }
}

/// Reads the form written above. Lines starting with '#' are skipped; the
/// dimension is the column count minus one.
inline GridFunction read_grid_function(std::istream& is) {
  GridFunction f;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line, ",");
    if (!header) {
      header = true;
      if (fields.size() < 2 || fields.back() != "value") throw DomainError("grid function: bad header '" + line + "'");
      f.n = static_cast<int>(fields.size()) - 1;
      continue;
    }
    if (static_cast<int>(fields.size()) != f.n + 1) throw DomainError("grid function: bad row '" + line + "'");
    Point p(f.n);
    for (int i = 0; i < f.n; ++i) p[i] = parse_double(fields[i]);
    const double v = parse_double(fields.back());
    if (!std::isfinite(v)) throw DomainError("grid function: non-finite value");
    f.points.push_back(p);
    f.values.push_back(v);
  }
  if (!header) throw DomainError("grid function: empty input");
  f.support = Support::gaussian(f.n);
  return f;
}

} // namespace riesz
