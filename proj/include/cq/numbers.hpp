#pragma once

// Exact scalar types used throughout the library: arbitrary-precision
// rationals and the quadratic field Q[sqrt(3)] that the triangle
// constraints live in.

#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace cq {

using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

inline std::string to_string(const Rat& r) {
  return r.str();
}

/// Parses "p/q", integers, and plain decimal strings ("-2.75", "5.196").
inline Rat parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.find('/') != std::string::npos) return Rat(s);
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rat(s);
  bool neg = false;
  std::string digits = s;
  if (digits[0] == '+' || digits[0] == '-') {
    neg = digits[0] == '-';
    digits.erase(0, 1);
    dot = digits.find('.');
  }
  std::string ip = digits.substr(0, dot);
  std::string fp = digits.substr(dot + 1);
  if (ip.empty()) ip = "0";
  for (char c : ip + fp)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("bad rational literal: " + s);
  Int num(ip.empty() ? "0" : ip);
  Int den = 1;
  for (char c : fp) {
    num = num * 10 + (c - '0');
    den *= 10;
  }
  Rat r(num, den);
  return neg ? -r : r;
}

/// Element of Q[sqrt(3)]: value a + b*sqrt(3). Exact field arithmetic;
/// closed under +,-,*,/ since sqrt(3) is irrational.
struct Quad {
  Rat a{0};
  Rat b{0};

  Quad() = default;
  Quad(Rat rational) : a(std::move(rational)) {}  // NOLINT: implicit by design
  Quad(Rat ra, Rat rb) : a(std::move(ra)), b(std::move(rb)) {}
  Quad(int v) : a(v) {}  // NOLINT

  bool is_rational() const { return b == 0; }

  friend Quad operator+(const Quad& x, const Quad& y) { return {x.a + y.a, x.b + y.b}; }
  friend Quad operator-(const Quad& x, const Quad& y) { return {x.a - y.a, x.b - y.b}; }
  friend Quad operator-(const Quad& x) { return {-x.a, -x.b}; }
  friend Quad operator*(const Quad& x, const Quad& y) {
    return {x.a * y.a + 3 * x.b * y.b, x.a * y.b + x.b * y.a};
  }
  friend Quad operator/(const Quad& x, const Quad& y) {
    Rat norm = y.a * y.a - 3 * y.b * y.b;
    if (norm == 0) throw std::domain_error("division by zero in Q[sqrt(3)]");
    // 1/(a+b*sqrt3) = (a-b*sqrt3)/(a^2-3b^2)
    Quad conj{y.a / norm, -y.b / norm};
    return x * conj;
  }
  Quad& operator+=(const Quad& y) { return *this = *this + y; }
  Quad& operator-=(const Quad& y) { return *this = *this - y; }
  Quad& operator*=(const Quad& y) { return *this = *this * y; }

  /// Exact sign of a + b*sqrt(3).
  int sign() const {
    int sa = a == 0 ? 0 : (a > 0 ? 1 : -1);
    int sb = b == 0 ? 0 : (b > 0 ? 1 : -1);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // opposite signs: compare |a| vs |b|sqrt3 via squares
    Rat a2 = a * a, b23 = 3 * b * b;
    if (a2 == b23) return 0;  // impossible for b != 0, kept for completeness
    return (a2 > b23) ? sa : sb;
  }

  friend bool operator==(const Quad& x, const Quad& y) { return x.a == y.a && x.b == y.b; }
  friend bool operator!=(const Quad& x, const Quad& y) { return !(x == y); }
  friend bool operator<(const Quad& x, const Quad& y) { return (x - y).sign() < 0; }
  friend bool operator<=(const Quad& x, const Quad& y) { return (x - y).sign() <= 0; }
  friend bool operator>(const Quad& x, const Quad& y) { return (x - y).sign() > 0; }
  friend bool operator>=(const Quad& x, const Quad& y) { return (x - y).sign() >= 0; }

  double to_double() const {
    return a.convert_to<double>() + b.convert_to<double>() * 1.7320508075688772935;
  }

  std::string str() const {
    if (b == 0) return a.str();
    std::string out;
    if (a != 0) out = a.str() + (b > 0 ? "+" : "");
    out += b.str() + "*sqrt(3)";
    return out;
  }
};

inline Quad clamp(const Quad& v, const Quad& lo, const Quad& hi) {
  if (v < lo) return lo;
  if (v > hi) return hi;
  return v;
}

template <class T>
struct Vec2 {
  T x{};
  T y{};
};

using QVec2 = Vec2<Quad>;

inline bool operator==(const QVec2& p, const QVec2& q) { return p.x == q.x && p.y == q.y; }

}  // namespace cq
