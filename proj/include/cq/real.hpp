#pragma once

// Thin RAII wrapper over MPFR with explicit mantissa-bit control. Binary
// operations round to the wider operand's precision; constants are built
// at an explicitly requested precision and cached per bit count.

#include <algorithm>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include <mpfr.h>

#include "cq/numbers.hpp"

namespace cq {

class Real {
 public:
  explicit Real(mpfr_prec_t prec = 64) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(v_, MPFR_PREC_MIN); mpfr_swap(v_, o.v_); }
  Real& operator=(const Real& o) {
    if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
  }
  Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
  ~Real() { mpfr_clear(v_); }

  static Real of(long v, mpfr_prec_t prec) { Real r(prec); mpfr_set_si(r.v_, v, MPFR_RNDN); return r; }
  static Real of(double v, mpfr_prec_t prec) { Real r(prec); mpfr_set_d(r.v_, v, MPFR_RNDN); return r; }
  static Real of(const Rat& q, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_q(r.v_, q.backend().data(), MPFR_RNDN);
    return r;
  }
  static Real of(const Quad& q, mpfr_prec_t prec) {
    Real r = of(q.a, prec);
    if (q.b != 0) r = r + of(q.b, prec) * sqrt3(prec);
    return r;
  }
  /// 2^e, exact.
  static Real pow2(long e, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
    return r;
  }

  static Real pi(mpfr_prec_t prec);
  static Real log2c(mpfr_prec_t prec);   // log(2)
  static Real sqrt3(mpfr_prec_t prec);   // sqrt(3)
  static Real li2_half(mpfr_prec_t prec);  // pi^2/12 - log(2)^2/2

  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  friend Real operator+(const Real& x, const Real& y) { Real r(wider(x, y)); mpfr_add(r.v_, x.v_, y.v_, MPFR_RNDN); return r; }
  friend Real operator-(const Real& x, const Real& y) { Real r(wider(x, y)); mpfr_sub(r.v_, x.v_, y.v_, MPFR_RNDN); return r; }
  friend Real operator*(const Real& x, const Real& y) { Real r(wider(x, y)); mpfr_mul(r.v_, x.v_, y.v_, MPFR_RNDN); return r; }
  friend Real operator/(const Real& x, const Real& y) { Real r(wider(x, y)); mpfr_div(r.v_, x.v_, y.v_, MPFR_RNDN); return r; }
  friend Real operator-(const Real& x) { Real r(x.prec()); mpfr_neg(r.v_, x.v_, MPFR_RNDN); return r; }
  Real& operator+=(const Real& y) { mpfr_add(v_, v_, y.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& y) { mpfr_sub(v_, v_, y.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& y) { mpfr_mul(v_, v_, y.v_, MPFR_RNDN); return *this; }

  friend Real operator*(long x, const Real& y) { Real r(y.prec()); mpfr_mul_si(r.v_, y.v_, x, MPFR_RNDN); return r; }
  friend Real operator*(const Real& x, long y) { return y * x; }
  friend Real operator/(const Real& x, long y) { Real r(x.prec()); mpfr_div_si(r.v_, x.v_, y, MPFR_RNDN); return r; }
  friend Real operator/(long x, const Real& y) { Real r(y.prec()); mpfr_si_div(r.v_, x, y.v_, MPFR_RNDN); return r; }
  friend Real operator+(const Real& x, long y) { Real r(x.prec()); mpfr_add_si(r.v_, x.v_, y, MPFR_RNDN); return r; }
  friend Real operator-(const Real& x, long y) { Real r(x.prec()); mpfr_sub_si(r.v_, x.v_, y, MPFR_RNDN); return r; }

  /// Multiplies by 2^e, exact.
  Real scaled_pow2(long e) const { Real r(prec()); mpfr_mul_2si(r.v_, v_, e, MPFR_RNDN); return r; }

  friend Real abs(const Real& x) { Real r(x.prec()); mpfr_abs(r.v_, x.v_, MPFR_RNDN); return r; }
  friend Real sqrt(const Real& x) { Real r(x.prec()); mpfr_sqrt(r.v_, x.v_, MPFR_RNDN); return r; }
  friend Real log(const Real& x) { Real r(x.prec()); mpfr_log(r.v_, x.v_, MPFR_RNDN); return r; }
  friend Real cos(const Real& x) { Real r(x.prec()); mpfr_cos(r.v_, x.v_, MPFR_RNDN); return r; }
  friend Real sin(const Real& x) { Real r(x.prec()); mpfr_sin(r.v_, x.v_, MPFR_RNDN); return r; }

  int cmp(const Real& y) const { return mpfr_cmp(v_, y.v_); }
  friend bool operator<(const Real& x, const Real& y) { return x.cmp(y) < 0; }
  friend bool operator<=(const Real& x, const Real& y) { return x.cmp(y) <= 0; }
  friend bool operator>(const Real& x, const Real& y) { return x.cmp(y) > 0; }
  friend bool operator>=(const Real& x, const Real& y) { return x.cmp(y) >= 0; }
  friend bool operator==(const Real& x, const Real& y) { return x.cmp(y) == 0; }
  friend bool operator!=(const Real& x, const Real& y) { return x.cmp(y) != 0; }

  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_); }

  /// One unit in the last place of this value at its own precision
  /// (2^(exp - prec)); zero input yields 2^(-prec).
  Real ulp() const {
    long e = is_zero() ? 0 : mpfr_get_exp(v_);
    return pow2(e - prec(), prec());
  }

  Real rounded_to(mpfr_prec_t prec) const {
    Real r(prec);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  std::string str(int significant_digits) const {
    if (significant_digits < 2) significant_digits = 2;
    int n = mpfr_snprintf(nullptr, 0, "%.*Rg", significant_digits, v_);
    std::string out(static_cast<size_t>(n), '\0');
    mpfr_snprintf(out.data(), out.size() + 1, "%.*Rg", significant_digits, v_);
    return out;
  }

 private:
  static mpfr_prec_t wider(const Real& x, const Real& y) { return std::max(x.prec(), y.prec()); }
  mpfr_t v_;
};

namespace detail {
inline Real cached_const(int which, mpfr_prec_t prec) {
  static std::mutex mu;
  static std::map<std::pair<int, mpfr_prec_t>, Real> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find({which, prec});
  if (it != cache.end()) return it->second;
  Real r(prec);
  switch (which) {
    case 0: mpfr_const_pi(r.raw(), MPFR_RNDN); break;
    case 1: mpfr_const_log2(r.raw(), MPFR_RNDN); break;
    case 2: mpfr_sqrt_ui(r.raw(), 3, MPFR_RNDN); break;
    case 3: {
      // Li2(1/2) = pi^2/12 - log(2)^2/2, evaluated with guard bits.
      // (direct mpfr calls: the cache mutex is held here)
      mpfr_prec_t wp = prec + 16;
      Real p(wp), l(wp);
      mpfr_const_pi(p.raw(), MPFR_RNDN);
      mpfr_const_log2(l.raw(), MPFR_RNDN);
      r = ((p * p) / 12 - (l * l).scaled_pow2(-1)).rounded_to(prec);
      break;
    }
    default: throw std::logic_error("unknown constant");
  }
  cache.emplace(std::make_pair(which, prec), r);
  return r;
}
}  // namespace detail

inline Real Real::pi(mpfr_prec_t prec) { return detail::cached_const(0, prec); }
inline Real Real::log2c(mpfr_prec_t prec) { return detail::cached_const(1, prec); }
inline Real Real::sqrt3(mpfr_prec_t prec) { return detail::cached_const(2, prec); }
inline Real Real::li2_half(mpfr_prec_t prec) { return detail::cached_const(3, prec); }

using RVec2 = Vec2<Real>;

}  // namespace cq
