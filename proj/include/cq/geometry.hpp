#pragma once

// Constraint geometry: upper-half-plane circular arcs centered on the
// x-axis, and chains of line segments. Arc angles are kept as exact
// rational multiples of pi so that the closed-form instances stay on the
// exact arithmetic path (cos/sin are algebraic at the angles we admit).

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cq/numbers.hpp"
#include "cq/real.hpp"

namespace cq {

struct OutOfRange : std::domain_error {
  explicit OutOfRange(const std::string& what) : std::domain_error(what) {}
};
struct NotOnSubarc : std::domain_error {
  explicit NotOnSubarc(const std::string& what) : std::domain_error(what) {}
};

/// cos(q*pi) in Q[sqrt(3)] for the angles this library admits exactly.
inline std::optional<Quad> cos_of_pi_multiple(const Rat& q) {
  if (q == 0) return Quad(1);
  if (q == Rat(1, 6)) return Quad(0, Rat(1, 2));
  if (q == Rat(1, 3)) return Quad(Rat(1, 2));
  if (q == Rat(1, 2)) return Quad(0);
  if (q == Rat(2, 3)) return Quad(Rat(-1, 2));
  if (q == Rat(5, 6)) return Quad(0, Rat(-1, 2));
  if (q == 1) return Quad(-1);
  return std::nullopt;
}

inline std::optional<Quad> sin_of_pi_multiple(const Rat& q) {
  if (q == 0 || q == 1) return Quad(0);
  if (q == Rat(1, 6) || q == Rat(5, 6)) return Quad(Rat(1, 2));
  if (q == Rat(1, 3) || q == Rat(2, 3)) return Quad(0, Rat(1, 2));
  if (q == Rat(1, 2)) return Quad(1);
  return std::nullopt;
}

/// Upper arc of the circle centered at (cx, 0) with radius r, spanning
/// theta in [lo, hi]*pi with 0 <= lo < hi <= 1.
struct ArcConstraint {
  Rat cx;
  Rat radius;
  Rat theta_lo;  // multiple of pi
  Rat theta_hi;  // multiple of pi

  ArcConstraint(Rat center_x, Rat r, Rat lo = 0, Rat hi = 1)
      : cx(std::move(center_x)), radius(std::move(r)), theta_lo(std::move(lo)), theta_hi(std::move(hi)) {
    if (!(radius > 0)) throw std::invalid_argument("arc radius must be positive");
    if (!(theta_lo < theta_hi) || theta_lo < 0 || theta_hi > 1)
      throw std::invalid_argument("arc range must satisfy 0 <= lo < hi <= 1 (multiples of pi)");
  }

  bool ends_exact() const {
    return cos_of_pi_multiple(theta_lo).has_value() && cos_of_pi_multiple(theta_hi).has_value();
  }

  std::optional<QVec2> point_at_exact(const Rat& q) const {
    auto c = cos_of_pi_multiple(q);
    auto s = sin_of_pi_multiple(q);
    if (!c || !s) return std::nullopt;
    return QVec2{Quad(cx) + Quad(radius) * *c, Quad(radius) * *s};
  }

  RVec2 point_at(const Rat& q, mpfr_prec_t prec) const {
    if (q < theta_lo || q > theta_hi) throw OutOfRange("arc parameter outside range");
    Real th = Real::of(q, prec) * Real::pi(prec);
    return {Real::of(cx, prec) + Real::of(radius, prec) * cos(th), Real::of(radius, prec) * sin(th)};
  }

  /// Semicircle over [-3,3] (x^2 + y^2 = 9, y >= 0).
  static ArcConstraint semicircle3() { return {0, 3}; }
  /// Semicircle over [0,1] ((x-1/2)^2 + y^2 = 1/4, y >= 0).
  static ArcConstraint unit_semicircle() { return {Rat(1, 2), Rat(1, 2)}; }
};

struct Segment {
  QVec2 a;
  QVec2 b;
  QVec2 at(const Quad& t) const { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }
};

struct SegmentChain {
  std::vector<Segment> pieces;

  explicit SegmentChain(std::vector<Segment> ps) : pieces(std::move(ps)) {
    if (pieces.empty()) throw std::invalid_argument("chain must have at least one piece");
    for (auto& p : pieces)
      if (p.a == p.b) throw std::invalid_argument("degenerate chain piece");
  }

  QVec2 point_at(size_t piece, const Quad& t) const {
    if (piece >= pieces.size()) throw OutOfRange("bad piece id");
    if (t < Quad(0) || t > Quad(1)) throw OutOfRange("segment parameter outside [0,1]");
    return pieces[piece].at(t);
  }

  /// Sides of the equilateral triangle on base [-3,3] with apex (0, 3*sqrt(3)),
  /// ordered left side then right side.
  static SegmentChain triangle3() {
    QVec2 a{Quad(-3), Quad(0)}, c{Quad(0), Quad(Rat(0), Rat(3))}, b{Quad(3), Quad(0)};
    return SegmentChain({Segment{a, c}, Segment{c, b}});
  }

  /// Sides of the equilateral triangle on base [0,1] with apex (1/2, sqrt(3)/2).
  static SegmentChain unit_triangle() {
    QVec2 a{Quad(0), Quad(0)}, c{Quad(Rat(1, 2)), Quad(Rat(0), Rat(1, 2))}, b{Quad(1), Quad(0)};
    return SegmentChain({Segment{a, c}, Segment{c, b}});
  }
};

using Constraint = std::variant<ArcConstraint, SegmentChain>;

/// A point on a constraint: piece id plus parameter (t on segments, the
/// pi-multiple q on arcs when exact).
struct CandidatePoint {
  int piece = 0;
  Quad param;
  QVec2 pos;
};

// ---------------------------------------------------------------------------
// perpendicular-foot bijections for the unit triangle
//
// The right side {(x, sqrt3(1-x)) : 3/4 <= x <= 1} and the left side
// {(x, sqrt3 x) : 0 <= x <= 1/4} are parameterized by the foot of the
// perpendicular dropped to the base [0,1].

inline QVec2 lift_right(const Quad& x) {
  Quad a = (Quad(3) + x) / Quad(4);
  return {a, Quad(0, Rat(1, 4)) * (Quad(1) - x)};  // (sqrt3/4)(1-x)
}

inline QVec2 lift_left(const Quad& x) {
  Quad a = x / Quad(4);
  return {a, Quad(0, Rat(1, 4)) * x};  // (sqrt3/4) x
}

inline RVec2 lift_right(const Real& x) {
  mpfr_prec_t p = x.prec();
  Real a = (Real::of(3L, p) + x) / 4;
  return {a, Real::sqrt3(p) * (Real::of(1L, p) - x) / 4};
}

inline RVec2 lift_left(const Real& x) {
  mpfr_prec_t p = x.prec();
  return {x / 4, Real::sqrt3(p) * x / 4};
}

inline Quad foot_right(const QVec2& p) {
  Quad x = Quad(4) * p.x - Quad(3);
  if (x < Quad(0) || x > Quad(1) || !(lift_right(x) == p))
    throw NotOnSubarc("point is not on the admissible right sub-segment");
  return x;
}

inline Quad foot_left(const QVec2& p) {
  Quad x = Quad(4) * p.x;
  if (x < Quad(0) || x > Quad(1) || !(lift_left(x) == p))
    throw NotOnSubarc("point is not on the admissible left sub-segment");
  return x;
}

inline Real foot_right(const RVec2& p) {
  mpfr_prec_t prec = p.x.prec();
  Real x = 4 * p.x - Real::of(3L, prec);
  Real tol = Real::pow2(16 - prec, prec);
  RVec2 back = lift_right(x);
  if (x < -tol || x > Real::of(1L, prec) + tol || abs(back.y - p.y) > tol)
    throw NotOnSubarc("point is not on the admissible right sub-segment");
  return x;
}

inline Real foot_left(const RVec2& p) {
  mpfr_prec_t prec = p.x.prec();
  Real x = 4 * p.x;
  Real tol = Real::pow2(16 - prec, prec);
  RVec2 back = lift_left(x);
  if (x < -tol || x > Real::of(1L, prec) + tol || abs(back.y - p.y) > tol)
    throw NotOnSubarc("point is not on the admissible left sub-segment");
  return x;
}

}  // namespace cq
