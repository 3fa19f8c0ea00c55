#pragma once

// Closed-form minimization of one Voronoi cell's distortion over a single
// constraint piece. Every cell cost reduces to the block moments
// (W, M1, M2) = (sum w, sum w*s, sum w*s^2):
//
//   sum_i w_i * rho(s_i, p) = M2 - 2*px*M1 + (px^2 + py^2)*W
//
// which is quadratic in the segment parameter and C + D*cos(theta) on an
// axis-centered arc.

#include <span>
#include <type_traits>
#include <utility>

#include "cq/geometry.hpp"
#include "cq/measure.hpp"
#include "cq/numbers.hpp"
#include "cq/real.hpp"

namespace cq {

template <class T>
struct CellMoments {
  T w{}, m1{}, m2{};
};

/// Weighted atoms of one cell (exact path).
struct CellProblem {
  std::vector<std::pair<Rat, Rat>> atoms;  // (abscissa, weight)

  CellMoments<Quad> moments() const {
    CellMoments<Quad> m;
    for (auto& [s, w] : atoms) {
      m.w += Quad(w);
      m.m1 += Quad(w * s);
      m.m2 += Quad(w * s * s);
    }
    return m;
  }
};

template <class T>
struct SegmentMin {
  T t;           // parameter in [0,1]
  Vec2<T> point;
  T value;
  bool clamped = false;
};

template <class T>
T scalar_like(long v, const T& like) {
  if constexpr (std::is_same_v<T, Real>)
    return Real::of(v, like.prec());
  else
    return T(Rat(v));
}

template <class T>
SegmentMin<T> min_on_segment(const CellMoments<T>& cell, const Vec2<T>& p0, const Vec2<T>& p1) {
  T dx = p1.x - p0.x, dy = p1.y - p0.y;
  T denom = cell.w * (dx * dx + dy * dy);
  T t = (cell.m1 * dx - cell.w * (p0.x * dx + p0.y * dy)) / denom;
  SegmentMin<T> out;
  out.clamped = false;
  T zero = scalar_like(0, t), one = scalar_like(1, t);
  if (t < zero) {
    t = zero;
    out.clamped = true;
  } else if (t > one) {
    t = one;
    out.clamped = true;
  }
  out.t = t;
  out.point = {p0.x + t * dx, p0.y + t * dy};
  T px = out.point.x, py = out.point.y;
  out.value = cell.m2 - scalar_like(2, t) * px * cell.m1 + (px * px + py * py) * cell.w;
  return out;
}

inline SegmentMin<Quad> min_on_segment(const CellProblem& cell, const Segment& seg) {
  return min_on_segment<Quad>(cell.moments(), seg.a, seg.b);
}

template <class T>
struct ArcMin {
  Rat theta;        // pi-multiple of the reported minimizer
  Vec2<T> point;
  T value;
  bool degenerate_direction = false;  // objective independent of theta
};

/// Exact arc minimization; requires exact cos/sin at both range ends.
inline ArcMin<Quad> min_on_arc(const CellMoments<Quad>& cell, const ArcConstraint& arc) {
  Quad cx(arc.cx), r(arc.radius);
  Quad c0 = cell.m2 - Quad(2) * cx * cell.m1 + (cx * cx + r * r) * cell.w;
  Quad d = Quad(-2) * r * (cell.m1 - cx * cell.w);
  auto clo = cos_of_pi_multiple(arc.theta_lo), chi = cos_of_pi_multiple(arc.theta_hi);
  if (!clo || !chi) throw std::invalid_argument("arc ends lack exact cos; use the Real path");
  ArcMin<Quad> out;
  int s = d.sign();
  if (s == 0) {
    out.theta = arc.theta_lo;
    out.degenerate_direction = true;
  } else if (s > 0) {
    // want the smaller cos
    out.theta = (*clo < *chi) ? arc.theta_lo : arc.theta_hi;
  } else {
    out.theta = (*clo < *chi) ? arc.theta_hi : arc.theta_lo;
  }
  out.point = *arc.point_at_exact(out.theta);
  out.value = c0 + d * *cos_of_pi_multiple(out.theta);
  return out;
}

inline ArcMin<Quad> min_on_arc(const CellProblem& cell, const ArcConstraint& arc) {
  return min_on_arc(cell.moments(), arc);
}

/// Arc minimization at working precision (any rational pi-multiples).
inline ArcMin<Real> min_on_arc(const CellMoments<Real>& cell, const ArcConstraint& arc,
                               mpfr_prec_t prec) {
  Real cx = Real::of(arc.cx, prec), r = Real::of(arc.radius, prec);
  Real c0 = cell.m2 - (cx * cell.m1).scaled_pow2(1) + (cx * cx + r * r) * cell.w;
  Real d = (-2L) * r * (cell.m1 - cx * cell.w);
  Real cos_lo = cos(Real::of(arc.theta_lo, prec) * Real::pi(prec));
  Real cos_hi = cos(Real::of(arc.theta_hi, prec) * Real::pi(prec));
  ArcMin<Real> out;
  int s = d.sign();
  if (s == 0) {
    out.theta = arc.theta_lo;
    out.degenerate_direction = true;
  } else if (s > 0) {
    out.theta = (cos_lo < cos_hi) ? arc.theta_lo : arc.theta_hi;
  } else {
    out.theta = (cos_lo < cos_hi) ? arc.theta_hi : arc.theta_lo;
  }
  out.point = arc.point_at(out.theta, prec);
  Real c = cos(Real::of(out.theta, prec) * Real::pi(prec));
  out.value = c0 + d * c;
  return out;
}

}  // namespace cq
