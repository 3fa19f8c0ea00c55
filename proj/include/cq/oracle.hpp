#pragma once

// Brute-force verification path: dense grid search over constraint
// parameters with bracket-shrinking coordinate descent. Deliberately
// blind to canonical vectors, cell closed forms and series identities;
// it only evaluates distortion of explicit point sets. The final
// incumbent is re-scored in exact/high-precision arithmetic so the
// reported value can never dip below the true minimum.

#include <cmath>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "cq/geometry.hpp"
#include "cq/measure.hpp"
#include "cq/solver.hpp"

namespace cq {

struct OracleConfig {
  int resolution = 96;   // samples per parameter sweep
  int rounds = 4;        // bracket-shrink rounds (x8 per round)
  int restarts = 8;      // random initial placements
  std::uint64_t seed = 1;
  unsigned truncation = 64;  // reciprocal measure: atoms evaluated explicitly

  void validate() const {
    if (resolution < 64) throw std::invalid_argument("oracle resolution must be >= 64");
    if (rounds < 2) throw std::invalid_argument("oracle needs at least 2 refinement rounds");
  }
};

struct OracleReport {
  double value_double = 0;  // truncated double-precision incumbent score
  Real value{64};           // rigorous re-score (plus tail bound if truncated)
  std::vector<double> params;  // global curve parameters, sorted
  std::vector<Vec2<double>> points;
};

namespace detail {

struct OracleEval {
  std::vector<double> atom_x, atom_w;
  double tail_weight = 0;  // reciprocal truncation remainder mass
  double x_lo = 0, x_hi = 0;  // abscissa range of the truncated tail

  double distortion(const std::vector<Vec2<double>>& pts) const {
    double tot = 0;
    for (size_t i = 0; i < atom_x.size(); ++i) {
      double best = 1e300;
      for (auto& p : pts) {
        double dx = atom_x[i] - p.x;
        double d = dx * dx + p.y * p.y;
        if (d < best) best = d;
      }
      tot += atom_w[i] * best;
    }
    return tot;
  }
};

struct CurveParam {
  const Constraint* c;
  int pieces;
  double span;  // parameter range: pieces for chains, 1 for arcs

  Vec2<double> at(double u) const {
    if (auto* arc = std::get_if<ArcConstraint>(c)) {
      double lo = arc->theta_lo.convert_to<double>() * M_PI;
      double hi = arc->theta_hi.convert_to<double>() * M_PI;
      double th = lo + u * (hi - lo);
      double cx = arc->cx.convert_to<double>(), r = arc->radius.convert_to<double>();
      return {cx + r * std::cos(th), r * std::sin(th)};
    }
    const auto& chain = std::get<SegmentChain>(*c);
    int piece = std::min(static_cast<int>(u), pieces - 1);
    double t = u - piece;
    const auto& s = chain.pieces[static_cast<size_t>(piece)];
    double ax = s.a.x.to_double(), ay = s.a.y.to_double();
    double bx = s.b.x.to_double(), by = s.b.y.to_double();
    return {ax + t * (bx - ax), ay + t * (by - ay)};
  }
};

}  // namespace detail

inline OracleReport grid_search(const std::variant<FiniteDiscreteMeasure, ReciprocalMeasure>& m,
                                const Constraint& c, int n, const OracleConfig& cfg = {}) {
  cfg.validate();
  if (n < 1) throw std::invalid_argument("n must be >= 1");

  detail::OracleEval ev;
  if (auto* fm = std::get_if<FiniteDiscreteMeasure>(&m)) {
    for (size_t i = 0; i < fm->size(); ++i) {
      ev.atom_x.push_back(fm->support()[i].convert_to<double>());
      ev.atom_w.push_back(fm->weights()[i].convert_to<double>());
    }
  } else {
    for (unsigned k = 1; k <= cfg.truncation; ++k) {
      ev.atom_x.push_back(1.0 / k);
      ev.atom_w.push_back(std::ldexp(1.0, -static_cast<int>(k)));
    }
    ev.tail_weight = std::ldexp(1.0, -static_cast<int>(cfg.truncation));
    ev.x_lo = 0;
    ev.x_hi = 1.0 / (cfg.truncation + 1);
  }

  detail::CurveParam curve{&c, 1, 1};
  if (auto* chain = std::get_if<SegmentChain>(&c)) {
    curve.pieces = static_cast<int>(chain->pieces.size());
    curve.span = curve.pieces;
  }

  auto eval_params = [&](const std::vector<double>& u) {
    std::vector<Vec2<double>> pts;
    pts.reserve(u.size());
    for (double v : u) pts.push_back(curve.at(v));
    return ev.distortion(pts);
  };

  // seed pool: coarse full grid over sorted tuples, plus random restarts
  std::vector<double> bestU;
  double bestV = 1e300;
  {
    int res = cfg.resolution;
    std::vector<int> idx(static_cast<size_t>(n), 0);
    std::vector<double> u(static_cast<size_t>(n));
    // combinations with repetition: idx nondecreasing
    bool done = false;
    long budget = 4000000;
    while (!done && budget-- > 0) {
      for (int i = 0; i < n; ++i)
        u[static_cast<size_t>(i)] = curve.span * idx[static_cast<size_t>(i)] / (res - 1);
      double v = eval_params(u);
      if (v < bestV) {
        bestV = v;
        bestU = u;
      }
      int i = n - 1;
      while (i >= 0 && idx[static_cast<size_t>(i)] == res - 1) --i;
      if (i < 0) {
        done = true;
      } else {
        int nv = idx[static_cast<size_t>(i)] + 1;
        for (int j = i; j < n; ++j) idx[static_cast<size_t>(j)] = nv;
      }
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(0.0, curve.span);
    for (int r = 0; r < cfg.restarts; ++r) {
      for (int i = 0; i < n; ++i) u[static_cast<size_t>(i)] = dist(rng);
      std::sort(u.begin(), u.end());
      double v = eval_params(u);
      if (v < bestV) {
        bestV = v;
        bestU = u;
      }
    }
  }

  // bracket-shrinking coordinate descent
  double bracket = curve.span;
  for (int round = 0; round < cfg.rounds; ++round) {
    bracket /= 8;
    for (int sweep = 0; sweep < 3; ++sweep) {
      bool improved = false;
      for (int i = 0; i < n; ++i) {
        double center = bestU[static_cast<size_t>(i)];
        double lo = std::max(0.0, center - bracket / 2);
        double hi = std::min(curve.span, center + bracket / 2);
        std::vector<double> u = bestU;
        for (int s = 0; s < cfg.resolution; ++s) {
          u[static_cast<size_t>(i)] = lo + (hi - lo) * s / (cfg.resolution - 1);
          double v = eval_params(u);
          if (v < bestV) {
            bestV = v;
            bestU = u;
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
  }
  std::sort(bestU.begin(), bestU.end());

  OracleReport rep;
  rep.value_double = bestV;
  rep.params = bestU;
  for (double v : bestU) rep.points.push_back(curve.at(v));

  // rigorous re-score of the incumbent
  const mpfr_prec_t prec = 256;
  std::vector<RVec2> rpts;
  if (auto* chain = std::get_if<SegmentChain>(&c)) {
    for (double v : bestU) {
      int piece = std::min(static_cast<int>(v), curve.pieces - 1);
      Rat t(v - piece);  // doubles are dyadic; conversion is exact
      if (t < 0) t = 0;
      if (t > 1) t = 1;
      QVec2 q = chain->point_at(static_cast<size_t>(piece), Quad(t));
      rpts.push_back({Real::of(q.x, prec), Real::of(q.y, prec)});
    }
  } else {
    const auto& arc = std::get<ArcConstraint>(c);
    Real lo = Real::of(arc.theta_lo, prec) * Real::pi(prec);
    Real hi = Real::of(arc.theta_hi, prec) * Real::pi(prec);
    for (double v : bestU) {
      Real th = lo + Real::of(v, prec) * (hi - lo);
      rpts.push_back({Real::of(arc.cx, prec) + Real::of(arc.radius, prec) * cos(th),
                      Real::of(arc.radius, prec) * sin(th)});
    }
  }
  if (auto* fm = std::get_if<FiniteDiscreteMeasure>(&m)) {
    rep.value = distortion(*fm, std::span<const RVec2>(rpts), prec);
  } else {
    // truncated sum plus a certified tail bound
    Real total(prec);
    for (unsigned k = 1; k <= cfg.truncation; ++k) {
      Real atom = Real::of(1L, prec) / static_cast<long>(k);
      Real best = squared_distance(atom, rpts[0]);
      for (size_t i = 1; i < rpts.size(); ++i) {
        Real d = squared_distance(atom, rpts[i]);
        if (d < best) best = d;
      }
      total += best.scaled_pow2(-static_cast<long>(k));
    }
    // bound: tail mass times min over points of max rho at the tail ends
    Real bound(prec);
    bool first = true;
    for (auto& p : rpts) {
      Real d0 = squared_distance(Real::of(0L, prec), p);
      Real d1 = squared_distance(Real::of(1L, prec) / static_cast<long>(cfg.truncation + 1), p);
      Real worst = d0 > d1 ? d0 : d1;
      if (first || worst < bound) bound = worst;
      first = false;
    }
    total += bound.scaled_pow2(-static_cast<long>(cfg.truncation));
    rep.value = total;
  }
  return rep;
}

}  // namespace cq
