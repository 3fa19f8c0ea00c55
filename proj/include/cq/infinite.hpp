#pragma once

// Solvers for the reciprocal measure (mass 2^-k at 1/k).
//
// Unconstrained n-means reduce to a contiguous-partition DP over the
// atoms in descending order with per-block cost Er[a,b]; block
// boundaries are searched inside a window above their minimal position
// (weights decay as 2^-n) and the window is validated by doubling.
// The unit-triangle constraint is solved two ways: a penalized DP whose
// block cost adds (3/4)*W*min((1-Av)^2, Av^2), and the two-stage route
// (unconstrained DP, then lift through the perpendicular-foot maps).
// Both values are reported; disagreement is flagged, never hidden.

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cq/geometry.hpp"
#include "cq/measure.hpp"
#include "cq/partition.hpp"
#include "cq/solver.hpp"

namespace cq {

enum class Side { left = 0, right = 1 };  // left leg carries small abscissae

struct InfinitePlan {
  int n = 0;
  std::vector<InfBlockRange> blocks;
  std::vector<Side> sides;  // per block (constrained plans)
  Real v_unconstrained{64};
  Real v_constrained{64};
};

/// Reference optimal block structure for 1 <= n <= 2000.
inline std::vector<InfBlockRange> reference_blocks(int n) {
  std::vector<InfBlockRange> b;
  unsigned un = static_cast<unsigned>(n);
  if (n <= 5) {
    for (unsigned j = 1; j + 1 <= un; ++j) b.push_back({j, j});
    b.push_back({un, std::nullopt});
  } else {
    for (unsigned j = 1; j + 2 <= un; ++j) b.push_back({j, j});
    b.push_back({un - 1, un});
    b.push_back({un + 1, std::nullopt});
  }
  return b;
}

namespace detail {

struct DpOutcome {
  std::vector<InfBlockRange> blocks;
  Real cost;
  std::vector<std::vector<InfBlockRange>> co_optimal;  // tied partitions (final layer)
};

/// Windowed contiguous-partition DP with pluggable per-block costs.
inline DpOutcome partition_dp(int n, mpfr_prec_t work, int window,
                              const std::function<Real(const series::Moments&)>& fin_cost,
                              const std::function<Real(unsigned)>& tail_cost,
                              const Real& tie_tol) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const long W = window;

  if (n == 1) return {{{1, std::nullopt}}, tail_cost(1), {}};

  const int F = n - 1;  // finite blocks
  // dp[j][d]: blocks 1..j cover atoms 1..(j+d)
  std::vector<std::vector<std::optional<Real>>> dp(
      static_cast<size_t>(F + 1), std::vector<std::optional<Real>>(static_cast<size_t>(W + 1)));
  std::vector<std::vector<int>> parent(static_cast<size_t>(F + 1),
                                       std::vector<int>(static_cast<size_t>(W + 1), -1));

  for (int j = 1; j <= F; ++j) {
    for (long d = 0; d <= W; ++d) {
      series::Moments m{Real(work), Real(work), Real(work)};
      std::optional<Real> best;
      int arg = -1;
      for (long dprev = d; dprev >= 0; --dprev) {
        long a = j + dprev;  // newly absorbed atom; block = [j+dprev, j+d]
        Real inv = Real::of(1L, work) / a;
        m.w += Real::pow2(-a, work);
        m.m1 += inv.scaled_pow2(-a);
        m.m2 += (inv * inv).scaled_pow2(-a);
        std::optional<Real> prev;
        if (j == 1) {
          if (dprev == 0) prev = Real(work);
        } else {
          prev = dp[static_cast<size_t>(j - 1)][static_cast<size_t>(dprev)];
        }
        if (!prev) continue;
        Real cand = *prev + fin_cost(m);
        if (!best || cand < *best || (cand == *best && static_cast<int>(dprev) < arg)) {
          best = cand;
          arg = static_cast<int>(dprev);
        }
      }
      dp[static_cast<size_t>(j)][static_cast<size_t>(d)] = best;
      parent[static_cast<size_t>(j)][static_cast<size_t>(d)] = arg;
    }
  }

  std::optional<Real> best;
  int argd = -1;
  std::vector<int> tied;
  for (long d = 0; d <= W; ++d) {
    if (!dp[static_cast<size_t>(F)][static_cast<size_t>(d)]) continue;
    Real cand = *dp[static_cast<size_t>(F)][static_cast<size_t>(d)] +
                tail_cost(static_cast<unsigned>(n + d));
    if (!best || cand < *best - tie_tol) {
      best = cand;
      argd = static_cast<int>(d);
      tied.clear();
    } else if (abs(cand - *best) < tie_tol) {
      if (cand < *best) {
        best = cand;
        tied.push_back(argd);
        argd = static_cast<int>(d);
      } else {
        tied.push_back(static_cast<int>(d));
      }
    }
  }
  if (!best) throw std::logic_error("internal: empty DP");

  auto backtrack = [&](int d_last) {
    std::vector<InfBlockRange> blocks(static_cast<size_t>(n));
    blocks[static_cast<size_t>(n - 1)] = {static_cast<unsigned>(n + d_last), std::nullopt};
    int d = d_last;
    for (int j = F; j >= 1; --j) {
      int dprev = parent[static_cast<size_t>(j)][static_cast<size_t>(d)];
      blocks[static_cast<size_t>(j - 1)] = {static_cast<unsigned>(j + dprev),
                                            static_cast<unsigned>(j + d)};
      d = dprev;
    }
    return blocks;
  };

  DpOutcome out;
  out.cost = *best;
  out.blocks = backtrack(argd);
  for (int d : tied) {
    auto alt = backtrack(d);
    if (!(alt == out.blocks)) out.co_optimal.push_back(std::move(alt));
  }
  return out;
}

inline Real er_of_moments(const series::Moments& m, mpfr_prec_t work) {
  Real av = m.m1 / m.w;
  Real e = m.m2 - av * av * m.w;
  if (e.sign() < 0) {
    if (abs(e) <= 64 * m.m2.ulp()) return Real(work);
    throw PrecisionInsufficient("finite-block conditional error lost all significant bits");
  }
  return e;
}

inline Real side_penalty_of(const series::Moments& m, mpfr_prec_t work) {
  Real av = m.m1 / m.w;
  Real one = Real::of(1L, work);
  Real pr = (one - av) * (one - av), pl = av * av;
  return (pr < pl ? pr : pl) * m.w * 3 / 4;
}

inline DpOutcome reciprocal_dp(int n, mpfr_prec_t work, int window, bool penalized,
                               const Real& tie_tol) {
  auto fin = [&, work, penalized](const series::Moments& m) {
    Real e = er_of_moments(m, work);
    return penalized ? e + side_penalty_of(m, work) : e;
  };
  auto tail = [&, work, penalized](unsigned k) {
    auto m = series::block_moments(k, std::nullopt, work);
    Real e = er_of_moments(m, work);
    return penalized ? e + side_penalty_of(m, work) : e;
  };
  return partition_dp(n, work, window, fin, tail, tie_tol);
}

}  // namespace detail

/// Unconstrained optimal n-means partition (windowed DP, validated by
/// window doubling).
inline InfinitePlan plan_unconstrained(int n, const SolveOptions& opts = {}) {
  mpfr_prec_t work = opts.precision + 64;
  Real tol = Real::pow2(16 - static_cast<long>(opts.precision), work);
  auto a = detail::reciprocal_dp(n, work, opts.window, false, tol);
  auto b = detail::reciprocal_dp(n, work, opts.window * 2, false, tol);
  if (!(a.blocks == b.blocks))
    throw std::runtime_error(
        "window-doubling check failed for the unconstrained DP; widen --window");
  InfinitePlan p;
  p.n = n;
  p.blocks = std::move(a.blocks);
  p.v_unconstrained = a.cost.rounded_to(opts.precision);
  return p;
}

namespace detail {

struct SideExpansion {
  std::vector<std::vector<Side>> variants;
  std::vector<Real> penalties;  // (3/4)-scaled, matching variants
};

/// Cheaper side per block; blocks with exact Av = 1/2 branch both ways.
inline SideExpansion expand_sides(const std::vector<InfBlockRange>& blocks, mpfr_prec_t work) {
  std::vector<std::vector<Side>> variants{{}};
  for (auto& b : blocks) {
    std::optional<bool> choose_right;  // nullopt = exact tie
    if (b.hi) {
      Rat av = block_stats_exact(b.lo, *b.hi).av;
      if (av == Rat(1, 2))
        choose_right = std::nullopt;
      else
        choose_right = av > Rat(1, 2);
    } else {
      Real av = block_stats(b.lo, std::nullopt, work).av;
      choose_right = av > Real::of(Rat(1, 2), work);
    }
    std::vector<std::vector<Side>> next;
    for (auto& v : variants) {
      if (!choose_right) {
        auto r = v, l = v;
        r.push_back(Side::right);
        l.push_back(Side::left);
        next.push_back(std::move(r));
        next.push_back(std::move(l));
      } else {
        auto w = v;
        w.push_back(*choose_right ? Side::right : Side::left);
        next.push_back(std::move(w));
      }
    }
    variants = std::move(next);
    if (variants.size() > 64) throw std::logic_error("internal: side-tie explosion");
  }
  SideExpansion out;
  out.variants = std::move(variants);
  for (auto& v : out.variants) {
    Real pen(work);
    Real one = Real::of(1L, work);
    for (size_t i = 0; i < blocks.size(); ++i) {
      auto s = block_stats(blocks[i].lo, blocks[i].hi, work);
      Real d = (v[i] == Side::right) ? (one - s.av) : s.av;
      pen += d * d * s.weight;
    }
    out.penalties.push_back(pen * 3 / 4);
  }
  return out;
}

inline OptPoint lifted_point(const InfBlockRange& b, Side side, mpfr_prec_t work,
                             mpfr_prec_t display) {
  OptPoint p;
  p.piece = (side == Side::left) ? 0 : 1;
  if (b.hi) {
    Rat av = block_stats_exact(b.lo, *b.hi).av;
    QVec2 q = (side == Side::right) ? lift_right(Quad(av)) : lift_left(Quad(av));
    p.param_exact = Quad(av);
    p.x_exact = q.x;
    p.y_exact = q.y;
    p.x = Real::of(q.x, display);
    p.y = Real::of(q.y, display);
  } else {
    Real av = block_stats(b.lo, std::nullopt, work).av;
    RVec2 q = (side == Side::right) ? lift_right(av) : lift_left(av);
    p.x = q.x.rounded_to(display);
    p.y = q.y.rounded_to(display);
  }
  return p;
}

inline void dedup_optima(std::vector<Optimum>& optima) {
  std::sort(optima.begin(), optima.end(), [](const Optimum& a, const Optimum& b) {
    if (a.points.size() != b.points.size()) return a.points.size() < b.points.size();
    for (size_t i = 0; i < a.points.size(); ++i) {
      if (a.points[i].x != b.points[i].x) return a.points[i].x < b.points[i].x;
      if (a.points[i].y != b.points[i].y) return a.points[i].y < b.points[i].y;
    }
    return false;
  });
  optima.erase(std::unique(optima.begin(), optima.end(),
                           [](const Optimum& a, const Optimum& b) {
                             if (a.points.size() != b.points.size()) return false;
                             for (size_t i = 0; i < a.points.size(); ++i)
                               if (a.points[i].x != b.points[i].x || a.points[i].y != b.points[i].y)
                                 return false;
                             return true;
                           }),
               optima.end());
}

}  // namespace detail

/// Lift of a contiguous partition through the foot maps; the constrained
/// value is the unconstrained one plus the (3/4)-penalty of the sides.
inline InfinitePlan lift_partition(const InfinitePlan& unconstrained,
                                   const std::vector<Side>& sides, const SolveOptions& opts = {}) {
  if (sides.size() != unconstrained.blocks.size())
    throw std::invalid_argument("one side per block required");
  mpfr_prec_t work = opts.precision + 64;
  Real pen(work);
  Real one = Real::of(1L, work);
  for (size_t i = 0; i < sides.size(); ++i) {
    auto s = block_stats(unconstrained.blocks[i].lo, unconstrained.blocks[i].hi, work);
    Real d = (sides[i] == Side::right) ? (one - s.av) : s.av;
    pen += d * d * s.weight;
  }
  InfinitePlan out = unconstrained;
  out.sides = sides;
  out.v_constrained =
      (unconstrained.v_unconstrained.rounded_to(work) + pen * 3 / 4).rounded_to(opts.precision);
  return out;
}

inline bool is_unit_triangle(const SegmentChain& chain) {
  if (chain.pieces.size() != 2) return false;
  QVec2 a{Quad(0), Quad(0)}, c{Quad(Rat(1, 2)), Quad(Rat(0), Rat(1, 2))}, b{Quad(1), Quad(0)};
  auto piece_is = [](const Segment& s, const QVec2& p, const QVec2& q) {
    return (s.a == p && s.b == q) || (s.a == q && s.b == p);
  };
  return (piece_is(chain.pieces[0], a, c) && piece_is(chain.pieces[1], c, b)) ||
         (piece_is(chain.pieces[0], c, b) && piece_is(chain.pieces[1], a, c));
}

/// Constrained solve on the unit triangle: penalized DP and two-stage
/// route, cross-checked.
inline QuantizerResult solve_reciprocal_triangle(int n, const SolveOptions& opts = {}) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  mpfr_prec_t work = opts.precision + 64;
  Real tol = Real::pow2(16 - static_cast<long>(opts.precision), work);

  auto pen_a = detail::reciprocal_dp(n, work, opts.window, true, tol);
  auto pen_b = detail::reciprocal_dp(n, work, opts.window * 2, true, tol);
  if (!(pen_a.blocks == pen_b.blocks))
    throw std::runtime_error("window-doubling check failed for the penalized DP; widen --window");

  InfinitePlan uncon = plan_unconstrained(n, opts);
  auto exp_two = detail::expand_sides(uncon.blocks, work);
  size_t best_side = 0;
  for (size_t i = 1; i < exp_two.penalties.size(); ++i)
    if (exp_two.penalties[i] < exp_two.penalties[best_side]) best_side = i;
  Real v_two = uncon.v_unconstrained.rounded_to(work) + exp_two.penalties[best_side];

  Real v_pen = pen_a.cost;
  bool agree = abs(v_pen - v_two) < tol;

  QuantizerResult out;
  out.n = n;
  out.v_unconstrained = uncon.v_unconstrained;
  out.v_penalized = v_pen.rounded_to(opts.precision);
  out.v_two_stage = v_two.rounded_to(opts.precision);
  out.routes_agree = agree;
  out.conjectural = n > 2000;

  std::vector<std::vector<InfBlockRange>> partitions{pen_a.blocks};
  for (auto& alt : pen_a.co_optimal) partitions.push_back(alt);
  if (!(uncon.blocks == pen_a.blocks)) partitions.push_back(uncon.blocks);

  Real best_v = v_pen < v_two ? v_pen : v_two;
  out.error = best_v.rounded_to(opts.precision);

  for (auto& blocks : partitions) {
    auto exp = detail::expand_sides(blocks, work);
    Real er_sum(work);
    for (auto& b : blocks) er_sum += block_stats(b.lo, b.hi, work).er;
    for (size_t vi = 0; vi < exp.variants.size(); ++vi) {
      Real v = er_sum + exp.penalties[vi];
      if (!(abs(v - best_v) < tol)) continue;
      Optimum o;
      o.blocks = blocks;
      for (size_t i = 0; i < blocks.size(); ++i)
        o.points.push_back(
            detail::lifted_point(blocks[i], exp.variants[vi][i], work, opts.precision));
      std::sort(o.points.begin(), o.points.end(),
                [](const OptPoint& a, const OptPoint& b) { return a.x < b.x; });
      out.optima.push_back(std::move(o));
    }
  }
  detail::dedup_optima(out.optima);
  out.multiplicity = out.optima.size();
  out.exists = true;

  if (!out.optima.empty()) {
    std::vector<RVec2> pts;
    for (auto& p : out.optima.front().points)
      pts.push_back({p.x.rounded_to(work), p.y.rounded_to(work)});
    ReciprocalMeasure rm{work};
    Real recomputed = distortion(rm, std::span<const RVec2>(pts)).rounded_to(opts.precision);
    Real vt = best_v.rounded_to(opts.precision);
    if (!(abs(recomputed - vt) <= 8 * vt.ulp()))
      throw std::logic_error(
          "internal: reciprocal Voronoi recomputation disagrees with solver value");
  }
  return out;
}

/// Constrained solve on an axis-centered upper arc for the reciprocal
/// measure (tail-exact distortion; nonexistence detected through
/// positive-mass cells).
inline QuantizerResult solve_reciprocal_arc(const ArcConstraint& arc, int n,
                                            const SolveOptions& opts = {}) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  mpfr_prec_t work = opts.precision + 64;
  Real tol = Real::pow2(16 - static_cast<long>(opts.precision), work);

  auto fin = [&](const series::Moments& m) {
    CellMoments<Real> cm{m.w, m.m1, m.m2};
    return min_on_arc(cm, arc, work).value;
  };
  auto tail = [&](unsigned k) {
    auto m = series::block_moments(k, std::nullopt, work);
    CellMoments<Real> cm{m.w, m.m1, m.m2};
    return min_on_arc(cm, arc, work).value;
  };
  auto dp = detail::partition_dp(n, work, opts.window, fin, tail, tol);

  std::vector<std::vector<InfBlockRange>> partitions{dp.blocks};
  for (auto& alt : dp.co_optimal) partitions.push_back(alt);

  QuantizerResult out;
  out.n = n;
  out.error = dp.cost.rounded_to(opts.precision);

  for (auto& blocks : partitions) {
    Optimum o;
    o.blocks = blocks;
    std::vector<RVec2> pts;
    for (auto& b : blocks) {
      auto m = series::block_moments(b.lo, b.hi, work);
      CellMoments<Real> cm{m.w, m.m1, m.m2};
      auto cell = min_on_arc(cm, arc, work);
      OptPoint p;
      p.piece = 0;
      p.param_exact = Quad(cell.theta);
      p.degenerate_direction = cell.degenerate_direction;
      if (auto q = arc.point_at_exact(cell.theta)) {
        p.x_exact = q->x;
        p.y_exact = q->y;
      }
      p.x = cell.point.x.rounded_to(opts.precision);
      p.y = cell.point.y.rounded_to(opts.precision);
      pts.push_back(cell.point);
      o.points.push_back(std::move(p));
    }
    auto pos = positive_mass_cells(ReciprocalMeasure{work}, std::span<const RVec2>(pts));
    bool all = true;
    for (bool b : pos) all = all && b;
    if (!all) continue;
    std::sort(o.points.begin(), o.points.end(),
              [](const OptPoint& a, const OptPoint& b) { return a.x < b.x; });
    out.optima.push_back(std::move(o));
  }

  if (out.optima.empty()) {
    int maxn = 0;
    for (int k = n - 1; k >= 1; --k) {
      try {
        auto r = solve_reciprocal_arc(arc, k, opts);
        if (r.exists) {
          maxn = k;
          break;
        }
      } catch (const NoOptimalSet&) {
      }
    }
    throw NoOptimalSet(maxn);
  }

  detail::dedup_optima(out.optima);
  out.multiplicity = out.optima.size();
  out.exists = true;
  return out;
}

inline QuantizerResult solve_reciprocal(const ReciprocalMeasure& m, const Constraint& c, int n,
                                        SolveOptions opts = {}) {
  opts.precision = std::max<mpfr_prec_t>(opts.precision, m.precision);
  if (auto* arc = std::get_if<ArcConstraint>(&c)) return solve_reciprocal_arc(*arc, n, opts);
  const auto& chain = std::get<SegmentChain>(c);
  if (!is_unit_triangle(chain))
    throw std::invalid_argument(
        "reciprocal-measure solves support axis-centered arcs and the unit triangle");
  return solve_reciprocal_triangle(n, opts);
}

}  // namespace cq
