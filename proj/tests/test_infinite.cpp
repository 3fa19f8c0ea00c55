#include <doctest.h>

#include <map>

#include "cq/infinite.hpp"

using namespace cq;

namespace {

Real closed_v1c(mpfr_prec_t p) {
  // pi^2/12 + 3/4 - (3/4) log^2 2 - (3/2) log 2
  Real l = Real::log2c(p);
  return Real::pi(p) * Real::pi(p) / 12 + Real::of(Rat(3, 4), p) - 3 * l * l / 4 - 3 * l / 2;
}

Real closed_v2c(mpfr_prec_t p) {
  // pi^2/12 + (-5 - 8 log^2 2 + 4 log 2)/8
  Real l = Real::log2c(p);
  return Real::pi(p) * Real::pi(p) / 12 + (4 * l - 8 * l * l - 5L) / 8;
}

Real closed_v3c(mpfr_prec_t p) {
  // (8 pi^2 - 87 - 144 log^2 2 + 120 log 2)/96
  Real l = Real::log2c(p);
  return (8 * Real::pi(p) * Real::pi(p) - Real::of(87L, p) - 144 * l * l + 120 * l) / 96;
}

// independent exhaustive partition cost: full recursion over contiguous
// partitions with boundaries up to `cap`, memoized, own series sums
struct ExhaustiveDp {
  mpfr_prec_t prec;
  unsigned cap;
  std::map<std::pair<unsigned, int>, std::pair<Real, std::vector<InfBlockRange>>> memo;

  Real er_finite(unsigned a, unsigned b) {
    Real w(prec), m1(prec), m2(prec);
    for (unsigned n = a; n <= b; ++n) {
      Real inv = Real::of(1L, prec) / static_cast<long>(n);
      w += Real::pow2(-static_cast<long>(n), prec);
      m1 += inv.scaled_pow2(-static_cast<long>(n));
      m2 += (inv * inv).scaled_pow2(-static_cast<long>(n));
    }
    Real av = m1 / w;
    return m2 - av * av * w;
  }

  std::pair<Real, std::vector<InfBlockRange>> best(unsigned from, int blocks_left) {
    auto key = std::make_pair(from, blocks_left);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::pair<Real, std::vector<InfBlockRange>> out;
    if (blocks_left == 1) {
      out.first = er(from, std::nullopt, prec);
      out.second = {{from, std::nullopt}};
    } else {
      bool have = false;
      for (unsigned hi = from; hi <= cap; ++hi) {
        auto rest = best(hi + 1, blocks_left - 1);
        Real cand = er_finite(from, hi) + rest.first;
        if (!have || cand < out.first) {
          have = true;
          out.first = cand;
          out.second = {{from, hi}};
          for (auto& b : rest.second) out.second.push_back(b);
        }
      }
    }
    memo.emplace(key, out);
    return out;
  }
};

}  // namespace

TEST_CASE("unconstrained plans match the known structure") {
  auto p1 = plan_unconstrained(1);
  CHECK(p1.blocks == reference_blocks(1));
  Real l = Real::log2c(256);
  Real er1 = (Real::pi(256) * Real::pi(256) - 18 * l * l) / 12;
  CHECK(abs(p1.v_unconstrained - er1) <= 16 * er1.ulp());

  auto p3 = plan_unconstrained(3);
  CHECK(p3.blocks == std::vector<InfBlockRange>{{1, 1}, {2, 2}, {3, std::nullopt}});
  // the means of those blocks: 1, 1/2, (8 log 2 - 5)/2
  auto s3 = block_stats(3, std::nullopt, 256);
  Real want = (8 * Real::log2c(256) - 5L) / 2;
  CHECK(abs(s3.av - want) <= 16 * want.ulp());

  for (int n = 1; n <= 5; ++n) CHECK(plan_unconstrained(n).blocks == reference_blocks(n));
  for (int n = 6; n <= 24; ++n) CHECK(plan_unconstrained(n).blocks == reference_blocks(n));
}

TEST_CASE("windowed DP equals an exhaustive search over a wide boundary range") {
  ExhaustiveDp ex{320, 40, {}};
  auto brute = ex.best(1, 10);
  auto plan = plan_unconstrained(10, {256, 32});
  CHECK(plan.blocks == brute.second);
  CHECK(plan.blocks == reference_blocks(10));
  CHECK(abs(plan.v_unconstrained - brute.first) <= Real::pow2(-240, 320));
}

TEST_CASE("constrained values on the unit triangle") {
  auto r1 = solve_reciprocal_triangle(1);
  CHECK(abs(r1.error - closed_v1c(256)) <= Real::pow2(-240, 256));
  REQUIRE(r1.multiplicity == 1);
  // the single point is ((3+log2)/4, (sqrt3/4)(1-log2))
  Real l = Real::log2c(256);
  CHECK(abs(r1.optima[0].points[0].x - (l + 3L) / 4) <= Real::pow2(-240, 256));
  CHECK(abs(r1.optima[0].points[0].y - Real::sqrt3(256) * (Real::of(1L, 256) - l) / 4) <=
        Real::pow2(-240, 256));
  CHECK(r1.routes_agree);

  auto r2 = solve_reciprocal_triangle(2);
  CHECK(abs(r2.error - closed_v2c(256)) <= Real::pow2(-240, 256));
  REQUIRE(r2.multiplicity == 1);
  CHECK(abs(r2.optima[0].points[1].x - Real::of(1L, 256)) <= Real::pow2(-240, 256));
  CHECK(abs(r2.optima[0].points[0].x - (2 * l - 1L) / 4) <= Real::pow2(-240, 256));

  auto r3 = solve_reciprocal_triangle(3);
  CHECK(abs(r3.error - closed_v3c(256)) <= Real::pow2(-240, 256));
  CHECK(r3.multiplicity == 2);
  bool saw_left = false, saw_right = false;
  for (auto& o : r3.optima)
    for (auto& p : o.points) {
      if (p.x_exact && *p.x_exact == Quad(Rat(7, 8))) saw_right = true;
      if (p.x_exact && *p.x_exact == Quad(Rat(1, 8))) saw_left = true;
    }
  CHECK(saw_left);
  CHECK(saw_right);
}

TEST_CASE("route agreement, reduction identity and side-count bounds") {
  std::optional<Real> prev;
  for (int n = 1; n <= 20; ++n) {
    auto r = solve_reciprocal_triangle(n);
    CHECK(r.routes_agree);
    CHECK(r.exists);
    CHECK_FALSE(r.conjectural);
    if (prev) CHECK(r.error < *prev);  // strictly decreasing in n
    prev = r.error;

    // every co-optimal set respects the side-count bounds
    for (const auto& o : r.optima) {
      int right_pts = 0, left_pts = 0;
      for (const auto& p : o.points) (p.piece == 1 ? right_pts : left_pts)++;
      if (n >= 2) CHECK(left_pts >= 1);
      CHECK(right_pts >= 1);
      CHECK(right_pts <= 2);
    }

    // V_c - V_u equals the (3/4)-penalty of the reported sides
    mpfr_prec_t wp = 256 + 64;
    Real pen(wp);
    Real one = Real::of(1L, wp);
    const auto& best = r.optima.front();
    REQUIRE(best.blocks.size() == static_cast<size_t>(n));

    for (size_t i = 0; i < best.blocks.size(); ++i) {
      auto s = block_stats(best.blocks[i].lo, best.blocks[i].hi, wp);
      // recover the side of this block from the reported points
      RVec2 right = lift_right(s.av), left = lift_left(s.av);
      bool is_right = false, found = false;
      Real tol = Real::pow2(-200, wp);
      for (const auto& p : best.points) {
        if (abs(p.x.rounded_to(wp) - right.x) < tol) {
          is_right = true;
          found = true;
          break;
        }
        if (abs(p.x.rounded_to(wp) - left.x) < tol) {
          found = true;
          break;
        }
      }
      REQUIRE(found);
      Real d = is_right ? (one - s.av) : s.av;
      pen += d * d * s.weight;
    }
    Real lhs = r.error - *r.v_unconstrained;
    Real rhs = (pen * 3 / 4).rounded_to(256);
    CHECK(abs(lhs - rhs) <= 8 * rhs.ulp());
  }
}

TEST_CASE("n = 7 lifted set follows the block formula") {
  auto r = solve_reciprocal_triangle(7);
  // the {2} block sits at conditional mean exactly 1/2, so it may go to
  // either side: two co-optimal sets
  REQUIRE(r.optima.size() == 2);
  mpfr_prec_t wp = 320;
  std::vector<Real> want_x{block_stats(8, std::nullopt, wp).av / 4,
                           Real::of(block_stats_exact(6, 7).av, wp) / 4,
                           Real::of(Rat(1, 5), wp) / 4,
                           Real::of(Rat(1, 4), wp) / 4,
                           Real::of(Rat(1, 3), wp) / 4,
                           Real::of(Rat(1, 2), wp) / 4,
                           Real::of(1L, wp)};
  Real tol = Real::pow2(-240, wp);
  bool formula_variant = false;
  for (const auto& o : r.optima) {
    REQUIRE(o.points.size() == 7);
    bool all = true;
    for (size_t i = 0; i < 7; ++i)
      all = all && abs(o.points[i].x.rounded_to(wp) - want_x[i]) < tol;
    formula_variant = formula_variant || all;
  }
  CHECK(formula_variant);
}

TEST_CASE("lifting a partition reproduces the constrained value") {
  auto plan = plan_unconstrained(2);
  auto lifted = lift_partition(plan, {Side::right, Side::left});
  CHECK(abs(lifted.v_constrained - closed_v2c(256)) <= Real::pow2(-240, 256));
  // the wrong orientation costs strictly more
  auto flipped = lift_partition(plan, {Side::left, Side::right});
  CHECK(lifted.v_constrained < flipped.v_constrained);
  CHECK_THROWS_AS(lift_partition(plan, {Side::right}), std::invalid_argument);
}

TEST_CASE("precision guard on deep tails") {
  CHECK_THROWS_AS(solve_reciprocal_triangle(300, {256, 32}), PrecisionInsufficient);
  CHECK_NOTHROW(plan_unconstrained(300, {640, 32}));
}

TEST_CASE("semicircle over [0,1]") {
  auto arc = ArcConstraint::unit_semicircle();
  auto r1 = solve_reciprocal_arc(arc, 1);
  mpfr_prec_t p = 256;
  Real l = Real::log2c(p);
  Real v1 = Real::pi(p) * Real::pi(p) / 12 + 1L - l * l / 2 - 2 * l;
  CHECK(abs(r1.error - v1) <= Real::pow2(-240, p));
  REQUIRE(r1.multiplicity == 1);
  CHECK(*r1.optima[0].points[0].x_exact == Quad(1));

  auto r2 = solve_reciprocal_arc(arc, 2);
  Real v2 = (Real::pi(p) * Real::pi(p) - Real::of(6L, p) - 6 * l * l) / 12;
  CHECK(abs(r2.error - v2) <= Real::pow2(-240, p));
  CHECK(r2.multiplicity == 1);
  CHECK(*r2.optima[0].points[0].x_exact == Quad(0));
  CHECK(*r2.optima[0].points[1].x_exact == Quad(1));

  for (int n : {3, 5}) {
    try {
      solve_reciprocal_arc(arc, n);
      FAIL("expected NoOptimalSet at n=", n);
    } catch (const NoOptimalSet& e) {
      CHECK(e.max_supported_n == 2);
    }
  }
}

TEST_CASE("four-point probe set evaluates to the quoted value") {
  mpfr_prec_t wp = 320;
  Real a4 = block_stats(4, std::nullopt, wp).av;
  std::vector<RVec2> pts{lift_right(Real::of(1L, wp)), lift_left(Real::of(Rat(1, 2), wp)),
                         lift_left(Real::of(Rat(1, 3), wp)), lift_left(a4)};
  Real v = distortion(ReciprocalMeasure{wp}, std::span<const RVec2>(pts));
  // prints as 0.0617409 to seven decimals
  Real probe = Real::of(Rat(617409, 10000000), wp);
  CHECK(abs(v - probe) < Real::of(Rat(1, 20000000), wp));
}

TEST_CASE("constraint dispatch for the reciprocal measure") {
  ReciprocalMeasure m;
  CHECK_NOTHROW(solve_reciprocal(m, Constraint{SegmentChain::unit_triangle()}, 2));
  CHECK_THROWS_AS(solve_reciprocal(m, Constraint{SegmentChain::triangle3()}, 2),
                  std::invalid_argument);
}
