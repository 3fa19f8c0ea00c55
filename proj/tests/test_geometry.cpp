#include <doctest.h>

#include <random>

#include "cq/geometry.hpp"

using namespace cq;

TEST_CASE("arc points at exact angles") {
  auto arc = ArcConstraint::semicircle3();
  auto p = arc.point_at_exact(Rat(1));
  REQUIRE(p.has_value());
  CHECK(p->x == Quad(-3));
  CHECK(p->y == Quad(0));
  auto q = arc.point_at_exact(Rat(1, 2));
  CHECK(q->x == Quad(0));
  CHECK(q->y == Quad(3));
  CHECK_FALSE(arc.point_at_exact(Rat(1, 5)).has_value());

  CHECK_THROWS_AS(ArcConstraint(0, -1), std::invalid_argument);
  CHECK_THROWS_AS(ArcConstraint(0, 3, Rat(1, 2), Rat(1, 3)), std::invalid_argument);
  CHECK_THROWS_AS(arc.point_at(Rat(3, 2), 128), OutOfRange);

  // numeric evaluation stays on the circle
  RVec2 r = arc.point_at(Rat(1, 3), 256);
  Real rad = r.x * r.x + r.y * r.y;
  CHECK(abs(rad - Real::of(9L, 256)) <= 16 * rad.ulp());
}

TEST_CASE("chain points") {
  auto tri = SegmentChain::triangle3();
  // left side at abscissa -9/4: height 3*sqrt(3)/4
  QVec2 p = tri.point_at(0, Quad(Rat(1, 4)));
  CHECK(p.x == Quad(Rat(-9, 4)));
  CHECK(p.y == Quad(Rat(0), Rat(3, 4)));

  auto unit = SegmentChain::unit_triangle();
  QVec2 q = unit.point_at(0, Quad(Rat(1, 4)));
  CHECK(q.x == Quad(Rat(1, 8)));
  CHECK(q.y == Quad(Rat(0), Rat(1, 8)));

  CHECK_THROWS_AS(tri.point_at(0, Quad(2)), OutOfRange);
  CHECK_THROWS_AS(tri.point_at(5, Quad(Rat(1, 2))), OutOfRange);
  CHECK_THROWS_AS(SegmentChain({Segment{{Quad(0), Quad(0)}, {Quad(0), Quad(0)}}}),
                  std::invalid_argument);
}

TEST_CASE("foot lifts and inverses") {
  CHECK(lift_right(Quad(1)) == QVec2{Quad(1), Quad(0)});
  CHECK(lift_left(Quad(1)) == QVec2{Quad(Rat(1, 4)), Quad(0, Rat(1, 4))});

  // round trips, exact
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> num(0, 64);
  for (int i = 0; i < 40; ++i) {
    Quad x{Rat(num(rng), 64)};
    CHECK(foot_right(lift_right(x)) == x);
    CHECK(foot_left(lift_left(x)) == x);
    // image abscissae stay on the admissible sub-segments
    CHECK(lift_right(x).x >= Quad(Rat(3, 4)));
    CHECK(lift_right(x).x <= Quad(1));
    CHECK(lift_left(x).x <= Quad(Rat(1, 4)));
    CHECK(lift_left(x).x >= Quad(0));
  }
  CHECK_THROWS_AS(foot_right(QVec2{Quad(Rat(1, 2)), Quad(Rat(1, 2))}), NotOnSubarc);
  CHECK_THROWS_AS(foot_left(QVec2{Quad(Rat(1, 2)), Quad(Rat(1, 2))}), NotOnSubarc);

  // high-precision versions
  const mpfr_prec_t P = 256;
  Real u = Real::log2c(P).scaled_pow2(1) - 1L;  // 2 log 2 - 1
  RVec2 lifted = lift_left(u);
  CHECK(abs(lifted.x - u / 4) <= 4 * lifted.x.ulp());
  CHECK(abs(foot_left(lifted) - u) <= 8 * u.ulp());
  Real x37 = Real::of(Rat(37, 100), P);
  CHECK(abs(foot_right(lift_right(x37)) - x37) <= 8 * x37.ulp());
  CHECK_THROWS_AS(foot_right(RVec2{Real::of(Rat(1, 2), P), Real::of(Rat(1, 2), P)}), NotOnSubarc);
}
