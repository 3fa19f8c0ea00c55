#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cq/infinite.hpp"
#include "cq/oracle.hpp"
#include "cq/repro.hpp"

using namespace cq;

TEST_CASE("oracle agrees with the exact solver on the semicircle") {
  auto uni = FiniteDiscreteMeasure::uniform7();
  Constraint arc{ArcConstraint::semicircle3()};
  OracleConfig cfg;
  cfg.resolution = 720;
  auto rep = grid_search(uni, arc, 2, cfg);
  Real truth = Real::of(Rat(19, 7), 256);
  CHECK(abs(rep.value - truth) < Real::of(Rat(1, 10000), 256));
  CHECK(rep.value >= truth - Real::pow2(-100, 256));
  // minimizing angles sit near the two ends
  REQUIRE(rep.params.size() == 2);
  CHECK(rep.params[0] < 0.01);
  CHECK(rep.params[1] > 0.99);
}

TEST_CASE("oracle reaches the one-point triangle optimum closely") {
  auto uni = FiniteDiscreteMeasure::uniform7();
  Constraint tri{SegmentChain::triangle3()};
  auto rep = grid_search(uni, tri, 1, OracleConfig{});
  Real truth = Real::of(Rat(43, 4), 256);
  CHECK(abs(rep.value - truth) < Real::of(Rat(1, 1000000), 256));
  CHECK(rep.value >= truth);
}

TEST_CASE("oracle is deterministic for a fixed seed") {
  auto non = FiniteDiscreteMeasure::nonuniform7();
  Constraint tri{SegmentChain::triangle3()};
  OracleConfig cfg;
  cfg.seed = 42;
  auto a = grid_search(non, tri, 2, cfg);
  auto b = grid_search(non, tri, 2, cfg);
  CHECK(a.params == b.params);
  CHECK(a.value == b.value);
}

TEST_CASE("full-support codebook against the exact reference") {
  std::vector<Rat> sup{Rat(-2), Rat(0), Rat(1), Rat(2)};
  std::vector<Rat> w{Rat(1, 4), Rat(1, 4), Rat(1, 4), Rat(1, 4)};
  FiniteDiscreteMeasure m(std::move(sup), std::move(w));
  SegmentChain chain({Segment{{Quad(-3), Quad(1)}, {Quad(0), Quad(3)}},
                      Segment{{Quad(0), Quad(3)}, {Quad(3), Quad(1)}}});
  Constraint c{chain};
  OracleConfig cfg;
  cfg.resolution = 64;
  auto rep = grid_search(m, c, 4, cfg);
  auto exact = solve_finite(m, c, 4);
  Real truth = exact.error;
  CHECK(rep.value >= truth - Real::pow2(-100, 256));
  CHECK(abs(rep.value - truth) < Real::of(Rat(1, 10000), 256));
}

TEST_CASE("truncated reciprocal oracle stays above the solver value") {
  ReciprocalMeasure m;
  Constraint tri{SegmentChain::unit_triangle()};
  auto rep = grid_search(m, tri, 2, OracleConfig{});
  auto exact = solve_reciprocal_triangle(2);
  CHECK(rep.value >= exact.error - Real::pow2(-100, 256));
  CHECK(abs(rep.value - exact.error) < Real::of(Rat(1, 10000), 256));
}

TEST_CASE("oracle points converge to a solver optimum") {
  struct Inst {
    FiniteDiscreteMeasure m;
    Constraint c;
    int n;
  };
  std::vector<Inst> insts;
  insts.push_back({FiniteDiscreteMeasure::uniform7(), Constraint{SegmentChain::triangle3()}, 2});
  insts.push_back({FiniteDiscreteMeasure::uniform7(), Constraint{ArcConstraint::semicircle3()}, 2});
  insts.push_back(
      {FiniteDiscreteMeasure::nonuniform7(), Constraint{SegmentChain::triangle3()}, 3});
  for (auto& inst : insts) {
    auto exact = solve_finite(inst.m, inst.c, inst.n);
    OracleConfig cfg;
    cfg.resolution = 256;
    cfg.rounds = 5;
    auto rep = grid_search(inst.m, inst.c, inst.n, cfg);
    // Hausdorff distance to the nearest reported optimum
    double best_h = 1e18;
    for (const auto& o : exact.optima) {
      double h = 0;
      for (const auto& p : o.points) {
        double px = p.x.to_double(), py = p.y.to_double();
        double nearest = 1e18;
        for (const auto& q : rep.points)
          nearest = std::min(nearest, std::hypot(px - q.x, py - q.y));
        h = std::max(h, nearest);
      }
      for (const auto& q : rep.points) {
        double nearest = 1e18;
        for (const auto& p : o.points)
          nearest = std::min(nearest, std::hypot(p.x.to_double() - q.x, p.y.to_double() - q.y));
        h = std::max(h, nearest);
      }
      best_h = std::min(best_h, h);
    }
    CHECK(best_h < 1e-3);
  }
}

TEST_CASE("reference-case construction rejects missing expectations") {
  CHECK_THROWS_AS(
      repro_detail::value_case("x", "finite", "", [](const ReproOptions&) { return CaseOutcome{}; }),
      std::logic_error);
  // every bundled case carries an expectation
  for (auto& c : finite_cases()) CHECK_FALSE(c.expected.empty());
  for (auto& c : infinite_cases()) CHECK_FALSE(c.expected.empty());
}

TEST_CASE("oracle configuration is validated") {
  auto uni = FiniteDiscreteMeasure::uniform7();
  Constraint tri{SegmentChain::triangle3()};
  OracleConfig bad;
  bad.resolution = 10;
  CHECK_THROWS_AS(grid_search(uni, tri, 1, bad), std::invalid_argument);
  bad.resolution = 64;
  bad.rounds = 1;
  CHECK_THROWS_AS(grid_search(uni, tri, 1, bad), std::invalid_argument);
}
