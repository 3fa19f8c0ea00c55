#include <doctest.h>

#include <random>

#include "cq/measure.hpp"

using namespace cq;

namespace {

bool near_eq(const Real& a, const Real& b, int ulps = 16) {
  Real m = abs(a) > abs(b) ? abs(a) : abs(b);
  return abs(a - b) <= ulps * m.ulp() || abs(a - b) <= Real::pow2(-200, a.prec());
}

}  // namespace

TEST_CASE("squared distance basics") {
  CHECK(squared_distance(Quad(1), QVec2{Quad(1), Quad(0)}) == Quad(0));
  CHECK(squared_distance(Quad(3), QVec2{Quad(-3), Quad(0)}) == Quad(36));
  // any point on the radius-3 circle about the origin is 9 away from 0
  for (double th : {0.3, 1.1, 2.9}) {
    Real t = Real::of(th, 256);
    RVec2 p{3 * cos(t), 3 * sin(t)};
    Real d = squared_distance(Real::of(0L, 256), p);
    CHECK(near_eq(d, Real::of(9L, 256)));
  }
}

TEST_CASE("finite measure validation") {
  CHECK_THROWS_AS(FiniteDiscreteMeasure({Rat(1), Rat(0)}, {Rat(1, 2), Rat(1, 2)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FiniteDiscreteMeasure({Rat(0), Rat(1)}, {Rat(1, 2), Rat(1, 3)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FiniteDiscreteMeasure({Rat(0)}, {Rat(-1)}), std::invalid_argument);
  auto u = FiniteDiscreteMeasure::uniform7();
  CHECK(u.size() == 7);
  auto n = FiniteDiscreteMeasure::nonuniform7();
  CHECK(n.weights()[0] == Rat(1, 2));
  CHECK(n.weights()[6] == Rat(1, 64));
}

TEST_CASE("distortion of finite measures") {
  auto uni = FiniteDiscreteMeasure::uniform7();
  CHECK_THROWS_AS(distortion(uni, std::vector<QVec2>{}), EmptyCodebook);

  // one point anywhere on the circle x^2+y^2=9 gives 13
  for (double th : {0.0, 0.7, 2.2, 3.14159}) {
    Real t = Real::of(th, 256);
    std::vector<RVec2> pts{{3 * cos(t), 3 * sin(t)}};
    CHECK(near_eq(distortion(uni, std::span<const RVec2>(pts), 256), Real::of(13L, 256)));
  }

  // covering the support with its own abscissae gives zero
  std::vector<QVec2> feet;
  for (auto& s : uni.support()) feet.push_back({Quad(s), Quad(0)});
  CHECK(distortion(uni, feet) == Quad(0));

  auto non = FiniteDiscreteMeasure::nonuniform7();
  std::vector<QVec2> ends{{Quad(-3), Quad(0)}, {Quad(3), Quad(0)}};
  CHECK(distortion(non, ends) == Quad(Rat(93, 64)));
}

TEST_CASE("distortion never increases when points are added") {
  auto non = FiniteDiscreteMeasure::nonuniform7();
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> xi(-40, 40), yi(0, 40);
  std::vector<QVec2> pts;
  Quad prev;
  for (int k = 0; k < 12; ++k) {
    pts.push_back({Quad(Rat(xi(rng), 10)), Quad(Rat(yi(rng), 10))});
    Quad v = distortion(non, pts);
    if (k > 0) CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("conditional block statistics, closed forms") {
  const mpfr_prec_t P = 256;
  CHECK(near_eq(av(1, std::nullopt, P), Real::log2c(P)));
  CHECK(near_eq(av(5, 5, P), Real::of(Rat(1, 5), P)));
  // Av[2,inf] = 2 log 2 - 1
  CHECK(near_eq(av(2, std::nullopt, P), Real::log2c(P).scaled_pow2(1) - 1L));

  CHECK(er(4, 4, P).is_zero());
  // Er[1,inf] = (pi^2 - 18 log^2 2)/12
  Real l = Real::log2c(P);
  Real er1 = (Real::pi(P) * Real::pi(P) - 18 * l * l) / 12;
  CHECK(near_eq(er(1, std::nullopt, P), er1));
}

TEST_CASE("tail series agree with direct summation") {
  const mpfr_prec_t P = 256;
  for (unsigned T : {50u, 100u, 200u}) {
    for (unsigned k : {1u, 2u, 7u}) {
      Real s1(P), s2(P), w(P);
      for (unsigned n = k; n < k + T; ++n) {
        Real inv = Real::of(1L, P) / static_cast<long>(n);
        w += Real::pow2(-static_cast<long>(n), P);
        s1 += inv.scaled_pow2(-static_cast<long>(n));
        s2 += (inv * inv).scaled_pow2(-static_cast<long>(n));
      }
      Real bound = Real::pow2(-static_cast<long>(T), P) * 4;
      CHECK(abs(series::tail_inv(k, P) - s1) < bound);
      CHECK(abs(series::tail_inv2(k, P) - s2) < bound);
      CHECK(abs(av(k, std::nullopt, P) - s1 / w) < bound.scaled_pow2(static_cast<long>(k) + 2));
    }
  }
  // Er[2,inf] against a 300-term brute-force sum around the brute mean
  Real s1(P), s2(P), w(P);
  for (unsigned n = 2; n < 302; ++n) {
    Real inv = Real::of(1L, P) / static_cast<long>(n);
    w += Real::pow2(-static_cast<long>(n), P);
    s1 += inv.scaled_pow2(-static_cast<long>(n));
    s2 += (inv * inv).scaled_pow2(-static_cast<long>(n));
  }
  Real mean = s1 / w;
  Real brute = s2 - mean * mean * w;
  CHECK(abs(er(2, std::nullopt, P) - brute) < Real::pow2(-250, P));
}

TEST_CASE("finite blocks are exact in rationals") {
  for (auto [k, ell] : {std::pair<unsigned, unsigned>{1, 1}, {2, 5}, {3, 17}, {10, 40}}) {
    auto ex = block_stats_exact(k, ell);
    CHECK(ex.weight == Rat(2, Int(1) << k) - Rat(1, Int(1) << ell));
    // weight * av = sum 2^-n / n, term by term
    Rat m1 = 0;
    for (unsigned n = k; n <= ell; ++n) m1 += Rat(1, Int(1) << n) / n;
    CHECK(ex.weight * ex.av == m1);
    CHECK(ex.er >= 0);
    CHECK((ex.er == 0) == (k == ell));
    // both evaluation routes agree
    auto fl = block_stats(k, ell, 256);
    CHECK(abs(fl.weight - Real::of(ex.weight, 256)) <= 4 * fl.weight.ulp());
    CHECK(abs(fl.av - Real::of(ex.av, 256)) <= 8 * fl.av.ulp());
    // er comes out of a subtraction of nearby second moments, so its
    // error scales with the block weight, not with er itself
    if (k != ell)
      CHECK(abs(fl.er - Real::of(ex.er, 256)) <= fl.weight * Real::pow2(40 - 256, 256));
  }
}

TEST_CASE("tail weight identity") {
  for (unsigned k : {1u, 3u, 9u}) {
    auto s = block_stats(k, std::nullopt, 128);
    CHECK(s.weight == Real::pow2(1 - static_cast<long>(k), 128));
    CHECK(s.av > Real(128));
    CHECK(s.av <= Real::of(1L, 128));
  }
}

TEST_CASE("tail series guard against cancellation") {
  CHECK_THROWS_AS(av(3000, std::nullopt, 256), PrecisionInsufficient);
  CHECK_NOTHROW(av(3000, std::nullopt, 3300));
}

TEST_CASE("reciprocal distortion with stabilized assignment") {
  const mpfr_prec_t P = 320;
  ReciprocalMeasure m{P};
  // {(1,0), (0,0)}: value is sum_{n>=2} 2^-n / n^2
  std::vector<RVec2> pts{{Real::of(1L, P), Real(P)}, {Real(P), Real(P)}};
  Real want = Real::li2_half(P) - Real::of(Rat(1, 2), P);
  CHECK(abs(distortion(m, std::span<const RVec2>(pts)) - want) <= 32 * want.ulp());

  // assignment detail: atom 1 alone against {(1,0), lift of 2log2-1}
  Real u = Real::log2c(P).scaled_pow2(1) - 1L;
  std::vector<RVec2> pair{{Real::of(1L, P), Real(P)},
                          {u / 4, Real::sqrt3(P) * u / 4}};
  auto a = assign_reciprocal(std::span<const RVec2>(pair), P);
  REQUIRE(a.head.size() >= 1);
  CHECK(a.head[0] == 0);
  for (size_t i = 1; i < a.head.size(); ++i) CHECK(a.head[i] == 1);
  CHECK(a.tail_owner == 1);
}
