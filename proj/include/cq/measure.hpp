#pragma once

// Discrete probability measures and their distortion/series primitives.
//
// Finite measures run on exact rationals end to end. The reciprocal
// measure (mass 2^-k at 1/k) runs on Real with tail sums closed via
//   sum_{n>=k} x^n/n    = -log(1-x) - partial sum   at x = 1/2
//   sum_{n>=k} x^n/n^2  = Li2(1/2)  - partial sum
// so distortion against any fixed point set is evaluated without
// heuristic truncation.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cq/numbers.hpp"
#include "cq/real.hpp"

namespace cq {

struct EmptyCodebook : std::invalid_argument {
  EmptyCodebook() : std::invalid_argument("codebook must not be empty") {}
};

struct PrecisionInsufficient : std::runtime_error {
  explicit PrecisionInsufficient(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// squared distance between an abscissa x (identified with (x,0)) and a point

template <class T>
T squared_distance(const T& x, const Vec2<T>& p) {
  T dx = x - p.x;
  return dx * dx + p.y * p.y;
}

inline Quad squared_distance(const Rat& x, const QVec2& p) {
  return squared_distance(Quad(x), p);
}

// ---------------------------------------------------------------------------
// finite measures

class FiniteDiscreteMeasure {
 public:
  FiniteDiscreteMeasure(std::vector<Rat> support, std::vector<Rat> weights)
      : support_(std::move(support)), weights_(std::move(weights)) {
    if (support_.empty() || support_.size() != weights_.size())
      throw std::invalid_argument("support/weights size mismatch");
    Rat total = 0;
    for (size_t i = 0; i < support_.size(); ++i) {
      if (i > 0 && !(support_[i - 1] < support_[i]))
        throw std::invalid_argument("support must be strictly increasing");
      if (!(weights_[i] > 0)) throw std::invalid_argument("weights must be positive");
      total += weights_[i];
    }
    if (total != 1) throw std::invalid_argument("weights must sum to 1");
  }

  size_t size() const { return support_.size(); }
  const std::vector<Rat>& support() const { return support_; }
  const std::vector<Rat>& weights() const { return weights_; }

  /// Uniform measure on {-3,...,3}.
  static FiniteDiscreteMeasure uniform7() {
    std::vector<Rat> s, w;
    for (int j = -3; j <= 3; ++j) {
      s.emplace_back(j);
      w.emplace_back(Rat(1, 7));
    }
    return {std::move(s), std::move(w)};
  }

  /// Weights 2^-(4+j) on {-3,...,2} and 2^-6 at 3.
  static FiniteDiscreteMeasure nonuniform7() {
    std::vector<Rat> s, w;
    for (int j = -3; j <= 2; ++j) {
      s.emplace_back(j);
      w.emplace_back(Rat(1, Int(1) << (4 + j)));
    }
    s.emplace_back(3);
    w.emplace_back(Rat(1, 64));
    return {std::move(s), std::move(w)};
  }

 private:
  std::vector<Rat> support_;
  std::vector<Rat> weights_;
};

inline Quad distortion(const FiniteDiscreteMeasure& m, std::span<const QVec2> points) {
  if (points.empty()) throw EmptyCodebook{};
  Quad total;
  for (size_t i = 0; i < m.size(); ++i) {
    Quad atom(m.support()[i]);
    Quad best = squared_distance(atom, points[0]);
    for (size_t k = 1; k < points.size(); ++k) {
      Quad d = squared_distance(atom, points[k]);
      if (d < best) best = d;
    }
    total += Quad(m.weights()[i]) * best;
  }
  return total;
}

inline Real distortion(const FiniteDiscreteMeasure& m, std::span<const RVec2> points,
                       mpfr_prec_t prec) {
  if (points.empty()) throw EmptyCodebook{};
  Real total(prec);
  for (size_t i = 0; i < m.size(); ++i) {
    Real atom = Real::of(m.support()[i], prec);
    Real best = squared_distance(atom, points[0]);
    for (size_t k = 1; k < points.size(); ++k) {
      Real d = squared_distance(atom, points[k]);
      if (d < best) best = d;
    }
    total += Real::of(m.weights()[i], prec) * best;
  }
  return total;
}

inline Quad distortion(const FiniteDiscreteMeasure& m, const std::vector<QVec2>& pts) {
  return distortion(m, std::span<const QVec2>(pts));
}

// ---------------------------------------------------------------------------
// the reciprocal measure: mass 2^-k at 1/k, k = 1,2,...

struct ReciprocalMeasure {
  mpfr_prec_t precision = 256;
};

namespace series {

/// sum_{n=k}^{inf} 2^-n, exact.
inline Real tail_weight(unsigned k, mpfr_prec_t prec) { return Real::pow2(1 - static_cast<long>(k), prec); }

inline Rat tail_weight_exact(unsigned k) { return Rat(2, Int(1) << k); }

/// sum_{n=k}^{inf} 2^-n / n via log(2) minus the partial sum.
inline Real tail_inv(unsigned k, mpfr_prec_t prec) {
  Real s = Real::log2c(prec);
  for (unsigned n = 1; n < k; ++n) s -= (Real::of(1L, prec) / static_cast<long>(n)).scaled_pow2(-static_cast<long>(n));
  if (!(s.sign() > 0) || s < Real::pow2(8 - prec, prec))
    throw PrecisionInsufficient("tail of sum 2^-n/n cancelled below working precision at k=" + std::to_string(k));
  return s;
}

/// sum_{n=k}^{inf} 2^-n / n^2 via Li2(1/2) minus the partial sum.
inline Real tail_inv2(unsigned k, mpfr_prec_t prec) {
  Real s = Real::li2_half(prec);
  for (unsigned n = 1; n < k; ++n) {
    long nn = static_cast<long>(n);
    s -= (Real::of(1L, prec) / nn / nn).scaled_pow2(-nn);
  }
  if (!(s.sign() > 0) || s < Real::pow2(8 - prec, prec))
    throw PrecisionInsufficient("tail of sum 2^-n/n^2 cancelled below working precision at k=" + std::to_string(k));
  return s;
}

struct Moments {
  Real w, m1, m2;  // sum 2^-n, sum 2^-n/n, sum 2^-n/n^2 over the block
};

struct MomentsExact {
  Rat w, m1, m2;
};

inline MomentsExact block_moments_exact(unsigned k, unsigned ell) {
  if (k < 1 || ell < k) throw std::invalid_argument("bad block range");
  MomentsExact m{0, 0, 0};
  for (unsigned n = k; n <= ell; ++n) {
    Rat w(1, Int(1) << n);
    m.w += w;
    m.m1 += w / n;
    m.m2 += w / n / n;
  }
  return m;
}

inline Moments block_moments(unsigned k, std::optional<unsigned> ell, mpfr_prec_t prec) {
  if (k < 1 || (ell && *ell < k)) throw std::invalid_argument("bad block range");
  if (!ell) return {tail_weight(k, prec), tail_inv(k, prec), tail_inv2(k, prec)};
  Moments m{Real(prec), Real(prec), Real(prec)};
  for (unsigned n = k; n <= *ell; ++n) {
    long nn = static_cast<long>(n);
    Real inv = Real::of(1L, prec) / nn;
    m.w += Real::pow2(-nn, prec);
    m.m1 += inv.scaled_pow2(-nn);
    m.m2 += (inv * inv).scaled_pow2(-nn);
  }
  return m;
}

}  // namespace series

/// Conditional statistics of the reciprocal measure on atoms 1/k..1/ell
/// (ell omitted = infinite tail).
struct BlockStats {
  unsigned k = 1;
  std::optional<unsigned> ell;
  Real weight, av, er;
};

inline BlockStats block_stats(unsigned k, std::optional<unsigned> ell, mpfr_prec_t prec) {
  auto m = series::block_moments(k, ell, prec);
  BlockStats b;
  b.k = k;
  b.ell = ell;
  b.weight = m.w;
  b.av = m.m1 / m.w;
  b.er = m.m2 - b.av * b.av * m.w;
  if (b.er.sign() < 0) {
    if (abs(b.er) <= 64 * m.m2.ulp())
      b.er = Real::of(0L, prec);
    else
      throw PrecisionInsufficient("conditional error lost all significant bits on block [" +
                                  std::to_string(k) + "," + (ell ? std::to_string(*ell) : "inf") + "]");
  }
  return b;
}

inline Real av(unsigned k, std::optional<unsigned> ell, mpfr_prec_t prec) {
  return block_stats(k, ell, prec).av;
}
inline Real er(unsigned k, std::optional<unsigned> ell, mpfr_prec_t prec) {
  return block_stats(k, ell, prec).er;
}

struct BlockStatsExact {
  Rat weight, av, er;
};

inline BlockStatsExact block_stats_exact(unsigned k, unsigned ell) {
  auto m = series::block_moments_exact(k, ell);
  Rat av = m.m1 / m.w;
  return {m.w, av, m.m2 - av * av * m.w};
}

// ---------------------------------------------------------------------------
// distortion of the reciprocal measure against an arbitrary point set
//
// Atoms 1/n march monotonically to 0, and the pairwise comparison of
// squared distances is affine in the abscissa, so each pairwise winner
// flips at most once on (0,1]. Beyond the last crossing the assignment
// is constant and the tail closes with the exact series above.

struct InfiniteAssignment {
  std::vector<int> head;   // owner of atom 1/(i+1) for i < head.size()
  int tail_owner = 0;      // owner of every atom from tail_from on
  unsigned tail_from = 1;  // first index of the constant tail
  Real value;
};

inline InfiniteAssignment assign_reciprocal(std::span<const RVec2> points, mpfr_prec_t prec) {
  if (points.empty()) throw EmptyCodebook{};
  const size_t np = points.size();

  // limit winner: smallest |p|^2, ties by larger x, then lowest index
  std::vector<Real> norm2;
  norm2.reserve(np);
  for (auto& p : points) norm2.push_back(p.x * p.x + p.y * p.y);
  int star = 0;
  for (size_t i = 1; i < np; ++i) {
    int c = norm2[i].cmp(norm2[star]);
    if (c < 0 || (c == 0 && points[i].x > points[star].x)) star = static_cast<int>(i);
  }

  // smallest positive pairwise crossing: below it every comparison sits in
  // its limit state, so the assignment of the tail is constant
  std::optional<Real> xmin;
  for (size_t i = 0; i < np; ++i)
    for (size_t j = i + 1; j < np; ++j) {
      Real dx = points[i].x - points[j].x;
      if (dx.is_zero()) continue;
      Real xc = (norm2[i] - norm2[j]) / (dx.scaled_pow2(1));
      if (xc.sign() > 0 && (!xmin || xc < *xmin)) xmin = xc;
    }
  unsigned K = 2;
  if (xmin) {
    double ub = (1L / *xmin).to_double();
    if (!(ub > 0) || ub > 1e8)
      throw std::invalid_argument("degenerate codebook for reciprocal measure");
    K = std::max<unsigned>(2, static_cast<unsigned>(ub) + 1);
    while (!(Real::of(1L, prec) / static_cast<long>(K) < *xmin)) ++K;
  }

  InfiniteAssignment out;
  out.value = Real(prec);
  out.head.reserve(K - 1);
  for (unsigned n = 1; n < K; ++n) {
    Real atom = Real::of(1L, prec) / static_cast<long>(n);
    int best = 0;
    Real bd = squared_distance(atom, points[0]);
    for (size_t i = 1; i < np; ++i) {
      Real d = squared_distance(atom, points[i]);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(i);
      }
    }
    out.head.push_back(best);
    out.value += bd.scaled_pow2(-static_cast<long>(n));
  }
  auto m = series::block_moments(K, std::nullopt, prec);
  const auto& p = points[static_cast<size_t>(star)];
  out.value += m.m2 - (p.x * m.m1).scaled_pow2(1) + norm2[static_cast<size_t>(star)] * m.w;
  out.tail_owner = star;
  out.tail_from = K;
  return out;
}

inline Real distortion(const ReciprocalMeasure& m, std::span<const RVec2> points) {
  return assign_reciprocal(points, m.precision).value;
}
inline Real distortion(const ReciprocalMeasure& m, const std::vector<RVec2>& pts) {
  return distortion(m, std::span<const RVec2>(pts));
}

}  // namespace cq
