#pragma once

// Canonical-vector enumeration (piece splits x support compositions),
// Voronoi assignment with deterministic lowest-index tie-breaking, and
// positive-mass cell detection.

#include <functional>
#include <span>
#include <vector>

#include "cq/measure.hpp"
#include "cq/numbers.hpp"

namespace cq {

struct CanonicalVector {
  std::vector<int> split;   // points per piece, parts >= 0, sums to n
  std::vector<int> blocks;  // support atoms per point, parts >= 1, sums to N

  friend bool operator==(const CanonicalVector& a, const CanonicalVector& b) {
    return a.split == b.split && a.blocks == b.blocks;
  }
};

inline Int binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  Int r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// First composition of N into n parts >= 1 in lexicographic order.
inline std::vector<int> first_composition(int N, int n) {
  std::vector<int> c(static_cast<size_t>(n), 1);
  c.back() = N - (n - 1);
  return c;
}

/// Advances to the next composition (lexicographic); false when exhausted.
inline bool next_composition(std::vector<int>& c) {
  int n = static_cast<int>(c.size());
  if (n <= 1) return false;
  // find rightmost index (not last) whose increment keeps a valid suffix
  int spare = c[static_cast<size_t>(n - 1)] - 1;
  for (int i = n - 2; i >= 0; --i) {
    if (spare >= 1) {
      c[static_cast<size_t>(i)] += 1;
      int remaining = spare - 1;
      for (int j = i + 1; j < n - 1; ++j) c[static_cast<size_t>(j)] = 1;
      c[static_cast<size_t>(n - 1)] = 1 + remaining;
      return true;
    }
    spare += c[static_cast<size_t>(i)] - 1;
  }
  return false;
}

/// All splits of n into `pieces` nonnegative parts, lexicographic.
inline std::vector<std::vector<int>> all_splits(int n, int pieces) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<size_t>(pieces), 0);
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == pieces - 1) {
      cur[static_cast<size_t>(idx)] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[static_cast<size_t>(idx)] = v;
      rec(idx + 1, left - v);
    }
  };
  if (pieces >= 1) rec(0, n);
  return out;
}

/// Streams every (split, composition) pair once, split-major lexicographic.
inline void enumerate_canonical(int N, int n, int pieces,
                                const std::function<void(const CanonicalVector&)>& sink) {
  if (n < 1 || n > N) throw std::invalid_argument("need 1 <= n <= N");
  for (auto& sp : all_splits(n, pieces)) {
    std::vector<int> comp = first_composition(N, n);
    do {
      sink(CanonicalVector{sp, comp});
    } while (next_composition(comp));
  }
}

inline Int canonical_count(int N, int n, int pieces) {
  return binomial(static_cast<unsigned>(N - 1), static_cast<unsigned>(n - 1)) *
         binomial(static_cast<unsigned>(n + pieces - 1), static_cast<unsigned>(pieces - 1));
}

// ---------------------------------------------------------------------------
// Voronoi assignment

struct Assignment {
  std::vector<int> owner;  // per support atom, index of the nearest point
};

inline bool contiguous(const Assignment& a) {
  for (size_t i = 1; i < a.owner.size(); ++i)
    if (a.owner[i] < a.owner[i - 1]) return false;
  return true;
}

/// Ties go to the lowest point index; returns the recomputed distortion.
inline std::pair<Assignment, Quad> voronoi_assign(const FiniteDiscreteMeasure& m,
                                                  std::span<const QVec2> points) {
  if (points.empty()) throw EmptyCodebook{};
  Assignment a;
  a.owner.resize(m.size());
  Quad total;
  for (size_t i = 0; i < m.size(); ++i) {
    Quad atom(m.support()[i]);
    int best = 0;
    Quad bd = squared_distance(atom, points[0]);
    for (size_t k = 1; k < points.size(); ++k) {
      Quad d = squared_distance(atom, points[k]);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(k);
      }
    }
    a.owner[i] = best;
    total += Quad(m.weights()[i]) * bd;
  }
  return {std::move(a), total};
}

inline std::pair<Assignment, Real> voronoi_assign(const FiniteDiscreteMeasure& m,
                                                  std::span<const RVec2> points,
                                                  mpfr_prec_t prec) {
  if (points.empty()) throw EmptyCodebook{};
  Assignment a;
  a.owner.resize(m.size());
  Real total(prec);
  for (size_t i = 0; i < m.size(); ++i) {
    Real atom = Real::of(m.support()[i], prec);
    int best = 0;
    Real bd = squared_distance(atom, points[0]);
    for (size_t k = 1; k < points.size(); ++k) {
      Real d = squared_distance(atom, points[k]);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(k);
      }
    }
    a.owner[i] = best;
    total += Real::of(m.weights()[i], prec) * bd;
  }
  return {std::move(a), total};
}

inline std::pair<InfiniteAssignment, Real> voronoi_assign(const ReciprocalMeasure& m,
                                                          std::span<const RVec2> points) {
  auto a = assign_reciprocal(points, m.precision);
  Real v = a.value;
  return {std::move(a), v};
}

/// True per point iff its first-claimed cell carries positive probability.
inline std::vector<bool> positive_mass_cells(const FiniteDiscreteMeasure& m,
                                             std::span<const QVec2> points) {
  auto [a, v] = voronoi_assign(m, points);
  std::vector<bool> pos(points.size(), false);
  for (int o : a.owner) pos[static_cast<size_t>(o)] = true;
  return pos;
}

inline std::vector<bool> positive_mass_cells(const ReciprocalMeasure& m,
                                             std::span<const RVec2> points) {
  auto [a, v] = voronoi_assign(m, points);
  std::vector<bool> pos(points.size(), false);
  for (int o : a.head) pos[static_cast<size_t>(o)] = true;
  pos[static_cast<size_t>(a.tail_owner)] = true;
  return pos;
}

}  // namespace cq
