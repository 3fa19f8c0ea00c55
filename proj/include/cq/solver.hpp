#pragma once

// Exhaustive canonical-vector solver for finite measures. Every
// (piece-split, composition) hypothesis is scored as the sum of its
// per-cell closed-form minima; the global minimum, all co-optimal point
// sets, Voronoi validation and positive-mass existence come out of one
// sweep over that finite candidate space.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "cq/cellopt.hpp"
#include "cq/geometry.hpp"
#include "cq/measure.hpp"
#include "cq/partition.hpp"
#include "cq/real.hpp"

namespace cq {

struct NoOptimalSet : std::runtime_error {
  int max_supported_n;
  explicit NoOptimalSet(int maxn)
      : std::runtime_error("no optimal set of the requested size exists; largest supported n is " +
                           std::to_string(maxn)),
        max_supported_n(maxn) {}
};

struct OptPoint {
  int piece = 0;
  std::optional<Quad> param_exact;  // t on segments, pi-multiple on arcs
  std::optional<Quad> x_exact, y_exact;
  Real x{64}, y{64};
  bool clamped = false;
  bool degenerate_direction = false;
};

/// Contiguous atom range of the reciprocal measure; open hi = tail.
struct InfBlockRange {
  unsigned lo = 1;
  std::optional<unsigned> hi;

  friend bool operator==(const InfBlockRange& a, const InfBlockRange& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

struct Optimum {
  std::vector<OptPoint> points;  // ascending abscissa
  CanonicalVector canonical;             // finite path
  std::vector<InfBlockRange> blocks;     // reciprocal path
};

struct QuantizerResult {
  int n = 0;
  std::optional<Quad> exact;  // exact error value (finite path)
  Real error{64};
  std::vector<Optimum> optima;
  std::size_t multiplicity = 0;
  bool exists = true;
  bool conjectural = false;
  // reciprocal-measure extras
  std::optional<Real> v_unconstrained, v_penalized, v_two_stage;
  bool routes_agree = true;
};

struct SolveOptions {
  mpfr_prec_t precision = 256;
  int window = 32;
};

inline int env_threads() {
  if (const char* s = std::getenv("CQ_THREADS")) {
    int v = std::atoi(s);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(std::min(hw, 8u)) : 1;
}

namespace detail {

struct CellChoice {
  int piece;
  Quad param;
  QVec2 pos;
  bool clamped = false;
  bool degenerate = false;
  Quad value;
};

/// Per-(piece, block) minimization with memoization.
class FiniteCells {
 public:
  FiniteCells(const FiniteDiscreteMeasure& m, const Constraint& c) : m_(m), c_(c) {
    prefix_w_.assign(m.size() + 1, Rat(0));
    prefix_m1_.assign(m.size() + 1, Rat(0));
    prefix_m2_.assign(m.size() + 1, Rat(0));
    for (size_t i = 0; i < m.size(); ++i) {
      prefix_w_[i + 1] = prefix_w_[i] + m.weights()[i];
      prefix_m1_[i + 1] = prefix_m1_[i] + m.weights()[i] * m.support()[i];
      prefix_m2_[i + 1] = prefix_m2_[i] + m.weights()[i] * m.support()[i] * m.support()[i];
    }
    if (auto* arc = std::get_if<ArcConstraint>(&c_)) {
      if (!arc->ends_exact())
        throw std::invalid_argument("finite solver requires arc angles with exact cos/sin");
    }
  }

  int pieces() const {
    if (std::holds_alternative<ArcConstraint>(c_)) return 1;
    return static_cast<int>(std::get<SegmentChain>(c_).pieces.size());
  }

  CellMoments<Quad> moments(int lo, int len) const {
    size_t a = static_cast<size_t>(lo), b = a + static_cast<size_t>(len);
    return {Quad(prefix_w_[b] - prefix_w_[a]), Quad(prefix_m1_[b] - prefix_m1_[a]),
            Quad(prefix_m2_[b] - prefix_m2_[a])};
  }

  const CellChoice& cell_min(int piece, int lo, int len) {
    auto key = std::make_tuple(piece, lo, len);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    CellChoice out;
    out.piece = piece;
    auto mom = moments(lo, len);
    if (auto* arc = std::get_if<ArcConstraint>(&c_)) {
      auto r = min_on_arc(mom, *arc);
      out.param = Quad(r.theta);
      out.pos = r.point;
      out.degenerate = r.degenerate_direction;
      out.value = r.value;
    } else {
      const auto& seg = std::get<SegmentChain>(c_).pieces[static_cast<size_t>(piece)];
      auto r = min_on_segment<Quad>(mom, seg.a, seg.b);
      out.param = r.t;
      out.pos = r.point;
      out.clamped = r.clamped;
      out.value = r.value;
    }
    return cache_.emplace(key, std::move(out)).first->second;
  }

  /// Cheapest placement of the block on any piece (used by the DP route).
  Quad cell_min_any_piece(int lo, int len) {
    Quad best = cell_min(0, lo, len).value;
    for (int p = 1; p < pieces(); ++p) {
      Quad v = cell_min(p, lo, len).value;
      if (v < best) best = v;
    }
    return best;
  }

 private:
  const FiniteDiscreteMeasure& m_;
  Constraint c_;
  std::vector<Rat> prefix_w_, prefix_m1_, prefix_m2_;
  std::map<std::tuple<int, int, int>, CellChoice> cache_;
};

struct FiniteConfig {
  CanonicalVector cv;
  std::vector<CellChoice> cells;
};

struct FiniteBest {
  std::optional<Quad> value;
  std::vector<FiniteConfig> configs;
};

inline void consider(FiniteBest& best, const CanonicalVector& cv, FiniteCells& cells) {
  std::vector<CellChoice> chosen;
  chosen.reserve(cv.blocks.size());
  Quad total;
  int lo = 0, piece = 0, left_in_piece = cv.split.empty() ? 0 : cv.split[0];
  for (int blk : cv.blocks) {
    while (left_in_piece == 0 && piece + 1 < static_cast<int>(cv.split.size()))
      left_in_piece = cv.split[static_cast<size_t>(++piece)];
    const CellChoice& c = cells.cell_min(piece, lo, blk);
    total += c.value;
    chosen.push_back(c);
    lo += blk;
    --left_in_piece;
  }
  if (!best.value || total < *best.value) {
    best.value = total;
    best.configs.clear();
    best.configs.push_back({cv, std::move(chosen)});
  } else if (total == *best.value) {
    best.configs.push_back({cv, std::move(chosen)});
  }
}

inline bool point_less(const OptPoint& a, const OptPoint& b) {
  if (*a.x_exact != *b.x_exact) return *a.x_exact < *b.x_exact;
  return *a.y_exact < *b.y_exact;
}

}  // namespace detail

/// Minimum value plus every minimizing configuration; no existence filter.
inline detail::FiniteBest finite_search(const FiniteDiscreteMeasure& m, const Constraint& c,
                                        int n) {
  const int N = static_cast<int>(m.size());
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  detail::FiniteCells cells(m, c);
  detail::FiniteBest best;
  if (n > N) return best;  // no composition with parts >= 1 exists
  enumerate_canonical(N, n, cells.pieces(),
                      [&](const CanonicalVector& cv) { detail::consider(best, cv, cells); });
  return best;
}

/// Independent value-only route: contiguous-block DP with per-block
/// minimization over all pieces.
inline std::optional<Quad> finite_dp_value(const FiniteDiscreteMeasure& m, const Constraint& c,
                                           int n) {
  const int N = static_cast<int>(m.size());
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (n > N) return std::nullopt;
  detail::FiniteCells cells(m, c);
  // dp[j][i]: first i atoms in j cells
  std::vector<std::vector<std::optional<Quad>>> dp(
      static_cast<size_t>(n + 1), std::vector<std::optional<Quad>>(static_cast<size_t>(N + 1)));
  dp[0][0] = Quad(0);
  for (int j = 1; j <= n; ++j)
    for (int i = j; i <= N; ++i) {
      std::optional<Quad> acc;
      for (int k = j - 1; k < i; ++k) {
        if (!dp[static_cast<size_t>(j - 1)][static_cast<size_t>(k)]) continue;
        Quad v = *dp[static_cast<size_t>(j - 1)][static_cast<size_t>(k)] +
                 cells.cell_min_any_piece(k, i - k);
        if (!acc || v < *acc) acc = v;
      }
      dp[static_cast<size_t>(j)][static_cast<size_t>(i)] = acc;
    }
  return dp[static_cast<size_t>(n)][static_cast<size_t>(N)];
}

inline QuantizerResult solve_finite(const FiniteDiscreteMeasure& m, const Constraint& c, int n,
                                    const SolveOptions& opts = {}) {
  const int N = static_cast<int>(m.size());
  auto best = finite_search(m, c, n);

  QuantizerResult out;
  out.n = n;

  std::vector<Optimum> optima;
  if (best.value) {
    for (auto& cfg : best.configs) {
      Optimum o;
      o.canonical = cfg.cv;
      for (auto& cell : cfg.cells) {
        OptPoint p;
        p.piece = cell.piece;
        p.param_exact = cell.param;
        p.x_exact = cell.pos.x;
        p.y_exact = cell.pos.y;
        p.x = Real::of(cell.pos.x, opts.precision);
        p.y = Real::of(cell.pos.y, opts.precision);
        p.clamped = cell.clamped;
        p.degenerate_direction = cell.degenerate;
        o.points.push_back(std::move(p));
      }
      std::sort(o.points.begin(), o.points.end(), detail::point_less);
      optima.push_back(std::move(o));
    }
    // dedup by exact coordinates
    std::sort(optima.begin(), optima.end(), [](const Optimum& a, const Optimum& b) {
      if (a.points.size() != b.points.size()) return a.points.size() < b.points.size();
      for (size_t i = 0; i < a.points.size(); ++i) {
        if (!(*a.points[i].x_exact == *b.points[i].x_exact))
          return *a.points[i].x_exact < *b.points[i].x_exact;
        if (!(*a.points[i].y_exact == *b.points[i].y_exact))
          return *a.points[i].y_exact < *b.points[i].y_exact;
      }
      return false;
    });
    optima.erase(std::unique(optima.begin(), optima.end(),
                             [](const Optimum& a, const Optimum& b) {
                               if (a.points.size() != b.points.size()) return false;
                               for (size_t i = 0; i < a.points.size(); ++i)
                                 if (!(*a.points[i].x_exact == *b.points[i].x_exact) ||
                                     !(*a.points[i].y_exact == *b.points[i].y_exact))
                                   return false;
                               return true;
                             }),
                 optima.end());

    // validate and keep only configurations whose cells all carry mass
    std::vector<Optimum> kept;
    for (auto& o : optima) {
      std::vector<QVec2> pts;
      for (auto& p : o.points) pts.push_back({*p.x_exact, *p.y_exact});
      auto [assignment, recomputed] = voronoi_assign(m, std::span<const QVec2>(pts));
      if (!(recomputed == *best.value))
        throw std::logic_error("internal: Voronoi recomputation disagrees with claimed minimum");
      auto pos = positive_mass_cells(m, std::span<const QVec2>(pts));
      bool all = true;
      for (bool b : pos) all = all && b;
      if (all) kept.push_back(std::move(o));
    }
    optima = std::move(kept);
  }

  if (optima.empty()) {
    int maxn = 0;
    for (int k = std::min(n - 1, N); k >= 1; --k) {
      auto b = finite_search(m, c, k);
      if (!b.value) continue;
      bool any = false;
      for (auto& cfg : b.configs) {
        std::vector<QVec2> pts;
        for (auto& cell : cfg.cells) pts.push_back(cell.pos);
        auto pos = positive_mass_cells(m, std::span<const QVec2>(pts));
        bool all = true;
        for (bool x : pos) all = all && x;
        if (all) {
          any = true;
          break;
        }
      }
      if (any) {
        maxn = k;
        break;
      }
    }
    throw NoOptimalSet(maxn);
  }

  out.exact = *best.value;
  out.error = Real::of(*best.value, opts.precision);
  out.optima = std::move(optima);
  out.multiplicity = out.optima.size();
  out.exists = true;
  return out;
}

}  // namespace cq
