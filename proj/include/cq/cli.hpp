#pragma once

// Command implementations behind the `cq` binary. Each returns the
// process exit code: 0 success, 2 malformed input, 3 no optimal set of
// the requested size, 1 reference-case failures.

#include <iostream>
#include <optional>
#include <string>

#include "cq/io.hpp"
#include "cq/oracle.hpp"
#include "cq/repro.hpp"

namespace cq {

struct SolveArgs {
  std::string measure;
  std::string constraint;
  int n = 0;
  mpfr_prec_t precision = 256;
  int window = 32;
  std::string format = "json";
};

inline int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  try {
    if (a.n < 1) throw std::invalid_argument("n must be >= 1");
    if (a.precision < MPFR_PREC_MIN || a.precision > 1 << 24)
      throw std::invalid_argument("bad precision");
    Measure m = load_measure(a.measure);
    Constraint c = load_constraint(a.constraint);
    SolveOptions opts{a.precision, a.window};
    QuantizerResult r;
    if (auto* fm = std::get_if<FiniteDiscreteMeasure>(&m))
      r = solve_finite(*fm, c, a.n, opts);
    else
      r = solve_reciprocal(std::get<ReciprocalMeasure>(m), c, a.n, opts);
    if (a.format == "csv")
      out << result_to_csv(r, a.precision);
    else
      out << result_to_json(r, a.precision).dump(2) << "\n";
    return 0;
  } catch (const NoOptimalSet& e) {
    Json j;
    j["n"] = a.n;
    j["existence"] = "not_exists";
    j["max_supported_n"] = e.max_supported_n;
    j["error"] = nullptr;
    out << j.dump(2) << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

struct ReproduceArgs {
  std::string suite = "all";
  int max_n = 3;
  mpfr_prec_t precision = 256;
  int window = 32;
  std::string format = "text";
};

inline int cmd_reproduce(const ReproduceArgs& a, std::ostream& out, std::ostream& err) {
  try {
    ReproOptions opts;
    opts.suite = a.suite;
    opts.max_n = a.max_n;
    opts.precision = a.precision;
    opts.window = a.window;
    if (a.max_n > 300) {
      mpfr_prec_t need = static_cast<mpfr_prec_t>(1.2 * a.max_n) + 128;
      if (opts.precision < need) {
        err << "note: raising precision to " << need << " bits for --max-n " << a.max_n << "\n";
        opts.precision = need;
      }
    }
    if (opts.suite != "all" && opts.suite != "finite" && opts.suite != "infinite")
      throw std::invalid_argument("suite must be all, finite or infinite");
    auto rep = run_repro(opts);
    if (a.format == "json")
      out << repro_to_json(rep).dump(2) << "\n";
    else
      out << repro_to_text(rep);
    return rep.all_pass ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

struct SeriesArgs {
  unsigned k = 1;
  std::string ell = "inf";  // number or "inf"
  mpfr_prec_t precision = 256;
};

inline int cmd_series(const SeriesArgs& a, std::ostream& out, std::ostream& err) {
  try {
    std::optional<unsigned> ell;
    if (a.ell != "inf" && a.ell != "infinity") {
      long v = std::stol(a.ell);
      if (v < 1) throw std::invalid_argument("ell must be >= 1 or inf");
      ell = static_cast<unsigned>(v);
    }
    if (a.k < 1 || (ell && *ell < a.k)) throw std::invalid_argument("need 1 <= k <= ell");
    int digits = decimal_digits(a.precision);
    auto s = block_stats(a.k, ell, a.precision + 32);
    Json j;
    j["k"] = a.k;
    j["ell"] = ell ? Json(*ell) : Json("inf");
    auto entry = [&](const Real& v, const std::optional<Rat>& exact) {
      Json e;
      e["exact"] = exact ? Json(exact->str()) : Json(nullptr);
      e["decimal"] = v.rounded_to(a.precision).str(digits);
      return e;
    };
    if (ell) {
      auto ex = block_stats_exact(a.k, *ell);
      j["weight"] = entry(s.weight, ex.weight);
      j["av"] = entry(s.av, ex.av);
      j["er"] = entry(s.er, ex.er);
    } else {
      j["weight"] = entry(s.weight, series::tail_weight_exact(a.k));
      j["av"] = entry(s.av, std::nullopt);
      j["er"] = entry(s.er, std::nullopt);
    }
    j["digits"] = digits;
    out << j.dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

struct OracleArgs {
  std::string measure;
  std::string constraint;
  int n = 0;
  int resolution = 96;
  int rounds = 4;
  int restarts = 8;
  std::uint64_t seed = 1;
  bool check = false;  // also run the exact solver and report the gap
  mpfr_prec_t precision = 256;
  int window = 32;
};

inline int cmd_oracle(const OracleArgs& a, std::ostream& out, std::ostream& err) {
  try {
    if (a.n < 1) throw std::invalid_argument("n must be >= 1");
    Measure m = load_measure(a.measure);
    Constraint c = load_constraint(a.constraint);
    OracleConfig cfg;
    cfg.resolution = a.resolution;
    cfg.rounds = a.rounds;
    cfg.restarts = a.restarts;
    cfg.seed = a.seed;
    auto rep = grid_search(m, c, a.n, cfg);
    Json j;
    j["n"] = a.n;
    j["value"] = rep.value.str(20);
    Json pts = Json::array();
    for (auto& p : rep.points) pts.push_back(Json::array({p.x, p.y}));
    j["points"] = pts;
    j["params"] = rep.params;
    if (a.check) {
      SolveOptions opts{a.precision, a.window};
      try {
        QuantizerResult r;
        if (auto* fm = std::get_if<FiniteDiscreteMeasure>(&m))
          r = solve_finite(*fm, c, a.n, opts);
        else
          r = solve_reciprocal(std::get<ReciprocalMeasure>(m), c, a.n, opts);
        j["solver_value"] = r.error.str(20);
        j["gap"] = (rep.value - r.error.rounded_to(rep.value.prec())).str(6);
      } catch (const NoOptimalSet& e) {
        j["solver_value"] = nullptr;
        j["solver_note"] = "no optimal set; max supported n = " + std::to_string(e.max_supported_n);
      }
    }
    out << j.dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cq
