#pragma once

// JSON input/output. Measures and constraints are accepted from files
// (or built-in names); results serialize with both exact rationals
// (when the solve ran on the exact path) and decimal strings at the
// requested precision. Decimals are emitted as strings so no reader is
// forced through double rounding.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "cq/geometry.hpp"
#include "cq/infinite.hpp"
#include "cq/measure.hpp"
#include "cq/solver.hpp"

namespace cq {

using Json = nlohmann::ordered_json;
using Measure = std::variant<FiniteDiscreteMeasure, ReciprocalMeasure>;

inline int decimal_digits(mpfr_prec_t prec) {
  return static_cast<int>(static_cast<double>(prec) * 0.30102999566398119521);
}

namespace io_detail {

inline Rat rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_number_float()) return Rat(j.get<double>());  // dyadic, exact
  throw std::invalid_argument("expected a number or rational string");
}

/// Angles come in as "pi", "a/b*pi", "a/b pi", "0", or a numeric radian
/// value that must sit within 1e-9 of a small multiple of pi.
inline Rat angle_from_json(const Json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    auto pos = s.find("pi");
    if (pos == std::string::npos) {
      Rat q = parse_rational(s);
      if (q != 0) throw std::invalid_argument("non-zero angles must be given as multiples of pi");
      return q;
    }
    std::string prefix = s.substr(0, pos);
    std::string suffix = s.substr(pos + 2);
    while (!prefix.empty() && (prefix.back() == '*' || prefix.back() == ' ')) prefix.pop_back();
    Rat coeff = prefix.empty() ? Rat(1) : parse_rational(prefix);
    while (!suffix.empty() && suffix.front() == ' ') suffix.erase(0, 1);
    if (!suffix.empty()) {
      if (suffix.front() != '/') throw std::invalid_argument("bad angle literal: " + s);
      coeff /= parse_rational(suffix.substr(1));
    }
    return coeff;
  }
  double v = j.get<double>();
  for (int den = 1; den <= 96; ++den)
    for (int num = 0; num <= den; ++num) {
      double q = 3.14159265358979323846 * num / den;
      if (std::abs(v - q) < 1e-9) return Rat(num, den);
    }
  throw std::invalid_argument("numeric arc angle is not a recognizable multiple of pi");
}

}  // namespace io_detail

inline Measure measure_from_json(const Json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "reciprocal") {
    ReciprocalMeasure m;
    if (j.contains("precision")) m.precision = j.at("precision").get<long>();
    return m;
  }
  if (type != "finite") throw std::invalid_argument("measure type must be finite or reciprocal");
  std::vector<Rat> support, weights;
  for (auto& v : j.at("support")) support.push_back(io_detail::rational_from_json(v));
  for (auto& v : j.at("weights")) weights.push_back(io_detail::rational_from_json(v));
  return FiniteDiscreteMeasure(std::move(support), std::move(weights));
}

inline Constraint constraint_from_json(const Json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "arc") {
    auto center = j.at("center");
    Rat cx = io_detail::rational_from_json(center.at(0));
    Rat cy = io_detail::rational_from_json(center.at(1));
    if (cy != 0) throw std::invalid_argument("arc centers must lie on the x-axis");
    Rat r = io_detail::rational_from_json(j.at("radius"));
    Rat lo = 0, hi = 1;
    if (j.contains("theta")) {
      lo = io_detail::angle_from_json(j.at("theta").at(0));
      hi = io_detail::angle_from_json(j.at("theta").at(1));
    }
    return ArcConstraint(cx, r, lo, hi);
  }
  if (type != "chain") throw std::invalid_argument("constraint type must be arc or chain");
  std::vector<Segment> pieces;
  for (auto& p : j.at("pieces")) {
    QVec2 a{Quad(io_detail::rational_from_json(p.at(0).at(0))),
            Quad(io_detail::rational_from_json(p.at(0).at(1)))};
    QVec2 b{Quad(io_detail::rational_from_json(p.at(1).at(0))),
            Quad(io_detail::rational_from_json(p.at(1).at(1)))};
    pieces.push_back(Segment{a, b});
  }
  return SegmentChain(std::move(pieces));
}

/// Built-in instances by name, else a JSON file path.
inline Measure load_measure(const std::string& name) {
  if (name == "uniform7") return FiniteDiscreteMeasure::uniform7();
  if (name == "nonuniform7") return FiniteDiscreteMeasure::nonuniform7();
  if (name == "reciprocal") return ReciprocalMeasure{};
  std::ifstream in(name);
  if (!in) throw std::invalid_argument("cannot open measure file: " + name);
  Json j;
  in >> j;
  return measure_from_json(j);
}

inline Constraint load_constraint(const std::string& name) {
  if (name == "semicircle3") return ArcConstraint::semicircle3();
  if (name == "triangle3") return SegmentChain::triangle3();
  if (name == "unit-semicircle") return ArcConstraint::unit_semicircle();
  if (name == "unit-triangle") return SegmentChain::unit_triangle();
  std::ifstream in(name);
  if (!in) throw std::invalid_argument("cannot open constraint file: " + name);
  Json j;
  in >> j;
  return constraint_from_json(j);
}

inline Json error_value_json(const std::optional<Quad>& exact, const Real& value,
                             mpfr_prec_t prec) {
  Json e;
  e["exact"] = (exact && exact->is_rational()) ? Json(exact->a.str()) : Json(nullptr);
  e["decimal"] = value.str(decimal_digits(prec));
  e["digits"] = decimal_digits(prec);
  return e;
}

inline Json result_to_json(const QuantizerResult& r, mpfr_prec_t prec) {
  int digits = decimal_digits(prec);
  Json out;
  out["n"] = r.n;
  out["error"] = error_value_json(r.exact, r.error, prec);
  out["existence"] = r.exists ? "exists" : "not_exists";
  Json optima = Json::array();
  for (const auto& o : r.optima) {
    Json jo;
    Json pts = Json::array();
    Json sides = Json::array();
    Json flags = Json::array();
    for (const auto& p : o.points) {
      pts.push_back(Json::array({p.x.str(digits), p.y.str(digits)}));
      sides.push_back(p.piece);
      Json f;
      f["clamped"] = p.clamped;
      f["degenerate_direction"] = p.degenerate_direction;
      flags.push_back(f);
    }
    jo["points"] = pts;
    if (!o.blocks.empty()) {
      Json blocks = Json::array();
      for (const auto& b : o.blocks)
        blocks.push_back(Json::array({b.lo, b.hi ? Json(*b.hi) : Json(nullptr)}));
      jo["canonical"] = blocks;
    } else {
      jo["canonical"] = o.canonical.blocks;
    }
    jo["sides"] = sides;
    jo["flags"] = flags;
    optima.push_back(jo);
  }
  out["optima"] = optima;
  out["multiplicity"] = r.multiplicity;
  out["mode"] = r.conjectural ? "conjectural" : "proved";
  if (r.v_unconstrained) out["v_unconstrained"] = r.v_unconstrained->str(digits);
  if (r.v_penalized && r.v_two_stage) {
    Json routes;
    routes["penalized"] = r.v_penalized->str(digits);
    routes["two_stage"] = r.v_two_stage->str(digits);
    routes["agree"] = r.routes_agree;
    out["routes"] = routes;
  }
  return out;
}

inline std::string result_to_csv(const QuantizerResult& r, mpfr_prec_t prec) {
  int digits = decimal_digits(prec);
  std::ostringstream os;
  os << "n,error,multiplicity,existence,mode\n";
  os << r.n << "," << r.error.str(digits) << "," << r.multiplicity << ","
     << (r.exists ? "exists" : "not_exists") << "," << (r.conjectural ? "conjectural" : "proved")
     << "\n";
  os << "optimum,point,x,y,side,clamped,degenerate\n";
  for (size_t i = 0; i < r.optima.size(); ++i)
    for (size_t k = 0; k < r.optima[i].points.size(); ++k) {
      const auto& p = r.optima[i].points[k];
      os << i << "," << k << "," << p.x.str(digits) << "," << p.y.str(digits) << "," << p.piece
         << "," << (p.clamped ? 1 : 0) << "," << (p.degenerate_direction ? 1 : 0) << "\n";
    }
  return os.str();
}

}  // namespace cq
