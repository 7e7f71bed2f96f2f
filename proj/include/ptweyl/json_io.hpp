#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

#include "json.hpp"

#include "errors.hpp"
#include "operator_spec.hpp"
#include "randomize.hpp"
#include "region.hpp"
#include "trig_poly.hpp"
#include "verify.hpp"
#include "weylgeom.hpp"

namespace ptweyl {

using json = nlohmann::json;

// A JSON value together with its JSON-pointer path, so that every parse
// error names the offending location.
class JsonCursor {
public:
  JsonCursor(const json& j, std::string path = "") : j_(&j), path_(std::move(path)) {}

  const json& value() const { return *j_; }
  const std::string& path() const { return path_; }
  std::string where() const { return path_.empty() ? "/" : path_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("config " + where() + ": " + msg);
  }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  JsonCursor operator[](const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(key)) JsonCursor(*j_, path_ + "/" + key).fail("missing required field");
    return {j_->at(key), path_ + "/" + key};
  }

  JsonCursor at(std::size_t i) const {
    if (!j_->is_array() || i >= j_->size()) fail("index out of range");
    return {j_->at(i), path_ + "/" + std::to_string(i)};
  }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    return j_->get<double>();
  }

  long long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<long long>();
  }

  std::uint64_t unsigned_integer() const {
    if (!j_->is_number_integer() || (j_->is_number_integer() && !j_->is_number_unsigned() && j_->get<long long>() < 0))
      fail("expected a non-negative integer");
    return j_->get<std::uint64_t>();
  }

  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected a boolean");
    return j_->get<bool>();
  }

  cplx complex_pair() const {
    if (!j_->is_array() || j_->size() != 2) fail("expected a [re, im] pair");
    return {at(0).number(), at(1).number()};
  }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? (*this)[key].number() : fallback;
  }

  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key) || j_->at(key).is_null()) return std::nullopt;
    return (*this)[key].number();
  }

private:
  const json* j_;
  std::string path_;
};

inline json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline json to_json(const TrigPoly& f) {
  json out = json::object();
  for (const auto& [k, c] : f.terms()) out[std::to_string(k)] = complex_to_json(c);
  return out;
}

inline TrigPoly trig_poly_from_json(const JsonCursor& cur) {
  if (!cur.value().is_object()) cur.fail("expected an object mapping frequencies to [re, im]");
  TrigPoly f;
  for (const auto& [key, val] : cur.value().items()) {
    char* end = nullptr;
    const long k = std::strtol(key.c_str(), &end, 10);
    if (key.empty() || *end != '\0' || std::labs(k) > 1000000)
      JsonCursor(val, cur.path() + "/" + key).fail("frequency keys must be integers");
    f.add(static_cast<int>(k), JsonCursor(val, cur.path() + "/" + key).complex_pair());
  }
  return f;
}

inline json to_json(const OperatorSpec& spec) {
  json terms = json::array();
  for (const auto& t : spec.div_terms) terms.push_back({{"beta", t.beta}, {"coeffs", to_json(t.coeff)}});
  return {{"h", spec.h}, {"div_terms", terms}, {"potential", to_json(spec.potential)}};
}

inline OperatorSpec operator_spec_from_json(const JsonCursor& cur) {
  if (cur.has("one_sided_terms") || cur.has("terms"))
    cur.fail("one-sided terms a(x)(hD)^alpha are not supported: they break the transpose "
             "identity after truncation; write the operator in divergence form (div_terms)");
  OperatorSpec spec;
  spec.h = cur["h"].number();
  const JsonCursor terms = cur["div_terms"];
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const JsonCursor t = terms.at(i);
    const long long beta = t["beta"].integer();
    if (beta < 0 || beta > 16) t["beta"].fail("beta must be in [0, 16]");
    spec.div_terms.push_back({static_cast<int>(beta), trig_poly_from_json(t["coeffs"])});
  }
  if (cur.has("potential")) spec.potential = trig_poly_from_json(cur["potential"]);
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    cur.fail(e.what());
  }
  return spec;
}

inline json to_json(const Region& region) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return {{"type", "disc"}, {"center", complex_to_json(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Rect>) {
          return {{"type", "rect"}, {"re", {s.re_lo, s.re_hi}}, {"im", {s.im_lo, s.im_hi}}};
        } else {
          json g = s.g_constant() ? json(s.g_at(0.0)) : to_json(s.g);
          return {{"type", "sector"}, {"theta", {s.theta1, s.theta2}}, {"g", g}, {"lambda", s.lambda}};
        }
      },
      region.shape());
}

// Sector "lambda" may be omitted (default 1) when a campaign supplies its
// own lambda list.
inline Region region_from_json(const JsonCursor& cur) {
  const std::string type = cur["type"].string();
  try {
    if (type == "disc") return Disc{cur["center"].complex_pair(), cur["radius"].number()};
    if (type == "rect") {
      const JsonCursor re = cur["re"], im = cur["im"];
      if (re.size() != 2 || im.size() != 2) cur.fail("rect needs re: [lo, hi] and im: [lo, hi]");
      return Rect{re.at(0).number(), re.at(1).number(), im.at(0).number(), im.at(1).number()};
    }
    if (type == "sector") {
      Sector s;
      const JsonCursor th = cur["theta"];
      if (th.size() != 2) th.fail("expected [theta1, theta2]");
      s.theta1 = th.at(0).number();
      s.theta2 = th.at(1).number();
      if (cur.has("g")) {
        const JsonCursor g = cur["g"];
        s.g = g.value().is_number() ? TrigPoly::constant(g.number()) : trig_poly_from_json(g);
      }
      s.lambda = cur.number_or("lambda", 1.0);
      return s;
    }
  } catch (const ValidationError& e) {
    if (std::string(e.what()).rfind("config ", 0) == 0) throw;
    cur.fail(e.what());
  }
  cur["type"].fail("unknown region type '" + type + "' (expected disc, rect or sector)");
}

inline json to_json(const PerturbationPlan& p) {
  json checks = json::array();
  for (const auto& c : p.checks)
    checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
  return {{"n", p.n},
          {"m", p.m},
          {"h", p.h},
          {"kappa", p.kappa},
          {"s", p.s},
          {"eps", p.eps},
          {"M", p.M},
          {"Mtilde", p.Mtilde},
          // N1 is integral for the usual rational inputs; print it as such.
          {"N1", p.N1 == std::floor(p.N1) && std::abs(p.N1) < 1e15 ? json(static_cast<long long>(p.N1)) : json(p.N1)},
          {"tau0", p.tau0},
          {"delta", p.delta},
          {"L", p.L},
          {"L_band", {p.L_band_lo, p.L_band_hi}},
          {"L_capped", p.L_capped},
          {"R", p.R},
          {"R_band", {p.R_band_lo, p.R_band_hi}},
          {"D", p.D},
          {"eps0", p.eps0},
          {"C", p.C},
          {"coupling_faithful", p.coupling_faithful},
          {"coupling_effective", p.coupling_effective},
          {"coupling_overridden", p.coupling_overridden},
          {"checks", checks},
          {"all_checks_hold", p.all_checks_hold()}};
}

inline json to_json(const WeylReport& r) {
  json tube = json::array();
  for (const auto& [rr, v] : r.tube) tube.push_back({rr, v});
  return {{"count", r.count},
          {"near_boundary", r.near_boundary},
          {"prediction", r.prediction},
          {"deviation", r.deviation},
          {"volume", r.volume},
          {"volume_fine", r.volume_fine},
          {"boundary_tube_volume", tube},
          {"r_used", r.r_used},
          {"eps_tilde_used", r.eps_tilde_used},
          {"bound_used", r.bound_used}};
}

inline json to_json(const KyFanReport& r) {
  return {{"N", r.N},
          {"s_q", r.s_q.values},
          {"s_q1", r.s_q1.values},
          {"s_q2", r.s_q2.values},
          {"violations", r.violations},
          {"threshold", r.threshold},
          {"profile_q1", r.profile_q1},
          {"profile_q2", r.profile_q2},
          {"lower_bound_profile", r.lower_bound_profile}};
}

}  // namespace ptweyl
