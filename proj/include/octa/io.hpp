#pragma once

#include "octa/coincidence.hpp"
#include "octa/determination.hpp"
#include "octa/flips.hpp"
#include "octa/staircase.hpp"

#include <json.hpp>
#include <toml.hpp>

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace octa {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Parses "a + b*sqrt2 - 1/3*sqrt6"-style text. Each radical must be a
/// monomial of `field` (sqrt d1, sqrt d2 or sqrt(d1 d2)).
inline FieldElement parse_field_element(std::string_view text, const FieldDescriptor& field) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw ParseError("empty field element");
  auto monomial = [&](std::int64_t d) -> unsigned {
    for (unsigned m = 1; m < static_cast<unsigned>(field.dimension()); ++m)
      if (field.radical_square(m) == d) return m;
    throw ParseError("sqrt" + std::to_string(d) + " is not a basis radical of " + field.str());
  };
  std::vector<Rational> coeffs(field.dimension());
  std::size_t pos = 0;
  while (pos < s.size()) {
    int sgn = 1;
    for (int signs = 0; pos < s.size() && (s[pos] == '+' || s[pos] == '-'); ++signs) {
      if (signs == 2) throw ParseError("malformed field element '" + std::string(text) + "'");
      if (s[pos++] == '-') sgn = -sgn;
    }
    std::size_t end = pos;
    while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
    const std::string term = s.substr(pos, end - pos);
    if (term.empty()) throw ParseError("malformed field element '" + std::string(text) + "'");
    Rational c(1);
    unsigned mask = 0;
    const auto r = term.find("sqrt");
    if (r == std::string::npos) {
      c = parse_rational(term);
    } else {
      std::string head = term.substr(0, r);
      if (!head.empty()) {
        if (head.back() != '*') throw ParseError("expected '*' before sqrt in '" + term + "'");
        head.pop_back();
        c = parse_rational(head);
      }
      const std::string d = term.substr(r + 4);
      if (d.empty() || d.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("malformed radical in '" + term + "'");
      mask = monomial(std::stoll(d));
    }
    coeffs[mask] += sgn * c;
    pos = end;
  }
  return FieldElement(field, coeffs);
}

struct SlopeConfig {
  std::string name;
  Slope slope;
};

namespace detail {

inline std::string toml_string(const toml::node* n, const std::string& key) {
  if (!n) throw ParseError("missing entry in '" + key + "'");
  if (auto s = n->value<std::string>()) return *s;
  if (auto i = n->value<std::int64_t>()) return std::to_string(*i);
  throw ParseError("'" + key + "' entries must be strings or integers");
}

inline std::vector<std::string> toml_strings(const toml::table& t, const std::string& key, std::size_t count) {
  const auto* arr = t[key].as_array();
  if (!arr) throw ParseError("'" + key + "' must be an array");
  if (arr->size() != count)
    throw ParseError("'" + key + "' must have " + std::to_string(count) + " entries");
  std::vector<std::string> out;
  for (const auto& n : *arr) out.push_back(toml_string(&n, key));
  return out;
}

}  // namespace detail

/// Slope config:
///   format = 1
///   name = "..."
///   radicands = [2, 3]
///   u = ["1", "sqrt2", ...] and v = [...]   or   grassmann = [6 entries]
///   offset = ["1/7", ...]
inline SlopeConfig parse_slope_config(std::string_view text) {
  toml::table t;
  try {
    t = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ParseError(std::string("config: ") + std::string(e.description()));
  }
  const auto format = t["format"].value<std::int64_t>();
  if (!format) throw ParseError("config: missing 'format'");
  if (*format != kFormatVersion) throw ParseError("config: unsupported format " + std::to_string(*format));
  SlopeConfig cfg{t["name"].value_or(std::string("slope")), Slope(FieldDescriptor{}, {1, 0, 0, 0}, {0, 1, 0, 0})};
  std::vector<std::int64_t> radicands;
  if (const auto* arr = t["radicands"].as_array())
    for (const auto& n : *arr) {
      auto d = n.value<std::int64_t>();
      if (!d) throw ParseError("config: radicands must be integers");
      radicands.push_back(*d);
    }
  FieldDescriptor field;
  try {
    field = FieldDescriptor(radicands);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  auto elements = [&](const std::string& key, std::size_t count) {
    std::vector<FieldElement> out;
    for (const auto& s : detail::toml_strings(t, key, count)) out.push_back(parse_field_element(s, field));
    return out;
  };
  RationalVec4 offset{};
  if (t.contains("offset")) {
    auto o = detail::toml_strings(t, "offset", 4);
    for (int i = 0; i < 4; ++i) offset[i] = parse_rational(o[i]);
  }
  const bool has_basis = t.contains("u") || t.contains("v");
  if (has_basis == t.contains("grassmann"))
    throw ParseError("config: give either 'u' and 'v' or 'grassmann'");
  if (has_basis) {
    auto u = elements("u", 4), v = elements("v", 4);
    cfg.slope = Slope(field, {u[0], u[1], u[2], u[3]}, {v[0], v[1], v[2], v[3]}, offset);
  } else {
    auto g = elements("grassmann", 6);
    cfg.slope = plane_from_grassmann(GrassmannCoords(field, {g[0], g[1], g[2], g[3], g[4], g[5]})).with_offset(offset);
  }
  return cfg;
}

inline SlopeConfig load_slope_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_slope_config(buf.str());
}

/// Comma separated rational vector "a,b,c,d".
inline RationalVec4 parse_rational_vec4(std::string_view text) {
  RationalVec4 out{};
  std::size_t k = 0, pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    if (k == 4) throw ParseError("expected 4 components in '" + std::string(text) + "'");
    out[k++] = parse_rational(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (k != 4) throw ParseError("expected 4 components in '" + std::string(text) + "'");
  return out;
}

// JSON encoders: rationals as "p/q" strings, field elements tagged with
// their field, lattice points as integer arrays.

inline Json to_json(const Rational& q) { return to_string(q); }

inline Json to_json(const Integer& n) { return n.str(); }

inline Json to_json(const FieldDescriptor& f) {
  Json j = Json::array();
  for (auto d : f.radicands()) j.push_back(d);
  return j;
}

inline Json to_json(const FieldElement& x) {
  Json coeffs = Json::array();
  for (const auto& c : x.coeffs()) coeffs.push_back(to_string(c));
  return Json{{"field", to_json(x.field())}, {"coeffs", coeffs}, {"text", x.str()}};
}

inline Json to_json(const Point4& z) { return Json::array({z[0], z[1], z[2], z[3]}); }

template <class T>
Json to_json(const std::vector<T>& xs) {
  Json j = Json::array();
  for (const auto& x : xs) j.push_back(to_json(x));
  return j;
}

template <class T, std::size_t N>
Json to_json(const std::array<T, N>& xs) {
  Json j = Json::array();
  for (const auto& x : xs) j.push_back(to_json(x));
  return j;
}

inline Json to_json(const GrassmannCoords& g) {
  Json j;
  for (int k = 0; k < 6; ++k) j["G" + pair_label(k)] = to_json(g[k]);
  return j;
}

inline Json to_json(const Slope& s) {
  return Json{{"field", to_json(s.field())},
              {"u", to_json(s.u())},
              {"v", to_json(s.v())},
              {"offset", to_json(s.offset())}};
}

inline Json to_json(const Subperiod& sp) {
  Json rel = Json::object();
  for (int t = 0; t < 3; ++t) rel["G" + pair_label(sp.pairs[t])] = sp.coeffs[t].str();
  Json j{{"type", sp.type}, {"relation", rel}};
  if (sp.lift) j["lift"] = to_json(*sp.lift);
  return j;
}

inline Json to_json(const Verdict& v) {
  Json j{{"status", to_string(v.status)}, {"rank", v.rank}};
  if (!v.solutions.empty()) {
    Json sols = Json::array();
    for (const auto& g : v.solutions) sols.push_back(to_json(g));
    j["solutions"] = sols;
  }
  if (v.pencil) j["pencil_roots"] = to_string(v.pencil->kind);
  if (v.family) {
    Json basis = Json::array();
    for (const auto& w : v.family->kernel_basis) {
      Json row = Json::array();
      for (const auto& x : w) row.push_back(x.str());
      basis.push_back(row);
    }
    j["family_kernel"] = basis;
  }
  return j;
}

inline Json to_json(const Analysis& a) {
  Json sps = Json::array();
  for (const auto& sp : a.subperiods) sps.push_back(to_json(sp));
  return Json{{"grassmann", to_json(a.grassmann)},
              {"plucker_residual", to_json(a.grassmann.plucker_residual())},
              {"subperiods", sps},
              {"types", a.types},
              {"verdict", to_json(a.verdict)}};
}

inline Json to_json(const Coincidence& c) {
  Json segs = Json::array();
  for (const auto& s : c.segments) segs.push_back(Json{{"base", to_json(s.base)}, {"direction", s.direction}});
  return Json{{"segments", segs}, {"point", to_json(c.point)}};
}

inline Json to_json(const CoincidenceEquation& eq) {
  return Json{{"special", eq.special}, {"roles", eq.roles}, {"coeffs", to_json(eq.coeffs)}};
}

/// Floating summaries are written as decimal strings with fixed digits.
inline std::string decimal(double x, int digits = 6) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  std::string s = os.str();
  return s.rfind("-0.", 0) == 0 && s.find_first_not_of("-0.") == std::string::npos ? s.substr(1) : s;
}

inline Json to_json(const ClauseReport& c) {
  Json j{{"type", c.type}, {"clause", c.clause}, {"pass", c.pass}, {"size", c.size}};
  if (c.clause == 1) j["lines"] = c.lines;
  if (c.clause < 2 && std::isfinite(c.min_distance)) j["min_distance_approx"] = decimal(c.min_distance);
  if (!c.witnesses.empty()) j["witnesses"] = to_json(c.witnesses);
  if (!c.message.empty()) j["message"] = c.message;
  return j;
}

inline Json to_json(const TubeReport& t) {
  Json j{{"pass", t.pass}, {"deviation", to_json(t.deviation)}, {"farthest", to_json(t.farthest)}};
  if (t.violation) j["violation"] = to_json(*t.violation);
  return j;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace octa
