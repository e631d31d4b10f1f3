// octa: slope analysis, tilings, atlases, coincidences, flips and staircases
// from a slope config. JSON with --json, SVG with --svg.

#include "octa/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

namespace {

using namespace octa;

enum Exit { kOk = 0, kFailure = 1, kBadConfig = 2, kPrecondition = 3, kNotDetermined = 10 };

struct RunConfig {
  std::string command;
  std::string slope_path;
  std::string radius, r = "2", shift;
  int steps = 3;
  std::uint64_t seed = 0;
  std::string out, svg;
  bool json = false;
};

struct Params {
  SlopeConfig cfg;
  std::optional<Rational> radius;
  Rational r;
  std::optional<Vec4> shift;
};

struct Result {
  Json json;
  std::string text;
  std::string svg;
  int code = kOk;
};

Rational default_radius(const std::string& cmd) {
  static const std::map<std::string, long> d{{"tile", 20},  {"atlas", 20},  {"freq", 40},     {"coincidences", 3},
                                             {"flips", 100}, {"staircase", 50}, {"analyze", 0}};
  return Rational(d.at(cmd));
}

// All parameters are validated here, before any computation.
Params validate(const RunConfig& rc) {
  Params p{load_slope_config(rc.slope_path), std::nullopt, parse_rational(rc.r), std::nullopt};
  p.radius = rc.radius.empty() ? default_radius(rc.command) : parse_rational(rc.radius);
  if (rc.command != "analyze" && *p.radius <= 0) throw ParseError("--radius must be positive");
  if (rc.command == "coincidences" && denominator(*p.radius) != 1) throw ParseError("--radius must be an integer");
  if (p.r < 0) throw ParseError("--r must be nonnegative");
  if (rc.steps < 1) throw ParseError("--steps must be at least 1");
  if (rc.command == "flips" || rc.command == "staircase") {
    if (rc.shift.empty()) throw ParseError("--shift is required for " + rc.command);
    p.shift = to_field(parse_rational_vec4(rc.shift), p.cfg.slope.field());
  }
  if (rc.seed) p.cfg.slope = p.cfg.slope.with_offset(perturbed_offset(p.cfg.slope.offset(), rc.seed));
  return p;
}

Json header(const RunConfig& rc, const Params& p) {
  return Json{{"format", kFormatVersion}, {"command", rc.command}, {"name", p.cfg.name}, {"slope", to_json(p.cfg.slope)}};
}

TilingPatch patch_for(const Params& p, const RunConfig& rc) {
  PatchOptions opt;
  opt.reject_boundary = true;
  opt.seed = rc.seed + 1;
  return generate_patch(p.cfg.slope, *p.radius, opt);
}

Result run_analyze(const RunConfig& rc, const Params& p) {
  Result res;
  const Analysis a = analyze(p.cfg.slope);
  res.json = header(rc, p);
  res.json["analysis"] = to_json(a);
  std::ostringstream os;
  os << p.cfg.name << ": " << a.subperiods.size() << " subperiods of " << a.types << " types, verdict "
     << to_string(a.verdict.status) << " (rank " << a.verdict.rank << ")\n";
  for (const auto& sp : a.subperiods) {
    std::string rel;
    for (int t = 0; t < 3; ++t) {
      const Integer& c = sp.coeffs[t];
      if (c == 0) continue;
      const Integer m = abs(c);
      rel += rel.empty() ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
      rel += (m == 1 ? std::string() : m.str() + " ") + "G" + pair_label(sp.pairs[t]);
    }
    os << "  type " << sp.type << ": " << rel << " = 0\n";
  }
  res.text = os.str();
  if (a.verdict.status != Status::Determined) res.code = kNotDetermined;
  return res;
}

Json patch_summary(const TilingPatch& patch) {
  const auto counts = tile_frequencies(patch);
  Json c = Json::object();
  for (int k = 0; k < 6; ++k) c["T" + pair_label(k)] = counts[k];
  return Json{{"radius", to_json(patch.radius)},
              {"center", to_json(patch.center)},
              {"vertices", patch.vertices.size()},
              {"faces", patch.faces.size()},
              {"tiles", c}};
}

Result run_tile(const RunConfig& rc, const Params& p) {
  Result res;
  const auto patch = patch_for(p, rc);
  res.json = header(rc, p);
  res.json["patch"] = patch_summary(patch);
  res.text = "patch of radius " + to_string(*p.radius) + ": " + std::to_string(patch.vertices.size()) + " vertices, " +
             std::to_string(patch.faces.size()) + " tiles\n";
  if (!rc.svg.empty()) res.svg = render_svg(patch);
  return res;
}

Result run_atlas(const RunConfig& rc, const Params& p) {
  Result res;
  const auto patch = patch_for(p, rc);
  const auto atlas = r_atlas(patch, p.r);
  std::map<std::size_t, std::size_t> by_size;
  for (const auto& pat : atlas) ++by_size[pat.faces.size()];
  Json hist = Json::object();
  for (auto [n, count] : by_size) hist[std::to_string(n)] = count;
  res.json = header(rc, p);
  res.json["patch"] = patch_summary(patch);
  res.json["atlas"] = Json{{"r", to_json(p.r)}, {"patterns", atlas.size()}, {"patterns_by_tile_count", hist}};
  res.text = to_string(p.r) + "-atlas: " + std::to_string(atlas.size()) + " patterns\n";
  if (!rc.svg.empty()) res.svg = render_svg(patch);
  return res;
}

Result run_freq(const RunConfig& rc, const Params& p) {
  Result res;
  const auto patch = patch_for(p, rc);
  const auto counts = tile_frequencies(patch);
  std::size_t total = 0;
  for (auto c : counts) total += c;
  Json shares = Json::object();
  std::ostringstream os;
  os << "tile frequencies over " << total << " tiles\n";
  for (int k = 0; k < 6; ++k) {
    const Rational q = total ? Rational(static_cast<long>(counts[k]), static_cast<long>(total)) : Rational(0);
    shares["T" + pair_label(k)] = to_json(q);
    char buf[64];
    std::snprintf(buf, sizeof buf, "  T%s %6zu  %.5f\n", pair_label(k).c_str(), counts[k], static_cast<double>(to_long_double(q)));
    os << buf;
  }
  res.json = header(rc, p);
  res.json["patch"] = patch_summary(patch);
  res.json["shares"] = shares;
  res.text = os.str();
  return res;
}

Result run_coincidences(const RunConfig& rc, const Params& p) {
  Result res;
  const int radius = static_cast<int>(numerator(*p.radius));
  const auto found = find_coincidences(p.cfg.slope, radius);
  const auto g = grassmann(p.cfg.slope);
  Json list = Json::array();
  std::size_t holding = 0;
  for (const auto& c : found) {
    Json j = to_json(c);
    const auto eq = coincidence_equation(p.cfg.slope, c);
    const bool holds = eq.evaluate(g).is_zero();
    holding += holds;
    j["equation"] = to_json(eq);
    j["equation_holds"] = holds;
    list.push_back(j);
  }
  res.json = header(rc, p);
  res.json["lattice_radius"] = radius;
  res.json["coincidences"] = list;
  res.text = std::to_string(found.size()) + " coincidences at lattice radius " + std::to_string(radius) + ", " +
             std::to_string(holding) + " equations vanish on the slope\n";
  return res;
}

Result run_flips(const RunConfig& rc, const Params& p) {
  Result res;
  const auto ss = shifted_points(p.cfg.slope, *p.shift, *p.radius);
  const auto rep = verify_structure(ss, find_subperiods(p.cfg.slope), p.r);
  Json classes = Json::array();
  for (const auto& c : ss.classes) classes.push_back(c.size());
  Json clauses = Json::array();
  for (const auto& c : rep.clauses) clauses.push_back(to_json(c));
  res.json = header(rc, p);
  res.json["shift"] = to_json(*p.shift);
  res.json["radius"] = to_json(*p.radius);
  res.json["entering"] = ss.points.size();
  res.json["leaving"] = ss.leaving.size();
  res.json["classes"] = classes;
  res.json["clauses"] = clauses;
  res.json["pass"] = rep.pass();
  std::ostringstream os;
  os << ss.points.size() << " flips enter, " << ss.leaving.size() << " leave\n";
  for (const auto& c : rep.clauses)
    os << "  E" << c.type << ": " << c.size << " points, clause " << c.clause << (c.pass ? " pass" : " FAIL")
       << (c.message.empty() ? "" : " (" + c.message + ")") << "\n";
  res.text = os.str();
  if (!rep.pass()) res.code = kFailure;
  return res;
}

Result run_staircase(const RunConfig& rc, const Params& p) {
  Result res;
  const auto sp = build_staircase(p.cfg.slope, *p.shift, p.r, rc.steps, *p.radius);
  const auto planar = check_non_planarity(sp);
  const auto atlas = check_atlas_inclusion(sp);
  Json own = Json::array(), dev = Json::array();
  for (const auto& t : planar.own) own.push_back(to_json(t));
  for (const auto& d : planar.deviation) dev.push_back(to_json(d));
  Json curves = Json::array();
  for (const auto& c : sp.curves) {
    Json vs = Json::array();
    for (const auto& v : c.vertices) vs.push_back(Json::array({to_string(v[0]), to_string(v[1])}));
    curves.push_back(Json{{"vertices", vs}, {"obstacles", c.obstacles}});
  }
  std::map<int, std::size_t> bands;
  for (const auto& [z, b] : sp.band) ++bands[b];
  Json band_sizes = Json::array();
  for (auto [b, n] : bands) band_sizes.push_back(n);
  res.json = header(rc, p);
  res.json["shift"] = to_json(*p.shift);
  res.json["staircase"] = Json{{"steps", sp.steps()},
                               {"clearance", to_json(sp.clearance)},
                               {"line_type", sp.line_type},
                               {"direction", to_json(sp.direction)},
                               {"orientation", sp.orientation},
                               {"curves", curves},
                               {"band_vertices", band_sizes},
                               {"patch", patch_summary(sp.patch)}};
  res.json["tube"] = Json{{"whole", to_json(planar.whole)},
                          {"own", own},
                          {"deviation", dev},
                          {"increasing", planar.increasing},
                          {"pass", planar.pass()}};
  Json missing = Json::array();
  for (const auto& pat : atlas.missing) {
    Json faces = Json::array();
    for (const auto& f : pat.faces) faces.push_back(Json{{"base", to_json(f.base)}, {"tile", "T" + pair_label(f.pair)}});
    missing.push_back(faces);
  }
  res.json["atlas"] = Json{{"r", to_json(sp.r)},
                           {"staircase", atlas.staircase},
                           {"planar", atlas.planar},
                           {"missing", missing},
                           {"included", atlas.included()}};
  std::ostringstream os;
  os << sp.steps() << "-step staircase, " << sp.patch.faces.size() << " tiles\n"
     << "  whole patch in unit tube: " << (planar.whole.pass ? "yes" : "no") << "\n"
     << "  bands in own tubes: " << (planar.pass() ? "yes" : "no") << "\n"
     << "  " << to_string(sp.r) << "-atlas " << atlas.staircase << " patterns, " << atlas.missing.size()
     << " missing from planar " << atlas.planar << "\n";
  res.text = os.str();
  if (!rc.svg.empty()) res.svg = render_svg(sp.patch);
  if (!planar.pass() || !atlas.included()) res.code = kFailure;
  return res;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << content;
}

int run(const RunConfig& rc) {
  std::optional<Params> p;
  try {
    p = validate(rc);
  } catch (const ParseError& e) {
    std::cerr << "octa: " << e.what() << "\n";
    return kBadConfig;
  }
  static const std::map<std::string, Result (*)(const RunConfig&, const Params&)> commands{
      {"analyze", run_analyze}, {"tile", run_tile},   {"atlas", run_atlas},         {"freq", run_freq},
      {"coincidences", run_coincidences}, {"flips", run_flips}, {"staircase", run_staircase}};
  Result res;
  try {
    res = commands.at(rc.command)(rc, *p);
  } catch (const BoundaryHit& e) {
    std::cerr << "octa: " << e.what() << " at (" << e.point[0] << "," << e.point[1] << "," << e.point[2] << ","
              << e.point[3] << "); try offset " << to_string(e.suggested_offset[0]) << ","
              << to_string(e.suggested_offset[1]) << "," << to_string(e.suggested_offset[2]) << ","
              << to_string(e.suggested_offset[3]) << "\n";
    return kPrecondition;
  } catch (const PreconditionError& e) {
    std::cerr << "octa: precondition violated: " << e.what() << "\n";
    return kPrecondition;
  }
  const std::string body = rc.json ? dump(res.json) : res.text;
  if (rc.out.empty())
    std::cout << body;
  else
    write_file(rc.out, body);
  if (!rc.svg.empty()) {
    if (res.svg.empty()) {
      std::cerr << "octa: " << rc.command << " has no SVG output\n";
      return kBadConfig;
    }
    write_file(rc.svg, res.svg);
  }
  return res.code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact analysis of octagonal tilings and their slopes"};
  app.require_subcommand(1);
  RunConfig rc;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"analyze", "Grassmann coordinates, subperiods and the determination verdict"},
      {"tile", "planar tiling patch (--svg to draw it)"},
      {"atlas", "r-atlas of a planar patch"},
      {"freq", "tile frequencies of a planar patch"},
      {"coincidences", "coincidences within a lattice radius and their quadratic equations"},
      {"flips", "flips of a shifted slope and their structure"},
      {"staircase", "staircase tiling, its tube tests and atlas inclusion"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--slope", rc.slope_path, "slope config (TOML)")->required();
    sub->add_option("--radius", rc.radius, "region radius in E (lattice radius for coincidences)");
    sub->add_option("--r", rc.r, "atlas / structure diameter r");
    sub->add_option("--shift", rc.shift, "offset shift a,b,c,d (rationals)");
    sub->add_option("--steps", rc.steps, "staircase steps");
    sub->add_option("--seed", rc.seed, "perturb the config offset deterministically");
    sub->add_option("--out", rc.out, "write the report here instead of stdout");
    sub->add_option("--svg", rc.svg, "write an SVG drawing here");
    sub->add_flag("--json", rc.json, "JSON report");
    sub->callback([&rc, name = name] { rc.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadConfig;
  }
  try {
    return run(rc);
  } catch (const std::exception& e) {
    std::cerr << "octa: " << e.what() << "\n";
    return kFailure;
  }
}
