#pragma once

#include "octa/flips.hpp"

#include <deque>
#include <map>
#include <unordered_map>

namespace octa {

/// No polyline avoiding the flips exists in the searched corridor.
class RoutingFailure : public PreconditionError {
 public:
  RoutingFailure(int step, std::size_t obstacles, const std::string& why)
      : PreconditionError("no step edge for step " + std::to_string(step) + " (" + std::to_string(obstacles) +
                          " flip points): " + why),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// A step edge: polyline in E with vertices lambda u + mu v, monotone along
/// the flip lines.
struct StepCurve {
  std::vector<std::array<Rational, 2>> vertices;  // (lambda, mu)
  std::vector<std::array<double, 2>> path;        // (t, kappa) in the routing frame
  std::size_t obstacles = 0;
};

/// A staircase patch: band i (between curve i and curve i+1) is selected by
/// the window of E + o + i s. "Right" of a curve is the clockwise side of
/// its direction, with E oriented by (u, v).
struct StepPatch {
  TilingPatch patch;
  Vec4 offset;
  Vec4 shift;
  Rational r;
  Rational clearance;
  int line_type = 0;  // type whose flips form the lines followed by the curves; 0 if none
  Vec4 direction;     // direction of the curves in E
  std::vector<StepCurve> curves;
  std::map<Point4, int> band;  // per patch vertex
  std::string orientation = "right = clockwise side of the step direction in E oriented by (u, v)";

  std::size_t steps() const { return curves.size(); }
};

struct StaircaseOptions {
  std::optional<Vec4> offset;
  bool any_slope = false;  // skip the subperiod-type precondition
  double column = 1.0;     // routing grid, E units
  double level = 0.5;
};

namespace detail {

struct RoutingFrame {
  std::array<long double, 2> origin, along, right;
  std::array<long double, 2> tk(const Projection& proj, const Point4& z) const {
    const auto f = proj.frame(proj.along_approx(z));
    const long double x = f[0] - origin[0], y = f[1] - origin[1];
    return {x * along[0] + y * along[1], x * right[0] + y * right[1]};
  }
};

inline long double segment_distance(std::array<long double, 2> p, std::array<long double, 2> a,
                                    std::array<long double, 2> b) {
  const long double dx = b[0] - a[0], dy = b[1] - a[1];
  const long double len2 = dx * dx + dy * dy;
  long double t = len2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0;
  t = std::clamp(t, 0.0L, 1.0L);
  return std::hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy);
}

// (lambda, mu) of the frame point, rounded to a dyadic rational.
inline std::array<Rational, 2> frame_to_plane(const Projection& proj, std::array<long double, 2> f) {
  const long double uu = proj.uu().approx(), uv = proj.uv().approx(), vv = proj.vv().approx();
  const long double det = proj.det_gram_approx();
  const long double b1 = f[0] * std::sqrt(uu);
  const long double b2 = (f[1] * std::sqrt(uu) * std::sqrt(det) + uv * b1) / uu;
  const long double lambda = (vv * b1 - uv * b2) / det, mu = (uu * b2 - uv * b1) / det;
  auto dyadic = [](long double x) { return Rational(static_cast<long long>(std::llround(x * 4096.0L)), 4096); };
  return {dyadic(lambda), dyadic(mu)};
}

inline Vec2 plane_point_b(const Projection& proj, const std::array<Rational, 2>& lm) {
  const FieldElement l(lm[0]), m(lm[1]);
  return {l * proj.uu() + m * proj.uv(), l * proj.uv() + m * proj.vv()};
}

}  // namespace detail

/// Routes a polyline across the disk of radius `reach` in the routing frame,
/// monotone in t, keeping float distance above `clear` from every obstacle,
/// and at least `gap` to the right of `previous` when given. Takes the
/// leftmost admissible level column by column.
inline std::optional<std::vector<std::array<double, 2>>> route_corridor(
    const std::vector<std::array<long double, 2>>& obstacles, long double clear, long double reach,
    long double kappa_min, const std::vector<std::array<double, 2>>* previous, long double gap, double column,
    double level) {
  const int cols = static_cast<int>(std::ceil(2 * reach / column));
  const int levels = static_cast<int>(std::ceil((reach - kappa_min) / level));
  auto t_of = [&](int c) { return -reach + c * column; };
  auto k_of = [&](int m) { return kappa_min + m * level; };
  // Obstacles bucketed by column for quick neighbourhood queries.
  std::map<int, std::vector<std::size_t>> by_col;
  for (std::size_t k = 0; k < obstacles.size(); ++k)
    by_col[static_cast<int>(std::floor((obstacles[k][0] + reach) / column))].push_back(k);
  const int span = static_cast<int>(std::ceil(clear / column)) + 1;
  auto near = [&](int c, auto&& fn) {
    for (int d = -span; d <= span + 1; ++d) {
      auto it = by_col.find(c + d);
      if (it == by_col.end()) continue;
      for (auto k : it->second)
        if (!fn(obstacles[k])) return false;
    }
    return true;
  };
  auto node_ok = [&](int c, int m) {
    if (previous && k_of(m) < (*previous)[c][1] + gap) return false;
    const std::array<long double, 2> p{t_of(c), k_of(m)};
    return near(c, [&](const auto& q) { return std::hypot(q[0] - p[0], q[1] - p[1]) > clear; });
  };
  auto edge_ok = [&](int c, int m0, int m1) {
    const std::array<long double, 2> a{t_of(c), k_of(m0)}, b{t_of(c + 1), k_of(m1)};
    return near(c, [&](const auto& q) { return detail::segment_distance(q, a, b) > clear; });
  };
  const int slope = std::max(1, static_cast<int>(std::floor(column / level)));
  std::vector<std::vector<char>> free(cols + 1, std::vector<char>(levels + 1));
  for (int c = 0; c <= cols; ++c)
    for (int m = 0; m <= levels; ++m) free[c][m] = node_ok(c, m);
  std::vector<std::vector<char>> fwd(cols + 1, std::vector<char>(levels + 1)), bwd = fwd;
  fwd[0] = free[0];
  for (int c = 0; c < cols; ++c)
    for (int m = 0; m <= levels; ++m) {
      if (!fwd[c][m]) continue;
      for (int d = -slope; d <= slope; ++d) {
        const int n = m + d;
        if (n < 0 || n > levels || !free[c + 1][n] || fwd[c + 1][n]) continue;
        if (edge_ok(c, m, n)) fwd[c + 1][n] = 1;
      }
    }
  bwd[cols] = fwd[cols];
  for (int c = cols; c > 0; --c)
    for (int m = 0; m <= levels; ++m) {
      if (!bwd[c][m]) continue;
      for (int d = -slope; d <= slope; ++d) {
        const int n = m + d;
        if (n < 0 || n > levels || !fwd[c - 1][n] || bwd[c - 1][n]) continue;
        if (edge_ok(c - 1, n, m)) bwd[c - 1][n] = 1;
      }
    }
  std::vector<std::array<double, 2>> path;
  int cur = -1;
  for (int c = 0; c <= cols; ++c) {
    int pick = -1;
    for (int m = 0; m <= levels && pick < 0; ++m) {
      if (!bwd[c][m]) continue;
      if (c > 0 && (std::abs(m - cur) > slope || !edge_ok(c - 1, cur, m))) continue;
      pick = m;
    }
    if (pick < 0) return std::nullopt;
    cur = pick;
    path.push_back({static_cast<double>(t_of(c)), static_cast<double>(k_of(cur))});
  }
  return path;
}

namespace detail {

class BandClassifier {
 public:
  BandClassifier(const Projection& proj, RoutingFrame frame, const std::vector<StepCurve>& curves, double column)
      : proj_(&proj), frame_(frame), curves_(&curves), column_(column) {
    for (const auto& c : curves) {
      std::vector<Vec2> bs;
      for (const auto& v : c.vertices) bs.push_back(plane_point_b(proj, v));
      b_.push_back(std::move(bs));
    }
  }

  int operator()(const Point4& z) const {
    const auto tk = frame_.tk(*proj_, z);
    int band = 0;
    for (std::size_t j = 0; j < curves_->size(); ++j)
      if (right_of(j, z, tk)) band = static_cast<int>(j) + 1;
    return band;
  }

  bool right_of(std::size_t j, const Point4& z, const std::array<long double, 2>& tk) const {
    const auto& path = (*curves_)[j].path;
    const long double t0 = path.front()[0];
    long s = static_cast<long>(std::floor((tk[0] - t0) / column_));
    if (s < 0 || s + 1 >= static_cast<long>(path.size())) throw std::logic_error("point beyond the step edge");
    const auto& a = path[s];
    const auto& b = path[s + 1];
    const long double est = (b[0] - a[0]) * (tk[1] - a[1]) - (b[1] - a[1]) * (tk[0] - a[0]);
    // kappa grows to the right, so est > 0 means right of the segment
    const long double mag = std::fabs(b[0] - a[0]) * (std::fabs(tk[1]) + std::fabs(a[1])) +
                            std::fabs(b[1] - a[1]) * (std::fabs(tk[0]) + std::fabs(a[0]));
    if (std::fabs(est) > 1e-6L * (1 + mag)) return est > 0;
    const Vec2& pa = b_[j][s];
    const Vec2& pb = b_[j][s + 1];
    const Vec2 bz = proj_->along(z);
    return sign(cross(Vec2{pb[0] - pa[0], pb[1] - pa[1]}, Vec2{bz[0] - pa[0], bz[1] - pa[1]})) < 0;
  }

 private:
  const Projection* proj_;
  RoutingFrame frame_;
  const std::vector<StepCurve>* curves_;
  double column_;
  std::vector<std::vector<Vec2>> b_;
};

}  // namespace detail

/// Builds a k-step staircase around the vertex nearest the offset: k step
/// edges routed between the flip lines, each clear of the flips of its step
/// by r + 3 (faces meeting a ball of diameter r that crosses the edge then
/// have all corners where both selections agree), band i selected by the
/// window of E + o + i s.
inline StepPatch build_staircase(const Slope& s, const Vec4& shift, const Rational& r, int k,
                                 const Rational& radius, const StaircaseOptions& opt = {}) {
  if (k < 1) throw std::invalid_argument("staircase needs at least one step");
  if (r < 0 || radius <= 0) throw std::invalid_argument("r and radius must be positive");
  const auto sps = find_subperiods(s);
  if (!opt.any_slope && count_types(sps) > 2)
    throw PreconditionError("staircase needs a slope with at most two subperiod types");
  Projection proj(s);
  Window window(proj);
  const Vec4 o = opt.offset ? *opt.offset : to_field(s.offset(), s.field());
  StepPatch out{TilingPatch{s, o, {}, radius, Region::Disk, {}, {}}};
  out.offset = o;
  out.shift = shift;
  out.r = r;
  out.clearance = r + 3;

  std::vector<Vec4> offsets{o};
  for (int i = 1; i <= k; ++i) offsets.push_back(offsets.back() + shift);
  const Rational reach_obs = radius + out.clearance + 8;
  std::vector<ShiftSet> flips;
  for (int i = 0; i < k; ++i) flips.push_back(shifted_points(s, shift, reach_obs, offsets[i]));

  // Line direction: the one type with subperiods whose flips are present.
  std::set<int> line_types;
  for (const auto& sp : sps)
    if (!flips[0].classes[sp.type - 1].empty()) line_types.insert(sp.type);
  if (line_types.size() > 1)
    throw PreconditionError("flip lines run in more than one direction; shift along e_i to remove type i");
  if (line_types.empty()) {
    out.direction = s.u();
  } else {
    out.line_type = *line_types.begin();
    for (const auto& sp : sps)
      if (sp.type == out.line_type) {
        out.direction = sp.lift ? *sp.lift : lift_subperiod(s, sp);
        break;
      }
  }

  Selector at_o(window, o);
  const Point4 center = nearest_selected(proj, o, at_o);
  detail::RoutingFrame frame;
  {
    const auto f0 = proj.frame(proj.along_approx(center));
    Approx2 bl{proj.along(out.direction)[0].approx(), proj.along(out.direction)[1].approx()};
    const auto fl = proj.frame(bl);
    const long double n = std::hypot(fl[0], fl[1]);
    frame.origin = {f0[0], f0[1]};
    frame.along = {fl[0] / n, fl[1] / n};
    frame.right = {frame.along[1], -frame.along[0]};
  }

  const long double clear = to_long_double(out.clearance);
  const long double reach = to_long_double(radius) + 8;
  const long double margin = 0.05L;
  const Vec2 bl = proj.along(out.direction);
  const detail::BallMetric<FieldElement> metric{proj.uu(), proj.uv(), proj.vv()};
  const FieldElement clear2det = FieldElement(out.clearance * out.clearance) * proj.det_gram();
  for (int j = 0; j < k; ++j) {
    std::vector<Point4> pts = flips[j].points;
    pts.insert(pts.end(), flips[j].leaving.begin(), flips[j].leaving.end());
    std::vector<std::array<long double, 2>> obstacles;
    for (const auto& z : pts) obstacles.push_back(frame.tk(proj, z));
    const auto* prev = j > 0 ? &out.curves.back().path : nullptr;
    auto path = route_corridor(obstacles, clear + margin, reach, -to_long_double(radius) / 2, prev, 2 * clear,
                               opt.column, opt.level);
    if (!path) throw RoutingFailure(j + 1, pts.size(), "every corridor is blocked within the disk");
    StepCurve curve;
    curve.path = *path;
    curve.obstacles = pts.size();
    for (const auto& tk : curve.path) {
      const long double t = tk[0], kap = tk[1];
      const std::array<long double, 2> f{frame.origin[0] + t * frame.along[0] + kap * frame.right[0],
                                         frame.origin[1] + t * frame.along[1] + kap * frame.right[1]};
      curve.vertices.push_back(detail::frame_to_plane(proj, f));
    }
    // Exact checks: monotone along the direction, clear of every flip.
    std::vector<Vec2> bv;
    for (const auto& v : curve.vertices) bv.push_back(detail::plane_point_b(proj, v));
    for (std::size_t a = 0; a + 1 < bv.size(); ++a) {
      const Vec2 d{bv[a + 1][0] - bv[a][0], bv[a + 1][1] - bv[a][1]};
      if (sign(proj.scaled_inner(d, bl)) <= 0) throw std::logic_error("step edge is not monotone");
      for (std::size_t q = 0; q < pts.size(); ++q) {
        if (detail::segment_distance(obstacles[q], {curve.path[a][0], curve.path[a][1]},
                                     {curve.path[a + 1][0], curve.path[a + 1][1]}) > clear + 1)
          continue;
        const Vec2 bz = proj.along(pts[q]);
        if (detail::segment_meets_ball(metric, Vec2{bv[a][0] - bz[0], bv[a][1] - bz[1]}, d, clear2det))
          throw RoutingFailure(j + 1, pts.size(), "exact clearance check failed");
      }
    }
    out.curves.push_back(std::move(curve));
  }

  std::vector<Selector> selectors;
  for (const auto& off : offsets) selectors.emplace_back(window, off);
  detail::BandClassifier classify(proj, frame, out.curves, opt.column);
  std::unordered_map<Point4, int, Point4Hash> band_memo;
  auto band_of = [&](const Point4& z) {
    auto it = band_memo.find(z);
    if (it != band_memo.end()) return it->second;
    const int b = classify(z);
    band_memo.emplace(z, b);
    return b;
  };
  auto selected = [&](const Point4& z) { return selectors[band_of(z)](z); };
  out.patch = assemble_patch(proj, o, selected, center, radius, Region::Disk);
  for (const auto& z : out.patch.vertices) out.band[z] = band_of(z);
  return out;
}

/// One-step staircase.
inline StepPatch build_step(const Slope& s, const Vec4& shift, const Rational& r, const Rational& radius,
                            const StaircaseOptions& opt = {}) {
  return build_staircase(s, shift, r, 1, radius, opt);
}

/// Thickness-1 tube test: every vertex z has w(z - offset) in the closed
/// window. The deviation is the largest window gauge (1 on the boundary).
struct TubeReport {
  bool pass = true;
  std::optional<Point4> violation;
  FieldElement deviation;
  Point4 farthest{};
};

inline TubeReport tube_test(const Slope& s, const Vec4& offset, const std::vector<Point4>& vertices) {
  Projection proj(s);
  Window window(proj);
  Selector sel(window, offset);
  TubeReport rep;
  rep.deviation = FieldElement(s.field(), Rational(0));
  // Floating gauge first; exact gauges only for near-maximal candidates.
  std::vector<long double> approx(vertices.size());
  long double best = -1;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const Point4& z = vertices[k];
    long double g = 0;
    for (int i = 0; i < 4; ++i) {
      const long double lo = sel.lower_form(i).approx(z), hi = sel.upper_form(i).approx(z);
      g = std::max(g, std::fabs((lo - hi) / (lo + hi)));
    }
    approx[k] = g;
    best = std::max(best, g);
    if (rep.pass)
      for (int i = 0; i < 4; ++i)
        if (sel.lower_form(i).sign(z) < 0 || sel.upper_form(i).sign(z) < 0) {
          rep.pass = false;
          rep.violation = z;
          break;
        }
  }
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (approx[k] < best - 1e-9L * (1 + best)) continue;
    const FieldElement g = sel.gauge(vertices[k]);
    if (sign(g - rep.deviation) > 0) rep.deviation = g, rep.farthest = vertices[k];
  }
  return rep;
}

struct NonPlanarityReport {
  TubeReport whole;                 // against E + o
  std::vector<TubeReport> own;      // band i against E + o + i s
  std::vector<FieldElement> deviation;  // band i against E + o
  bool increasing = true;

  bool pass() const {
    return !whole.pass && increasing &&
           std::all_of(own.begin(), own.end(), [](const TubeReport& t) { return t.pass; });
  }
};

inline NonPlanarityReport check_non_planarity(const StepPatch& sp) {
  const Slope& s = sp.patch.slope;
  NonPlanarityReport rep;
  std::vector<Point4> all(sp.patch.vertices.begin(), sp.patch.vertices.end());
  rep.whole = tube_test(s, sp.offset, all);
  Vec4 off = sp.offset;
  for (std::size_t i = 0; i <= sp.steps(); ++i) {
    std::vector<Point4> band;
    for (const auto& [z, b] : sp.band)
      if (b == static_cast<int>(i)) band.push_back(z);
    rep.own.push_back(tube_test(s, off, band));
    rep.deviation.push_back(tube_test(s, sp.offset, band).deviation);
    if (i > 0 && sign(rep.deviation[i] - rep.deviation[i - 1]) <= 0) rep.increasing = false;
    off = off + sp.shift;
  }
  return rep;
}

/// r-atlas of the staircase against the union of the r-atlases of planar
/// patches of the same radius through o + i s, i = 0..k.
struct AtlasInclusion {
  std::size_t staircase = 0, planar = 0;
  std::vector<Pattern> missing;
  bool included() const { return missing.empty(); }
};

inline AtlasInclusion check_atlas_inclusion(const StepPatch& sp) {
  const Slope& s = sp.patch.slope;
  AtlasInclusion rep;
  std::set<Pattern> planar;
  Vec4 off = sp.offset;
  for (std::size_t i = 0; i <= sp.steps(); ++i) {
    PatchOptions opt;
    opt.offset = off;
    auto atlas = r_atlas(generate_patch(s, sp.patch.radius, opt), sp.r);
    planar.insert(atlas.begin(), atlas.end());
    off = off + sp.shift;
  }
  const auto stair = r_atlas(sp.patch, sp.r);
  rep.staircase = stair.size();
  rep.planar = planar.size();
  for (const auto& p : stair)
    if (!planar.count(p)) rep.missing.push_back(p);
  return rep;
}

}  // namespace octa
