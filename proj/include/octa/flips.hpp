#pragma once

#include "octa/subperiod.hpp"
#include "octa/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace octa {

/// Raised when a shift is too large for the flips to split into thin
/// families; carries the offending lattice point.
class ShiftTooLarge : public PreconditionError {
 public:
  ShiftTooLarge(int type, Point4 point, const std::string& why)
      : PreconditionError("shift too large for type " + std::to_string(type) + ": " + why), type_(type),
        point_(point) {}
  int type() const { return type_; }
  const Point4& point() const { return point_; }

 private:
  int type_;
  Point4 point_;
};

/// Lattice points that enter the tiling when the slope's offset o moves to
/// o + s, within a disk of E around the vertex nearest o.
struct ShiftSet {
  Slope slope;
  Vec4 offset;
  Vec4 shift;
  Rational radius;
  Point4 center{};
  std::vector<Point4> points;                  // E(s), sorted
  std::array<std::vector<Point4>, 4> classes;  // E_1..E_4, sorted
  std::vector<Point4> leaving;                 // selected at o, not at o + s

  /// E(s) is the union of the four classes.
  bool covering_holds() const {
    std::set<Point4> u;
    for (const auto& c : classes) u.insert(c.begin(), c.end());
    return std::vector<Point4>(u.begin(), u.end()) == points;
  }
};

namespace detail {

// Vertices of the planar tiling through `offset` inside the exact region.
inline std::vector<Point4> region_vertices(const Projection& proj, const Selector& sel, const Vec4& offset,
                                           const RegionTest& region, const Rational& radius) {
  const Point4 seed = nearest_selected(proj, offset, sel);
  auto pts = flood_selected(seed, sel, region, to_long_double(radius) + 6.0L);
  std::vector<Point4> out;
  for (const auto& z : pts)
    if (region(z)) out.push_back(z);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Enumerates E(s) exactly and splits it into E_i, the points selected at
/// o + s that lie outside slab i (that is, outside W + R c_i) at o. Each
/// nonempty class is checked for the thin-sliver property: measured along
/// c_i in the basis (c_i, w(s)), its window images span less than 2, so
/// two points of E_i differ by a lift correction k e_i with k in {0, 1}.
inline ShiftSet shifted_points(const Slope& s, const Vec4& shift, const Rational& radius,
                               std::optional<Vec4> offset = std::nullopt) {
  if (radius < 0) throw std::invalid_argument("radius must be nonnegative");
  Projection proj(s);
  Window window(proj);
  const Vec4 o = offset ? *offset : to_field(s.offset(), s.field());
  const Vec4 os = o + shift;
  Selector at_o(window, o), at_s(window, os);
  ShiftSet ss{s, o, shift, radius, nearest_selected(proj, o, at_o), {}, {}, {}};
  RegionTest region(proj, ss.center, radius, Region::Disk);

  const auto before = detail::region_vertices(proj, at_o, o, region, radius);
  const auto after = detail::region_vertices(proj, at_s, os, region, radius);
  for (const auto& z : after)
    if (!at_o(z)) ss.points.push_back(z);
  for (const auto& z : before)
    if (!at_s(z)) ss.leaving.push_back(z);
  for (const auto& z : ss.points)
    for (int i = 0; i < 4; ++i)
      if (!at_o.in_slab(i, z)) ss.classes[i].push_back(z);
  if (!ss.covering_holds()) throw std::logic_error("flip classes do not cover E(s)");

  const Vec2 sigma = proj.perp(shift);
  const Vec2 base = proj.perp(o);
  for (int i = 0; i < 4; ++i) {
    if (ss.classes[i].empty()) continue;
    const FieldElement den = cross(proj.column(i), sigma);
    if (den.is_zero()) throw std::logic_error("class nonempty for a shift along its direction");
    std::optional<FieldElement> lo, hi;
    Point4 lo_pt{}, hi_pt{};
    for (const auto& z : ss.classes[i]) {
      const Vec2 w = proj.perp(to_field(z, s.field()));
      const FieldElement eta = cross(Vec2{w[0] - base[0], w[1] - base[1]}, sigma) / den;
      if (!lo || sign(eta - *lo) < 0) lo = eta, lo_pt = z;
      if (!hi || sign(eta - *hi) > 0) hi = eta, hi_pt = z;
    }
    if (sign(*hi - *lo - FieldElement(Rational(2))) >= 0)
      throw ShiftTooLarge(i + 1, hi_pt, "class spreads over two or more unit steps along its direction");
  }
  return ss;
}

/// One structure check for one class E_i.
struct ClauseReport {
  int type = 0;           // i
  int clause = 0;         // number of type-i subperiods, capped at 2
  bool pass = true;
  std::size_t size = 0;   // |E_i|
  std::size_t lines = 0;  // clause 1: number of line clusters
  double min_distance = 0;  // clause 0: min pairwise distance; clause 1: min line spacing
  std::vector<Point4> witnesses;
  std::string message;
};

struct StructureReport {
  std::array<ClauseReport, 4> clauses;
  bool pass() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const ClauseReport& c) { return c.pass; });
  }
};

namespace detail {

// Pairs differing by a multiple of e_i are one flip site (the k e_i
// correction) and are not compared.
inline ClauseReport check_sparse(const Projection& proj, const std::vector<Point4>& pts, int type,
                                 const Rational& r) {
  ClauseReport rep;
  rep.min_distance = std::numeric_limits<double>::infinity();
  const long double rf = to_long_double(r);
  const long double cell = std::max(rf, 1.0L);
  std::map<std::pair<long, long>, std::vector<std::size_t>> grid;
  std::vector<std::array<double, 2>> xy;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    xy.push_back(proj.frame(proj.along_approx(pts[k])));
    grid[{std::lround(std::floor(xy[k][0] / cell)), std::lround(std::floor(xy[k][1] / cell))}].push_back(k);
  }
  const FieldElement r2det = FieldElement(r * r) * proj.det_gram();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const long gx = std::lround(std::floor(xy[k][0] / cell)), gy = std::lround(std::floor(xy[k][1] / cell));
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = grid.find({gx + dx, gy + dy});
        if (it == grid.end()) continue;
        for (std::size_t l : it->second) {
          if (l <= k) continue;
          Point4 diff = pts[k] - pts[l];
          diff[type - 1] = 0;
          if (diff == Point4{}) continue;
          const double d = std::hypot(xy[k][0] - xy[l][0], xy[k][1] - xy[l][1]);
          rep.min_distance = std::min(rep.min_distance, d);
          if (d > rf + 1e-6) continue;
          const Vec2 b = proj.along(pts[k] - pts[l]);
          if (sign(proj.scaled_inner(b, b) - r2det) < 0 && rep.pass) {
            rep.pass = false;
            rep.witnesses = {pts[k], pts[l]};
            rep.message = "two points closer than r";
          }
        }
      }
  }
  return rep;
}

inline ClauseReport check_lines(const Projection& proj, const std::vector<Point4>& pts, const Vec4& lift,
                                const Rational& r) {
  ClauseReport rep;
  rep.min_distance = std::numeric_limits<double>::infinity();
  const Vec2 bl = proj.along(lift);
  const FieldElement dd = proj.scaled_inner(bl, bl);  // det M |L|^2
  const long double scale = std::sqrt(dd.approx());
  struct Item {
    long double t;
    FieldElement kappa;
    Point4 z;
  };
  std::vector<Item> items;
  for (const auto& z : pts) {
    const FieldElement kappa = cross(proj.along(z), bl);
    items.push_back({kappa.approx() / scale, kappa, z});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.t < b.t; });
  std::vector<std::pair<std::size_t, std::size_t>> clusters;  // [first, last]
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k == 0 || items[k].t - items[k - 1].t > 2)
      clusters.push_back({k, k});
    else
      clusters.back().second = k;
  }
  rep.lines = clusters.size();
  const FieldElement four_dd = dd.scaled(Rational(4));
  const FieldElement r2dd = dd * FieldElement(r * r);
  std::optional<FieldElement> prev;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const auto& lo = items[clusters[c].first];
    const auto& hi = items[clusters[c].second];
    const FieldElement spread = hi.kappa - lo.kappa;
    if (sign(spread * spread - four_dd) > 0 && rep.pass) {
      rep.pass = false;
      rep.witnesses = {lo.z, hi.z};
      rep.message = "points of one line spread wider than 2";
    }
    const FieldElement centre = (hi.kappa + lo.kappa).scaled(Rational(1, 2));
    if (prev) {
      const FieldElement gap = centre - *prev;
      rep.min_distance = std::min(rep.min_distance, static_cast<double>(gap.approx() / scale));
      if (sign(gap * gap - r2dd) < 0 && rep.pass) {
        rep.pass = false;
        rep.witnesses = {items[clusters[c - 1].second].z, lo.z};
        rep.message = "consecutive lines closer than r";
      }
    }
    prev = centre;
  }
  return rep;
}

inline ClauseReport check_lattice(const Projection& proj, const std::vector<Point4>& pts, int type) {
  ClauseReport rep;
  if (pts.empty()) return rep;
  const int i = type - 1;
  std::array<int, 2> jk{};
  for (int m = 0, n = 0; m < 4 && n < 2; ++m)
    if (m != i) jk[n++] = m;
  const auto& u = proj.slope().u();
  const auto& v = proj.slope().v();
  const FieldElement det = u[jk[0]] * v[jk[1]] - u[jk[1]] * v[jk[0]];
  Matrix<Rational> diffs(0, 3);
  const Point4 x0 = pts.front();
  
  for (const auto& z : pts) {
    const Point4 d = z - x0;
    std::vector<Rational> row;
    for (int m = 0; m < 4; ++m)
      if (m != i) row.push_back(Rational(d[m]));
    diffs.append_row(row);
    // Point of E with the same j and k entries as d.
    const FieldElement dj{Rational(d[jk[0]])}, dk{Rational(d[jk[1]])};
    const FieldElement lambda = (dj * v[jk[1]] - dk * v[jk[0]]) / det;
    const FieldElement mu = (u[jk[0]] * dk - u[jk[1]] * dj) / det;
    Vec4 ell;
    for (int m = 0; m < 4; ++m) ell[m] = lambda * u[m] + mu * v[m];
    const Vec2 bd = proj.along(d), be = proj.along(ell);
    const Vec2 diff{bd[0] - be[0], bd[1] - be[1]};
    if (sign(proj.scaled_inner(diff, diff) - proj.det_gram()) > 0 && rep.pass) {
      rep.pass = false;
      rep.witnesses = {x0, z};
      rep.message = "point farther than 1 from the lattice";
    }
  }
  if (rank(diffs) > 2) {
    rep.pass = false;
    rep.message = "differences have rank above 2";
  }
  return rep;
}

}  // namespace detail

/// Checks each class E_i against the clause for its number of type-i
/// subperiods: none, points pairwise at least r apart (up to multiples of
/// e_i); one, points within 1 of parallel lines directed by the
/// subperiod's lift, consecutive lines at least r apart; two, points within
/// 1 of a rank-2 lattice.
inline StructureReport verify_structure(const ShiftSet& ss, const std::vector<Subperiod>& subperiods,
                                        const Rational& r) {
  Projection proj(ss.slope);
  StructureReport out;
  for (int i = 0; i < 4; ++i) {
    std::vector<const Subperiod*> own;
    for (const auto& sp : subperiods)
      if (sp.type == i + 1) own.push_back(&sp);
    const auto& pts = ss.classes[i];
    ClauseReport rep;
    if (own.empty()) {
      rep = detail::check_sparse(proj, pts, i + 1, r);
    } else if (own.size() == 1) {
      const Vec4 lift = own[0]->lift ? *own[0]->lift : lift_subperiod(ss.slope, *own[0]);
      rep = detail::check_lines(proj, pts, lift, r);
    } else {
      rep = detail::check_lattice(proj, pts, i + 1);
    }
    rep.type = i + 1;
    rep.clause = static_cast<int>(std::min<std::size_t>(own.size(), 2));
    rep.size = pts.size();
    out.clauses[i] = rep;
  }
  return out;
}

}  // namespace octa
