#pragma once

#include "octa/geometry.hpp"

#include <cstdio>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace octa {

/// Unit 2-face base + [0,1] e_i + [0,1] e_j; `pair` indexes kPairs.
struct Face {
  Point4 base{};
  int pair = 0;

  std::array<Point4, 4> corners() const {
    const auto [i, j] = kPairs[pair];
    return {base, base + unit(i - 1), base + unit(i - 1) + unit(j - 1), base + unit(j - 1)};
  }

  friend auto operator<=>(const Face&, const Face&) = default;
};

enum class Region { Disk, Square };

/// A lattice point landed exactly on the window boundary while generic
/// offsets were requested.
class BoundaryHit : public PreconditionError {
 public:
  BoundaryHit(Point4 point, RationalVec4 suggestion)
      : PreconditionError("lattice point projects onto the window boundary"), point(point),
        suggested_offset(std::move(suggestion)) {}
  Point4 point;
  RationalVec4 suggested_offset;
};

struct PatchOptions {
  /// Replaces the slope's rational offset (e.g. a shifted plane).
  std::optional<Vec4> offset;
  Region region = Region::Disk;
  /// Throw BoundaryHit instead of applying the half-open convention.
  bool reject_boundary = false;
  std::uint64_t seed = 1;
};

struct TilingPatch {
  Slope slope;
  Vec4 offset;
  Point4 center{};
  Rational radius;
  Region region = Region::Disk;
  std::set<Point4> vertices;
  std::vector<Face> faces;  // sorted
};

/// Region test around a lattice centre, exact with a floating filter.
class RegionTest {
 public:
  RegionTest(const Projection& proj, Point4 center, Rational radius, Region region)
      : proj_(&proj), center_(center), region_(region), r2_(radius * radius),
        r2f_(to_long_double(radius * radius)) {}

  bool operator()(const Point4& z) const {
    const Point4 d = z - center_;
    const Approx2 b = proj_->along_approx(d);
    if (region_ == Region::Disk) {
      // det M |pi(d)|^2 <= R^2 det M
      const long double val = proj_->scaled_inner(b, b) - r2f_ * proj_->det_gram_approx();
      const long double mag = magnitude(b) + r2f_ * std::fabs(proj_->det_gram_approx());
      return filtered_sign(val, mag * kRelError + 1e-30L, [&] {
               const Vec2 e = proj_->along(d);
               return proj_->scaled_inner(e, e) - proj_->det_gram() * FieldElement(r2_);
             }) <= 0;
    }
    // |t1| <= R and |t2| <= R in an orthonormal frame of E:
    // b1^2 <= R^2 uu and (uu b2 - uv b1)^2 <= R^2 uu det M
    const long double uu = proj_->uu().approx(), uv = proj_->uv().approx(), det = proj_->det_gram_approx();
    const long double t2 = uu * b[1] - uv * b[0];
    const long double v1 = b[0] * b[0] - r2f_ * uu, v2 = t2 * t2 - r2f_ * uu * det;
    const long double m1 = b[0] * b[0] + r2f_ * std::fabs(uu);
    const long double m2 = std::pow(std::fabs(uu * b[1]) + std::fabs(uv * b[0]), 2) + r2f_ * std::fabs(uu * det);
    auto exact = [&](int which) {
      const Vec2 e = proj_->along(d);
      const FieldElement r2(r2_);
      if (which == 1) return e[0] * e[0] - r2 * proj_->uu();
      FieldElement t = proj_->uu() * e[1] - proj_->uv() * e[0];
      return t * t - r2 * proj_->uu() * proj_->det_gram();
    };
    return filtered_sign(v1, m1 * kRelError + 1e-30L, [&] { return exact(1); }) <= 0 &&
           filtered_sign(v2, m2 * kRelError + 1e-30L, [&] { return exact(2); }) <= 0;
  }

  /// Floating radius-like size used to bound searches.
  long double approx_norm(const Point4& z) const {
    const Approx2 b = proj_->along_approx(z - center_);
    const auto f = proj_->frame(b);
    if (region_ == Region::Disk) return std::hypot(f[0], f[1]);
    return std::max(std::fabs(f[0]), std::fabs(f[1]));
  }

 private:
  long double magnitude(const Approx2& b) const {
    return std::fabs(proj_->vv().approx() * b[0] * b[0]) + 2 * std::fabs(proj_->uv().approx() * b[0] * b[1]) +
           std::fabs(proj_->uu().approx() * b[1] * b[1]);
  }

  const Projection* proj_;
  Point4 center_;
  Region region_;
  Rational r2_;
  long double r2f_;
};

/// The selected lattice point nearest (in E) to the offset; ties broken
/// lexicographically.
template <class Pred>
Point4 nearest_selected(const Projection& proj, const Vec4& offset, Pred&& selected) {
  Point4 base{};
  Approx2 ob{0, 0};
  for (int i = 0; i < 4; ++i) {
    base[i] = floor(offset[i]).template convert_to<std::int64_t>();
    ob[0] += proj.slope().u()[i].approx() * offset[i].approx();
    ob[1] += proj.slope().v()[i].approx() * offset[i].approx();
  }
  std::optional<Point4> best;
  long double best_d = 0;
  for (int k = 0; k < 2401; ++k) {
    Point4 z = base;
    int t = k;
    for (int i = 0; i < 4; ++i, t /= 7) z[i] += t % 7 - 3;
    if (!selected(z)) continue;
    Approx2 b = proj.along_approx(z);
    b[0] -= ob[0];
    b[1] -= ob[1];
    const long double d = proj.norm2(b);
    if (!best || d < best_d - 1e-12L || (std::fabs(d - best_d) <= 1e-12L && z < *best)) {
      best = z;
      best_d = d;
    }
  }
  if (!best) throw PreconditionError("no selected lattice point near the offset");
  return *best;
}

/// Lattice points reachable from `seed` through unit steps between
/// selected points, within `bound` (floating, in region units) of `region`'s
/// centre.
template <class Pred>
std::unordered_set<Point4, Point4Hash> flood_selected(const Point4& seed, Pred&& selected, const RegionTest& region,
                                                      long double bound) {
  std::unordered_set<Point4, Point4Hash> seen{seed}, accepted{seed};
  std::deque<Point4> queue{seed};
  while (!queue.empty()) {
    const Point4 z = queue.front();
    queue.pop_front();
    for (int i = 0; i < 4; ++i)
      for (int s : {1, -1}) {
        Point4 y = z;
        y[i] += s;
        if (!seen.insert(y).second) continue;
        if (region.approx_norm(y) > bound || !selected(y)) continue;
        accepted.insert(y);
        queue.push_back(y);
      }
  }
  return accepted;
}

/// Faces with four selected corners and at least one corner in the region,
/// plus their corners.
template <class Pred>
TilingPatch assemble_patch(const Projection& proj, const Vec4& offset, Pred&& selected, Point4 center,
                           const Rational& radius, Region region) {
  if (radius < 0) throw std::invalid_argument("radius must be nonnegative");
  RegionTest in_region(proj, center, radius, region);
  // Tiles have diameter at most 2 (|pi e_i| <= 1); the flood needs a margin
  // to reach every vertex of a face that touches the region.
  const long double bound = to_long_double(radius) + 6.0L;
  auto points = flood_selected(center, selected, in_region, bound);
  std::vector<Point4> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  TilingPatch patch{proj.slope(), offset, center, radius, region, {}, {}};
  for (const Point4& z : sorted) {
    for (int p = 0; p < 6; ++p) {
      Face f{z, p};
      auto cs = f.corners();
      bool all = true;
      for (int c = 1; c < 4 && all; ++c) all = points.count(cs[c]) > 0;
      if (!all) continue;
      bool touches = false;
      for (const auto& c : cs) touches = touches || in_region(c);
      if (!touches) continue;
      patch.faces.push_back(f);
      for (const auto& c : cs) patch.vertices.insert(c);
    }
  }
  std::sort(patch.faces.begin(), patch.faces.end());
  if (patch.vertices.empty()) patch.vertices.insert(center);
  return patch;
}

/// Deterministic small perturbation of a rational offset.
inline RationalVec4 perturbed_offset(const RationalVec4& offset, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> step(1, 997);
  RationalVec4 out = offset;
  for (int i = 0; i < 4; ++i) out[i] += Rational(step(rng), 1000003);
  return out;
}

/// Planar tiling of slope E through the offset, cut out by a disk (or
/// square) of the given radius in E around the vertex nearest the offset.
inline TilingPatch generate_patch(const Slope& s, const Rational& radius, const PatchOptions& opt = {}) {
  if (!is_irrational(grassmann(s))) throw PreconditionError("patch generation needs an irrational slope");
  Projection proj(s);
  Window window(proj);
  const Vec4 offset = opt.offset ? *opt.offset : to_field(s.offset(), s.field());
  Selector sel(window, offset);
  auto selected = [&](const Point4& z) {
    if (opt.reject_boundary && sel.on_boundary(z)) {
      RationalVec4 base = s.offset();
      if (opt.offset)
        for (int i = 0; i < 4; ++i) {
          if (!(*opt.offset)[i].is_rational()) throw BoundaryHit(z, s.offset());
          base[i] = (*opt.offset)[i].rational_part();
        }
      throw BoundaryHit(z, perturbed_offset(base, opt.seed));
    }
    return sel(z);
  };
  const Point4 center = nearest_selected(proj, offset, selected);
  return assemble_patch(proj, offset, selected, center, radius, opt.region);
}

/// Face counts per pair, in kPairs order.
inline std::array<std::size_t, 6> tile_frequencies(const TilingPatch& p) {
  std::array<std::size_t, 6> counts{};
  for (const auto& f : p.faces) ++counts[f.pair];
  return counts;
}

/// A finite set of faces up to translation, stored with its
/// lexicographically least base at the origin.
struct Pattern {
  std::vector<Face> faces;

  static Pattern canonical(std::vector<Face> faces) {
    std::sort(faces.begin(), faces.end());
    if (!faces.empty()) {
      const Point4 origin = faces.front().base;
      for (auto& f : faces) f.base = f.base - origin;
    }
    return Pattern{std::move(faces)};
  }

  friend auto operator<=>(const Pattern&, const Pattern&) = default;
};

namespace detail {

template <class T>
struct BallMetric {
  T uu, uv, vv;
  T inner(const std::array<T, 2>& a, const std::array<T, 2>& b) const {
    return vv * a[0] * b[0] - uv * (a[0] * b[1] + a[1] * b[0]) + uu * a[1] * b[1];
  }
};

template <class T>
int sign_of(const T& x) {
  if constexpr (std::is_same_v<T, long double>)
    return sgn(x);
  else
    return sign(x);
}

/// Whether the segment [p0, p0 + d] comes within sqrt(rho2det / det M) of
/// the origin (b-coordinates, inner products scaled by det M).
template <class T>
bool segment_meets_ball(const BallMetric<T>& m, const std::array<T, 2>& p0, const std::array<T, 2>& d,
                        const T& rho2det) {
  const std::array<T, 2> w{-p0[0], -p0[1]};
  const T wd = m.inner(w, d), dd = m.inner(d, d);
  if (sign_of(wd) <= 0) return sign_of(m.inner(w, w) - rho2det) <= 0;
  if (sign_of(wd - dd) >= 0) {
    const std::array<T, 2> q{w[0] - d[0], w[1] - d[1]};
    return sign_of(m.inner(q, q) - rho2det) <= 0;
  }
  return sign_of(m.inner(w, w) * dd - wd * wd - rho2det * dd) <= 0;
}

/// Whether the parallelogram a + [0,1] e + [0,1] f meets the closed ball.
template <class T>
bool parallelogram_meets_ball(const BallMetric<T>& m, const std::array<T, 2>& a, const std::array<T, 2>& e,
                              const std::array<T, 2>& f, const T& rho2det) {
  T den = e[0] * f[1] - e[1] * f[0];
  T sn = (-a[0]) * f[1] - (-a[1]) * f[0];
  T tn = e[0] * (-a[1]) - e[1] * (-a[0]);
  if (sign_of(den) < 0) {
    den = -den;
    sn = -sn;
    tn = -tn;
  }
  if (sign_of(sn) >= 0 && sign_of(sn - den) <= 0 && sign_of(tn) >= 0 && sign_of(tn - den) <= 0) return true;
  const std::array<T, 2> ae{a[0] + e[0], a[1] + e[1]}, af{a[0] + f[0], a[1] + f[1]};
  return segment_meets_ball(m, a, e, rho2det) || segment_meets_ball(m, a, f, rho2det) ||
         segment_meets_ball(m, ae, f, rho2det) || segment_meets_ball(m, af, e, rho2det);
}

/// Squared E-distance from the origin to the parallelogram, in floating
/// point.
inline long double parallelogram_distance2(const Projection& proj, const Approx2& a, const Approx2& e,
                                           const Approx2& f) {
  const long double det = proj.det_gram_approx();
  BallMetric<long double> m{proj.uu().approx(), proj.uv().approx(), proj.vv().approx()};
  long double den = cross(e, f), sn = cross(Approx2{-a[0], -a[1]}, f), tn = cross(e, Approx2{-a[0], -a[1]});
  if (den < 0) den = -den, sn = -sn, tn = -tn;
  if (sn >= 0 && sn <= den && tn >= 0 && tn <= den) return 0;
  auto seg = [&](const Approx2& p0, const Approx2& d) {
    const Approx2 w{-p0[0], -p0[1]};
    const long double wd = m.inner(w, d), dd = m.inner(d, d);
    const long double t = std::clamp(wd / dd, 0.0L, 1.0L);
    const Approx2 q{w[0] - t * d[0], w[1] - t * d[1]};
    return m.inner(q, q) / det;
  };
  const Approx2 ae{a[0] + e[0], a[1] + e[1]}, af{a[0] + f[0], a[1] + f[1]};
  return std::min({seg(a, e), seg(a, f), seg(ae, f), seg(af, e)});
}

}  // namespace detail

/// Whether face f meets the closed ball of radius rho around lattice point c
/// (distances in E).
inline bool face_meets_ball(const Projection& proj, const Face& f, const Point4& c, const Rational& rho) {
  const auto cs = f.corners();
  for (const auto& corner : cs)
    if (corner == c) return true;
  const auto [i, j] = kPairs[f.pair];
  const Approx2 a = proj.along_approx(f.base - c), e = proj.along_approx(unit(i - 1)), g = proj.along_approx(unit(j - 1));
  const long double d2 = detail::parallelogram_distance2(proj, a, e, g);
  const long double r2 = to_long_double(rho * rho);
  const long double tol = 1e-9L * (1 + r2);
  if (d2 > r2 + tol) return false;
  if (d2 < r2 - tol) return true;
  detail::BallMetric<FieldElement> m{proj.uu(), proj.uv(), proj.vv()};
  const Vec2 ax = proj.along(f.base - c), ex = proj.along(unit(i - 1)), gx = proj.along(unit(j - 1));
  return detail::parallelogram_meets_ball(m, ax, ex, gx, proj.det_gram() * FieldElement(rho * rho));
}

/// Spatial index of faces by the position of their centres in E.
class FaceIndex {
 public:
  FaceIndex(const Projection& proj, const std::vector<Face>& faces, double cell = 2.0) : proj_(&proj), cell_(cell) {
    for (std::size_t k = 0; k < faces.size(); ++k) cells_[key(center_of(faces[k]))].push_back(k);
  }

  /// Indices of faces whose centre lies within `reach` of lattice point c.
  std::vector<std::size_t> near(const Point4& c, double reach, const std::vector<Face>& faces) const {
    const auto p = proj_->frame(proj_->along_approx(c));
    const int span = static_cast<int>(std::ceil(reach / cell_));
    const auto k0 = key(p);
    std::vector<std::size_t> out;
    for (long dx = -span; dx <= span; ++dx)
      for (long dy = -span; dy <= span; ++dy) {
        auto it = cells_.find({k0.first + dx, k0.second + dy});
        if (it == cells_.end()) continue;
        for (auto k : it->second) {
          const auto q = center_of(faces[k]);
          if (std::hypot(q[0] - p[0], q[1] - p[1]) <= reach) out.push_back(k);
        }
      }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::array<double, 2> center_of(const Face& f) const {
    const auto [i, j] = kPairs[f.pair];
    Approx2 b = proj_->along_approx(f.base);
    const Approx2 e = proj_->along_approx(unit(i - 1) + unit(j - 1));
    b[0] += e[0] / 2;
    b[1] += e[1] / 2;
    return proj_->frame(b);
  }
  std::pair<long, long> key(const std::array<double, 2>& p) const {
    return {static_cast<long>(std::floor(p[0] / cell_)), static_cast<long>(std::floor(p[1] / cell_))};
  }

  const Projection* proj_;
  double cell_;
  std::map<std::pair<long, long>, std::vector<std::size_t>> cells_;
};

/// Vertices far enough inside the patch that every face meeting the ball of
/// diameter r around them belongs to the patch.
inline std::vector<Point4> atlas_centers(const TilingPatch& p, const Rational& r) {
  const Rational margin = p.radius - r / 2 - 2;
  std::vector<Point4> out;
  if (margin < 0) return out;
  Projection proj(p.slope);
  RegionTest inner(proj, p.center, margin, p.region);
  for (const auto& z : p.vertices)
    if (inner(z)) out.push_back(z);
  return out;
}

/// face_meets_ball for a fixed radius, memoized on the face position
/// relative to the centre (patterns repeat, so few distinct cases occur).
class BallTest {
 public:
  BallTest(const Projection& proj, Rational rho) : proj_(&proj), rho_(std::move(rho)) {}

  bool operator()(const Face& f, const Point4& c) {
    Point4 rel = f.base - c;
    Point4 key = rel;
    key[0] = key[0] * 8 + f.pair;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const bool hit = face_meets_ball(*proj_, Face{rel, f.pair}, Point4{}, rho_);
    memo_.emplace(key, hit);
    return hit;
  }

  const Rational& rho() const { return rho_; }

 private:
  const Projection* proj_;
  Rational rho_;
  std::unordered_map<Point4, bool, Point4Hash> memo_;
};

/// The r-map at vertex c: the faces meeting the closed ball of diameter r.
inline Pattern r_map(const TilingPatch& p, const FaceIndex& index, const Point4& c, BallTest& meets) {
  std::vector<Face> faces;
  for (auto k : index.near(c, to_long_double(meets.rho()) + 1.05, p.faces))
    if (meets(p.faces[k], c)) faces.push_back(p.faces[k]);
  return Pattern::canonical(std::move(faces));
}

inline Pattern r_map(const Projection& proj, const TilingPatch& p, const FaceIndex& index, const Point4& c,
                     const Rational& r) {
  BallTest meets(proj, r / 2);
  return r_map(p, index, c, meets);
}

/// All r-maps centred at interior vertices, up to translation.
inline std::set<Pattern> r_atlas(const TilingPatch& p, const Rational& r) {
  if (r < 0) throw std::invalid_argument("r must be nonnegative");
  auto centers = atlas_centers(p, r);
  if (centers.empty()) throw PreconditionError("patch too small for the requested r");
  Projection proj(p.slope);
  FaceIndex index(proj, p.faces);
  BallTest meets(proj, r / 2);
  std::set<Pattern> atlas;
  for (const auto& c : centers) atlas.insert(r_map(p, index, c, meets));
  return atlas;
}

inline const char* pair_color(int pair) {
  static const char* colors[6] = {"#e4572e", "#f3a712", "#a8c686", "#669bbc", "#29335c", "#8e5572"};
  return colors[pair];
}

/// Deterministic SVG drawing of the patch, E-coordinates in an orthonormal
/// frame centred on the patch centre.
inline std::string render_svg(const TilingPatch& p, double scale = 20.0) {
  Projection proj(p.slope);
  auto fmt = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    std::string s = buf;
    return s == "-0.0000" ? std::string("0.0000") : s;
  };
  std::vector<std::pair<int, std::vector<std::array<double, 2>>>> polys;
  double lo_x = 0, lo_y = 0, hi_x = 0, hi_y = 0;
  bool first = true;
  for (const auto& f : p.faces) {
    std::vector<std::array<double, 2>> pts;
    for (const auto& c : f.corners()) {
      auto q = proj.frame(proj.along_approx(c - p.center));
      q[0] *= scale;
      q[1] *= -scale;
      if (first) {
        lo_x = hi_x = q[0];
        lo_y = hi_y = q[1];
        first = false;
      }
      lo_x = std::min(lo_x, q[0]);
      hi_x = std::max(hi_x, q[0]);
      lo_y = std::min(lo_y, q[1]);
      hi_y = std::max(hi_y, q[1]);
      pts.push_back(q);
    }
    polys.emplace_back(f.pair, std::move(pts));
  }
  std::ostringstream os;
  const double pad = 2;
  const double w = first ? 1 : hi_x - lo_x + 2 * pad, h = first ? 1 : hi_y - lo_y + 2 * pad;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(first ? 0 : lo_x - pad) << ' '
     << fmt(first ? 0 : lo_y - pad) << ' ' << fmt(w) << ' ' << fmt(h) << "\" width=\"" << fmt(w) << "\" height=\""
     << fmt(h) << "\">\n";
  os << "<g stroke=\"#222222\" stroke-width=\"" << fmt(scale / 40) << "\" stroke-linejoin=\"round\">\n";
  for (const auto& [pair, pts] : polys) {
    os << "<polygon class=\"t" << pair_label(pair) << "\" fill=\"" << pair_color(pair) << "\" points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) os << (k ? " " : "") << fmt(pts[k][0]) << ',' << fmt(pts[k][1]);
    os << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace octa
