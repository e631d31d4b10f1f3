#include "octa/tiling.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

using namespace octa;
using namespace octa::testing;

namespace {

using D2 = std::array<double, 2>;

// Floating reimplementation of the window: orthonormal basis of E^perp by
// Gram-Schmidt, hull of the 16 projected cube vertices.
struct FloatWindow {
  std::array<std::array<double, 4>, 2> basis{};
  std::vector<D2> hull;

  explicit FloatWindow(const Slope& s) {
    std::vector<std::array<double, 4>> vs;
    auto orthogonalize = [&vs](std::array<double, 4> x) {
      for (const auto& b : vs) {
        double d = 0, n = 0;
        for (int i = 0; i < 4; ++i) d += x[i] * b[i], n += b[i] * b[i];
        for (int i = 0; i < 4; ++i) x[i] -= d / n * b[i];
      }
      double n = 0;
      for (double c : x) n += c * c;
      if (n > 1e-6) vs.push_back(x);
    };
    for (const Vec4* w : {&s.u(), &s.v()}) {
      std::array<double, 4> x{};
      for (int i = 0; i < 4; ++i) x[i] = static_cast<double>((*w)[i].approx());
      orthogonalize(x);
    }
    for (int k = 0; k < 4 && vs.size() < 4; ++k) {
      std::array<double, 4> x{};
      x[k] = 1;
      orthogonalize(x);
    }
    basis = {vs[2], vs[3]};
    std::vector<D2> pts;
    for (int m = 0; m < 16; ++m) {
      std::array<double, 4> c{};
      for (int i = 0; i < 4; ++i) c[i] = m >> i & 1;
      pts.push_back(project(c));
    }
    std::sort(pts.begin(), pts.end());
    auto turn = [](D2 o, D2 a, D2 b) { return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]); };
    for (int pass = 0; pass < 2; ++pass) {
      const std::size_t start = hull.size();
      for (std::size_t k = 0; k < pts.size(); ++k) {
        D2 p = pass == 0 ? pts[k] : pts[pts.size() - 1 - k];
        while (hull.size() >= start + 2 && turn(hull[hull.size() - 2], hull.back(), p) <= 1e-12) hull.pop_back();
        hull.push_back(p);
      }
      hull.pop_back();
    }
  }

  D2 project(const std::array<double, 4>& x) const {
    D2 out{};
    for (int r = 0; r < 2; ++r) {
      double n = 0, d = 0;
      for (int i = 0; i < 4; ++i) d += x[i] * basis[r][i], n += basis[r][i] * basis[r][i];
      out[r] = d / std::sqrt(n);
    }
    return out;
  }

  // +1 inside, -1 outside, 0 too close to call.
  int classify(const std::array<double, 4>& x) const {
    D2 p = project(x);
    double worst = 1e9;
    for (std::size_t k = 0; k < hull.size(); ++k) {
      D2 a = hull[k], b = hull[(k + 1) % hull.size()];
      double len = std::hypot(b[0] - a[0], b[1] - a[1]);
      worst = std::min(worst, ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) / len);
    }
    if (worst > 1e-9) return 1;
    if (worst < -1e-9) return -1;
    return 0;
  }
};

RationalVec4 generic_offset() { return {q("1/7"), q("2/9"), q("3/11"), q("5/13")}; }

// Angle sum around each interior vertex is 2 pi, and every edge with an
// interior endpoint borders exactly two faces on opposite sides.
void expect_proper_tiling(const TilingPatch& p, const Rational& inner_radius) {
  Projection proj(p.slope);
  RegionTest inner(proj, p.center, inner_radius, p.region);
  std::map<Point4, double> angle;
  std::map<std::pair<Point4, Point4>, std::vector<int>> edge_side;
  for (const auto& f : p.faces) {
    auto cs = f.corners();
    std::array<std::array<double, 2>, 4> q;
    for (int k = 0; k < 4; ++k) q[k] = proj.frame(proj.along_approx(cs[k]));
    double orient = 0;
    for (int k = 0; k < 4; ++k) {
      auto a = q[k], b = q[(k + 1) % 4], c = q[(k + 3) % 4];
      double ang = std::acos(std::clamp(((b[0] - a[0]) * (c[0] - a[0]) + (b[1] - a[1]) * (c[1] - a[1])) /
                                            (std::hypot(b[0] - a[0], b[1] - a[1]) * std::hypot(c[0] - a[0], c[1] - a[1])),
                                        -1.0, 1.0));
      angle[cs[k]] += ang;
      orient += a[0] * b[1] - a[1] * b[0];
    }
    for (int k = 0; k < 4; ++k) {
      Point4 a = cs[k], b = cs[(k + 1) % 4];
      int side = orient > 0 ? 1 : -1;
      if (b < a) std::swap(a, b), side = -side;
      edge_side[{a, b}].push_back(side);
    }
  }
  int interior = 0;
  for (const auto& [z, total] : angle) {
    if (!inner(z)) continue;
    ++interior;
    EXPECT_NEAR(total, 2 * std::numbers::pi, 1e-9) << "vertex angle sum";
  }
  EXPECT_GT(interior, 0);
  for (const auto& [e, sides] : edge_side) {
    if (!inner(e.first) || !inner(e.second)) continue;
    ASSERT_EQ(sides.size(), 2u);
    EXPECT_EQ(sides[0] + sides[1], 0);
  }
}

}  // namespace

TEST(Window, AmmannBeenkerOctagon) {
  auto s = ammann_beenker();
  Projection proj(s);
  Window w(proj);
  ASSERT_EQ(w.vertices().size(), 8u);
  // central symmetry about the projection of (1/2,1/2,1/2,1/2)
  auto c = w.center();
  for (std::size_t k = 0; k < 8; ++k) {
    const auto& a = w.vertices()[k];
    const auto& b = w.vertices()[(k + 4) % 8];
    EXPECT_EQ(a[0] + b[0], c[0] + c[0]);
    EXPECT_EQ(a[1] + b[1], c[1] + c[1]);
  }
}

TEST(Window, Fig4OctagonMatchesFloatHull) {
  Slope s = fig4();
  Projection proj(s);
  Window w(proj);
  FloatWindow fw(s);
  EXPECT_EQ(w.vertices().size(), 8u);
  EXPECT_EQ(fw.hull.size(), 8u);
  // convex and counter-clockwise
  const auto& v = w.vertices();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto &a = v[k], &b = v[(k + 1) % v.size()], &c = v[(k + 2) % v.size()];
    EXPECT_GT(sign(cross(Vec2{b[0] - a[0], b[1] - a[1]}, Vec2{c[0] - b[0], c[1] - b[1]})), 0);
  }
}

TEST(Window, CoordinatePlaneRejected) {
  FieldDescriptor f;
  Slope s(f, {FieldElement(1), FieldElement(0), FieldElement(0), FieldElement(0)},
          {FieldElement(0), FieldElement(1), FieldElement(0), FieldElement(0)});
  Projection proj(s);
  EXPECT_THROW(Window{proj}, PreconditionError);
}

TEST(Selector, AgreesWithFloatWindow) {
  for (const Slope& s : {ammann_beenker(generic_offset()), fig4(generic_offset())}) {
    Projection proj(s);
    Window w(proj);
    Selector sel(w, to_field(s.offset(), s.field()));
    FloatWindow fw(s);
    int inside = 0;
    for (int k = 0; k < 9 * 9 * 9 * 9; ++k) {
      Point4 z;
      int t = k;
      for (int i = 0; i < 4; ++i, t /= 9) z[i] = t % 9 - 4;
      std::array<double, 4> x;
      for (int i = 0; i < 4; ++i) x[i] = static_cast<double>(z[i]) - s.offset()[i].convert_to<double>();
      int c = fw.classify(x);
      if (c == 0) continue;
      EXPECT_EQ(sel(z), c > 0);
      inside += c > 0;
    }
    EXPECT_GT(inside, 0);
  }
}

TEST(Selector, ZeroOffsetHitsBoundary) {
  auto s = ammann_beenker();
  EXPECT_THROW(generate_patch(s, Rational(3), PatchOptions{.reject_boundary = true}), BoundaryHit);
  try {
    generate_patch(s, Rational(3), PatchOptions{.reject_boundary = true, .seed = 5});
  } catch (const BoundaryHit& hit) {
    // the suggestion is deterministic and usable
    auto again = generate_patch(s.with_offset(hit.suggested_offset), Rational(3), PatchOptions{.reject_boundary = true});
    EXPECT_FALSE(again.faces.empty());
    try {
      generate_patch(s, Rational(3), PatchOptions{.reject_boundary = true, .seed = 5});
    } catch (const BoundaryHit& second) {
      EXPECT_EQ(second.suggested_offset, hit.suggested_offset);
    }
  }
  // half-open convention still yields a tiling
  auto p = generate_patch(s, Rational(8));
  expect_proper_tiling(p, Rational(5));
}

TEST(GeneratePatch, RadiusZeroIsVertexStar) {
  auto s = ammann_beenker(generic_offset());
  auto p = generate_patch(s, Rational(0));
  EXPECT_GE(p.faces.size(), 3u);
  EXPECT_LE(p.faces.size(), 8u);
  for (const auto& f : p.faces) {
    auto cs = f.corners();
    EXPECT_TRUE(std::find(cs.begin(), cs.end(), p.center) != cs.end());
  }
  // brute force in the 3^4 box around the centre
  FloatWindow fw(s);
  auto sel = [&](const Point4& z) {
    std::array<double, 4> x;
    for (int i = 0; i < 4; ++i) x[i] = static_cast<double>(z[i]) - s.offset()[i].convert_to<double>();
    return fw.classify(x) > 0;
  };
  std::size_t star = 0;
  for (int k = 0; k < 81; ++k) {
    Point4 d;
    int t = k;
    for (int i = 0; i < 4; ++i, t /= 3) d[i] = t % 3 - 1;
    for (int pr = 0; pr < 6; ++pr) {
      Face f{p.center + d, pr};
      auto cs = f.corners();
      if (std::find(cs.begin(), cs.end(), p.center) == cs.end()) continue;
      bool all = true;
      for (const auto& c : cs) all = all && sel(c);
      star += all;
    }
  }
  EXPECT_EQ(star, p.faces.size());
}

TEST(GeneratePatch, ProperTilingAndPlanarity) {
  for (const Slope& s : {ammann_beenker(generic_offset()), fig4(generic_offset())}) {
    auto p = generate_patch(s, Rational(12));
    expect_proper_tiling(p, Rational(9));
    Projection proj(s);
    Window w(proj);
    Selector sel(w, to_field(s.offset(), s.field()));
    for (const auto& z : p.vertices) {
      Vec2 pt = proj.perp(to_field(z, s.field()) + scaled(to_field(s.offset(), s.field()), Rational(-1)));
      EXPECT_TRUE(w.contains(pt));
      EXPECT_TRUE(sel(z));
    }
  }
}

TEST(GeneratePatch, RejectsRationalSlope) {
  EXPECT_THROW(generate_patch(rational_plane(), Rational(3)), PreconditionError);
}

TEST(GeneratePatch, SquareRegion) {
  auto s = ammann_beenker(generic_offset());
  auto disk = generate_patch(s, Rational(6));
  auto square = generate_patch(s, Rational(6), PatchOptions{.region = Region::Square});
  EXPECT_GT(square.faces.size(), disk.faces.size());
  expect_proper_tiling(square, Rational(4));
}

TEST(Frequencies, AmmannBeenkerRhombiPerSquare) {
  auto p = generate_patch(ammann_beenker(generic_offset()), Rational(20));
  auto c = tile_frequencies(p);
  // squares are T13 and T24
  const double squares = static_cast<double>(c[1] + c[4]);
  const double rhombi = static_cast<double>(c[0] + c[2] + c[3] + c[5]);
  EXPECT_NEAR(rhombi / squares, std::sqrt(2.0), 0.1);
}

TEST(Frequencies, GenericSlopeFollowsGrassmann) {
  Slope s = fig4(generic_offset());
  auto p = generate_patch(s, Rational(60));
  auto c = tile_frequencies(p);
  auto g = grassmann(s);
  double total_g = 0, total_c = 0;
  for (int k = 0; k < 6; ++k) total_g += std::fabs(static_cast<double>(g[k].approx())), total_c += c[k];
  for (int k = 0; k < 6; ++k) {
    double expected = std::fabs(static_cast<double>(g[k].approx())) / total_g;
    EXPECT_NEAR(c[k] / total_c, expected, 0.05 * expected) << pair_label(k);
  }
}

TEST(Frequencies, PermutingAxesPermutesCounts) {
  auto s = ammann_beenker(generic_offset());
  const std::array<int, 4> perm{2, 0, 3, 1};  // new axis k is old axis perm[k]
  Vec4 u, v;
  RationalVec4 o;
  for (int k = 0; k < 4; ++k) u[k] = s.u()[perm[k]], v[k] = s.v()[perm[k]], o[k] = s.offset()[perm[k]];
  Slope t(s.field(), u, v, o);
  auto a = tile_frequencies(generate_patch(s, Rational(10)));
  auto b = tile_frequencies(generate_patch(t, Rational(10)));
  for (int k = 0; k < 6; ++k) {
    auto [i, j] = kPairs[k];
    EXPECT_EQ(b[k], a[pair_index(perm[i - 1] + 1, perm[j - 1] + 1)]);
  }
}

TEST(Atlas, VertexStarsAreFinite) {
  auto p = generate_patch(ammann_beenker(generic_offset()), Rational(25));
  auto atlas = r_atlas(p, Rational(0));
  EXPECT_GE(atlas.size(), 6u);
  EXPECT_LE(atlas.size(), 60u);
  for (const auto& pat : atlas) {
    EXPECT_GE(pat.faces.size(), 3u);
    EXPECT_LE(pat.faces.size(), 8u);
    EXPECT_EQ(pat.faces.front().base, (Point4{0, 0, 0, 0}));
  }
}

TEST(Atlas, MonotoneInR) {
  auto p = generate_patch(ammann_beenker(generic_offset()), Rational(16));
  Projection proj(p.slope);
  FaceIndex index(proj, p.faces);
  // The ball of diameter 1 lies in the ball of diameter 2 at the same centre.
  for (const auto& c : atlas_centers(p, Rational(2))) {
    std::vector<Face> raw_small, raw_big;
    for (auto k : index.near(c, 3.0, p.faces)) {
      if (face_meets_ball(proj, p.faces[k], c, Rational(1, 2))) raw_small.push_back(p.faces[k]);
      if (face_meets_ball(proj, p.faces[k], c, Rational(1))) raw_big.push_back(p.faces[k]);
    }
    for (const auto& f : raw_small) EXPECT_TRUE(std::find(raw_big.begin(), raw_big.end(), f) != raw_big.end());
  }
}

TEST(Atlas, TooSmallPatch) {
  auto p = generate_patch(ammann_beenker(generic_offset()), Rational(2));
  EXPECT_THROW(r_atlas(p, Rational(2)), PreconditionError);
}

TEST(Svg, DeterministicAndEmpty) {
  auto s = ammann_beenker(generic_offset());
  auto a = render_svg(generate_patch(s, Rational(5)));
  auto b = render_svg(generate_patch(s, Rational(5)));
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("<polygon"), std::string::npos);
  TilingPatch empty{s, to_field(s.offset(), s.field()), {}, Rational(0), Region::Disk, {}, {}};
  auto e = render_svg(empty);
  EXPECT_EQ(e.find("<polygon"), std::string::npos);
  EXPECT_NE(e.find("</svg>"), std::string::npos);
}
