#include "octa/staircase.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace octa;
using namespace octa::testing;

namespace {

RationalVec4 generic_offset() { return {q("1/7"), q("2/9"), q("3/11"), q("5/13")}; }

Vec4 e4_shift(const Slope& s, long d) { return to_field(RationalVec4{0, 0, 0, Rational(1, d)}, s.field()); }

const StepPatch& three_steps() {
  static const StepPatch sp = [] {
    const auto s = fig4(generic_offset());
    return build_staircase(s, e4_shift(s, 160), Rational(2), 3, Rational(50));
  }();
  return sp;
}

}  // namespace

TEST(RouteCorridor, AvoidsObstaclesAndStaysRightOfPrevious) {
  std::vector<std::array<long double, 2>> obstacles{{0, 0}, {5, 3}, {-4, -2}};
  auto first = route_corridor(obstacles, 2, 10, -5, nullptr, 0, 1.0, 0.5);
  ASSERT_TRUE(first);
  for (std::size_t c = 0; c + 1 < first->size(); ++c)
    for (const auto& q : obstacles)
      EXPECT_GT(detail::segment_distance(q, {(*first)[c][0], (*first)[c][1]}, {(*first)[c + 1][0], (*first)[c + 1][1]}),
                2);
  auto second = route_corridor(obstacles, 2, 10, -5, &*first, 3, 1.0, 0.5);
  ASSERT_TRUE(second);
  for (std::size_t c = 0; c < second->size(); ++c) EXPECT_GE((*second)[c][1], (*first)[c][1] + 3);
  // a wall of obstacles across the disk blocks every corridor
  std::vector<std::array<long double, 2>> wall;
  for (int t = -12; t <= 12; ++t) wall.push_back({static_cast<long double>(t), 0});
  for (int k = -6; k <= 12; ++k) wall.push_back({0, static_cast<long double>(k)});
  EXPECT_FALSE(route_corridor(wall, 2, 10, -5, nullptr, 0, 1.0, 0.5));
}

TEST(Staircase, OneStepLeftIsUnshiftedRightIsShifted) {
  const auto s = fig4(generic_offset());
  const auto shift = e4_shift(s, 160);
  auto step = build_step(s, shift, Rational(2), Rational(30));
  ASSERT_EQ(step.steps(), 1u);
  Projection proj(s);
  Window w(proj);
  Selector at_o(w, step.offset), at_s(w, step.offset + shift);
  std::size_t left = 0, right = 0;
  for (const auto& [z, b] : step.band) {
    if (b == 0) {
      EXPECT_TRUE(at_o(z));
      ++left;
    } else {
      EXPECT_TRUE(at_s(z));
      ++right;
    }
  }
  EXPECT_GT(left, 0u);
  EXPECT_GT(right, 0u);
  // each side is a piece of the planar patch with the same centre
  auto planar_o = assemble_patch(proj, step.offset, at_o, step.patch.center, Rational(30), Region::Disk);
  auto planar_s = assemble_patch(proj, step.offset + shift, at_s, step.patch.center, Rational(30), Region::Disk);
  std::set<Face> faces_o(planar_o.faces.begin(), planar_o.faces.end());
  std::set<Face> faces_s(planar_s.faces.begin(), planar_s.faces.end());
  for (const auto& [z, b] : step.band) EXPECT_TRUE((b == 0 ? planar_o : planar_s).vertices.count(z));
  for (const auto& f : step.patch.faces) {
    std::set<int> sides;
    for (const auto& c : f.corners()) sides.insert(step.band.at(c));
    if (sides == std::set<int>{0}) EXPECT_TRUE(faces_o.count(f));
    if (sides == std::set<int>{1}) EXPECT_TRUE(faces_s.count(f));
    if (sides.size() == 2) EXPECT_TRUE(faces_o.count(f) && faces_s.count(f));
  }
}

TEST(Staircase, EdgesAreClearOfFlips) {
  const auto& sp = three_steps();
  Projection proj(sp.patch.slope);
  const detail::BallMetric<FieldElement> m{proj.uu(), proj.uv(), proj.vv()};
  const FieldElement c2 = FieldElement(sp.clearance * sp.clearance) * proj.det_gram();
  Vec4 off = sp.offset;
  for (const auto& curve : sp.curves) {
    auto ss = shifted_points(sp.patch.slope, sp.shift, sp.patch.radius + 8, off);
    std::vector<Point4> flips = ss.points;
    flips.insert(flips.end(), ss.leaving.begin(), ss.leaving.end());
    for (std::size_t a = 0; a + 1 < curve.vertices.size(); ++a) {
      const Vec2 pa = detail::plane_point_b(proj, curve.vertices[a]);
      const Vec2 pb = detail::plane_point_b(proj, curve.vertices[a + 1]);
      const auto fa = proj.frame({pa[0].approx(), pa[1].approx()});
      const auto fb = proj.frame({pb[0].approx(), pb[1].approx()});
      for (const auto& z : flips) {
        const auto fz = proj.frame(proj.along_approx(z));
        if (detail::segment_distance({fz[0], fz[1]}, {fa[0], fa[1]}, {fb[0], fb[1]}) >
            to_long_double(sp.clearance) + 1)
          continue;
        const Vec2 bz = proj.along(z);
        EXPECT_FALSE(detail::segment_meets_ball(m, Vec2{pa[0] - bz[0], pa[1] - bz[1]},
                                                Vec2{pb[0] - pa[0], pb[1] - pa[1]}, c2));
      }
    }
    off = off + sp.shift;
  }
  EXPECT_GE(sp.clearance, sp.r / 2);
}

TEST(Staircase, BandsUseTheirShiftedWindows) {
  const auto& sp = three_steps();
  Projection proj(sp.patch.slope);
  Window w(proj);
  std::vector<Selector> sel;
  Vec4 off = sp.offset;
  for (int i = 0; i <= 3; ++i, off = off + sp.shift) sel.emplace_back(w, off);
  std::array<std::size_t, 4> counts{};
  for (const auto& [z, b] : sp.band) {
    ASSERT_GE(b, 0);
    ASSERT_LE(b, 3);
    EXPECT_TRUE(sel[b](z));
    ++counts[b];
  }
  for (auto c : counts) EXPECT_GT(c, 0u);
}

TEST(Staircase, NonPlanarButPlanarPerBand) {
  auto rep = check_non_planarity(three_steps());
  EXPECT_FALSE(rep.whole.pass);
  ASSERT_EQ(rep.own.size(), 4u);
  for (const auto& t : rep.own) EXPECT_TRUE(t.pass);
  EXPECT_TRUE(rep.increasing);
  EXPECT_TRUE(rep.pass());
}

TEST(Staircase, AtlasIncludedInPlanarAtlas) {
  auto rep = check_atlas_inclusion(three_steps());
  EXPECT_GT(rep.staircase, 0u);
  EXPECT_TRUE(rep.included()) << rep.missing.size() << " patterns missing";
}

TEST(Staircase, RejectsFourTypeSlopesAndBadArguments) {
  const auto ab = ammann_beenker(generic_offset());
  const auto shift = to_field(RationalVec4{q("1/100"), 0, 0, 0}, ab.field());
  EXPECT_THROW(build_staircase(ab, shift, Rational(2), 1, Rational(20)), PreconditionError);
  const auto s = fig4(generic_offset());
  EXPECT_THROW(build_staircase(s, e4_shift(s, 160), Rational(2), 0, Rational(20)), std::invalid_argument);
}
