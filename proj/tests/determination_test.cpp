#include "octa/determination.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace octa;
using namespace octa::testing;

namespace {

// Direct expansion, independent of plucker_polar.
Rational plucker_value(const std::vector<Rational>& x) { return x[0] * x[5] - x[1] * x[4] + x[2] * x[3]; }

std::vector<Rational> combine(const IntVector& w1, const IntVector& w2, long a, long b) {
  std::vector<Rational> x;
  for (int k = 0; k < 6; ++k) x.push_back(Rational(a * w1[k] + b * w2[k]));
  return x;
}

GrassmannCoords family_member(const FieldElement& t) {
  const auto& f = t.field();
  FieldElement one(f, Rational(1));
  return GrassmannCoords(f, {one, t, one, one, FieldElement(f, Rational(2)) / t, one});
}

}  // namespace

TEST(SolvePencil, ExpansionOracle) {
  IntVector w1{1, 0, 1, 1, 0, 1}, w2{0, 1, 0, 0, 1, 0};
  auto p = solve_pencil(w1, w2);
  // A = P(w1), C = P(w2), A + B + C = P(w1 + w2)
  const Rational A = plucker_value(combine(w1, w2, 1, 0)), C = plucker_value(combine(w1, w2, 0, 1));
  const Rational B = plucker_value(combine(w1, w2, 1, 1)) - A - C;
  EXPECT_EQ(p.a, A);
  EXPECT_EQ(p.b, B);
  EXPECT_EQ(p.c, C);
  EXPECT_EQ(p.a, 2);
  EXPECT_EQ(p.b, 0);
  EXPECT_EQ(p.c, -1);
  EXPECT_EQ(p.kind, RootKind::TwoConjugate);
  ASSERT_EQ(p.roots.size(), 2u);
  for (const auto& r : p.roots) {
    auto v = r.alpha * r.alpha * FieldElement(p.a) + r.alpha * r.beta * FieldElement(p.b) +
             r.beta * r.beta * FieldElement(p.c);
    EXPECT_TRUE(v.is_zero());
  }
  EXPECT_THROW(solve_pencil(w1, w1), std::invalid_argument);
}

TEST(SolvePencil, RandomPencilsMatchExpansion) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> small(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    IntVector w1(6), w2(6);
    for (int k = 0; k < 6; ++k) w1[k] = small(rng), w2[k] = small(rng);
    Matrix<Rational> m(0, 6);
    m.append_row(std::vector<Rational>(w1.begin(), w1.end()));
    m.append_row(std::vector<Rational>(w2.begin(), w2.end()));
    if (rank(m) < 2) continue;
    auto p = solve_pencil(w1, w2);
    const Rational A = plucker_value(combine(w1, w2, 1, 0)), C = plucker_value(combine(w1, w2, 0, 1));
    EXPECT_EQ(p.a, A);
    EXPECT_EQ(p.c, C);
    EXPECT_EQ(p.b, plucker_value(combine(w1, w2, 1, 1)) - A - C);
    for (const auto& r : p.roots) {
      FieldDescriptor f = r.alpha.field().is_rational() ? r.beta.field() : r.alpha.field();
      auto a = r.alpha.in(f), b = r.beta.in(f);
      EXPECT_TRUE((a * a * FieldElement(p.a) + a * b * FieldElement(p.b) + b * b * FieldElement(p.c)).is_zero());
    }
  }
}

TEST(SolveBinaryQuadratic, Kinds) {
  EXPECT_EQ(solve_binary_quadratic(1, 0, 1).kind, RootKind::NoRealRoot);
  EXPECT_EQ(solve_binary_quadratic(1, 2, 1).kind, RootKind::Double);
  EXPECT_EQ(solve_binary_quadratic(1, 0, -4).kind, RootKind::TwoRational);
  EXPECT_EQ(solve_binary_quadratic(0, 0, 0).kind, RootKind::IdenticallyZero);
  auto at_inf = solve_binary_quadratic(0, 1, 0);
  EXPECT_EQ(at_inf.kind, RootKind::TwoRational);
  EXPECT_TRUE(at_inf.roots[0].at_infinity());
  auto conj = solve_binary_quadratic(1, 0, Rational(-2, 9));
  EXPECT_EQ(conj.field, FieldDescriptor{2});
}

TEST(Determination, AmmannBeenkerIsOneParameterFamily) {
  auto a = analyze(ammann_beenker());
  EXPECT_EQ(a.types, 4);
  EXPECT_EQ(a.verdict.rank, 3u);
  ASSERT_EQ(a.verdict.status, Status::OneParameterFamily);
  ASSERT_TRUE(a.verdict.family);
  EXPECT_EQ(a.verdict.family->kernel_basis.size(), 3u);
  EXPECT_TRUE(a.verdict.family->contains(a.grassmann));
  EXPECT_TRUE(a.verdict.family->contains(family_member(quad(q2(), 0, 1))));
  for (long t : {1L, 2L, -3L, 7L}) EXPECT_TRUE(a.verdict.family->contains(family_member(FieldElement(Rational(t)))));
  EXPECT_TRUE(a.verdict.family->contains(family_member(FieldElement(Rational(1, 5)))));
  // off the family: Plucker fails
  FieldElement one(1);
  EXPECT_FALSE(a.verdict.family->contains(GrassmannCoords(FieldDescriptor{}, {one, one, one, one, one, one})));
}

TEST(Determination, Fig4HasFewerThanThreeTypes) {
  auto a = analyze(fig4());
  EXPECT_EQ(a.types, 2);
  EXPECT_EQ(a.verdict.status, Status::FewerThanThreeTypes);
}

TEST(Determination, RationalPlaneIsDetermined) {
  auto a = analyze(rational_plane());
  EXPECT_EQ(a.verdict.rank, 5u);
  ASSERT_EQ(a.verdict.status, Status::Determined);
  ASSERT_EQ(a.verdict.solutions.size(), 1u);
  EXPECT_TRUE(same_point(a.verdict.solutions[0], a.grassmann));
}

TEST(Determination, EmptySystemIsHigherDimensional) {
  auto v = determined_by_subperiods(SubperiodSystem{});
  EXPECT_EQ(v.status, Status::HigherDimensional);
  EXPECT_EQ(v.rank, 0u);
}

TEST(Determination, IndependenceOfThreeTypes) {
  // Irrational nondegenerate slopes with three or more subperiod types give
  // a system of rank at least 3.
  std::mt19937_64 rng(31);
  int sampled = 0;
  for (int trial = 0; trial < 2000 && sampled < 100; ++trial) {
    auto s = random_slope(rng, trial % 2 ? q2() : FieldDescriptor{3});
    auto g = grassmann(s);
    if (!is_nondegenerate(g) || !is_irrational(g)) continue;
    auto sps = find_subperiods(g);
    if (count_types(sps) < 3) continue;
    ++sampled;
    EXPECT_GE(SubperiodSystem::from(sps).rank(), 3u);
  }
  EXPECT_EQ(sampled, 100);
}

TEST(Determination, SearchFindsDeterminedQuadraticSlopes) {
  std::mt19937_64 rng(41);
  int found = 0;
  for (int trial = 0; trial < 400 && found < 5; ++trial) {
    auto s = random_slope(rng, q2());
    auto g = grassmann(s);
    if (!is_nondegenerate(g) || !is_irrational(g)) continue;
    auto sys = SubperiodSystem::from(find_subperiods(g));
    if (sys.rank() != 4) continue;
    auto basis = sys.kernel_basis();
    auto pen = solve_pencil(basis[0], basis[1]);
    if (pen.kind == RootKind::IdenticallyZero) continue;
    ++found;
    auto a = analyze(s);
    ASSERT_EQ(a.verdict.status, Status::Determined);
    ASSERT_EQ(a.verdict.solutions.size(), 2u);
    const auto& x = a.verdict.solutions[0];
    const auto& y = a.verdict.solutions[1];
    EXPECT_EQ(x.field(), q2());
    EXPECT_TRUE(same_point(x.conjugate(1), y));
    bool has_g = false;
    for (const auto& sol : a.verdict.solutions) {
      EXPECT_TRUE(sol.satisfies_plucker());
      EXPECT_TRUE(sys.annihilates(sol));
      has_g = has_g || same_point(sol, g);
    }
    EXPECT_TRUE(has_g);
  }
  EXPECT_GE(found, 1);
}
