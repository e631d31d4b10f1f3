#include "octa/subperiod.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace octa;
using namespace octa::testing;

namespace {

std::vector<Integer> ints(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

std::vector<Integer> coeffs(const Subperiod& sp) { return {sp.coeffs.begin(), sp.coeffs.end()}; }

Slope random_sparse_slope(std::mt19937_64& rng, const FieldDescriptor& f, double irrational_rate) {
  std::uniform_real_distribution<double> coin(0, 1);
  std::uniform_int_distribution<int> small(-3, 3);
  for (;;) {
    Vec4 u, v;
    for (auto* w : {&u, &v})
      for (int i = 0; i < 4; ++i) {
        std::vector<Rational> c{Rational(small(rng)), Rational(coin(rng) < irrational_rate ? small(rng) : 0)};
        (*w)[i] = FieldElement(f, c);
      }
    try {
      return Slope(f, u, v);
    } catch (const PreconditionError&) {
    }
  }
}

}  // namespace

TEST(Subperiods, AmmannBeenkerHasOnePerType) {
  auto sps = find_subperiods(ammann_beenker());
  ASSERT_EQ(sps.size(), 4u);
  EXPECT_EQ(sps[0].type, 1);
  EXPECT_EQ(coeffs(sps[0]), ints({1, 0, -1}));  // G23 = G34
  EXPECT_EQ(sps[1].type, 2);
  EXPECT_EQ(coeffs(sps[1]), ints({0, 1, -1}));  // G14 = G34
  EXPECT_EQ(sps[2].type, 3);
  EXPECT_EQ(coeffs(sps[2]), ints({1, -1, 0}));  // G12 = G14
  EXPECT_EQ(sps[3].type, 4);
  EXPECT_EQ(coeffs(sps[3]), ints({1, 0, -1}));  // G12 = G23
  EXPECT_EQ(count_types(sps), 4);
}

TEST(Subperiods, AmmannBeenkerTypeFourLift) {
  auto sps = find_subperiods(ammann_beenker());
  const auto& f = q2();
  ASSERT_TRUE(sps[3].lift);
  Vec4 expect{quad(f, 1, 0), quad(f, 0, 0), quad(f, -1, 0), quad(f, 0, -1)};
  EXPECT_EQ(*sps[3].lift, expect);
}

TEST(Subperiods, LiftsLieInPlane) {
  for (const Slope& s : {ammann_beenker(), rational_plane()}) {
    for (const auto& sp : find_subperiods(s)) {
      ASSERT_TRUE(sp.lift);
      const Vec4& w = *sp.lift;
      // w, u, v span at most a plane: all 3x3 minors vanish
      for (auto [i, j, k] : std::array<std::array<int, 3>, 4>{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}}) {
        auto det = w[i] * (s.u()[j] * s.v()[k] - s.u()[k] * s.v()[j]) -
                   w[j] * (s.u()[i] * s.v()[k] - s.u()[k] * s.v()[i]) +
                   w[k] * (s.u()[i] * s.v()[j] - s.u()[j] * s.v()[i]);
        EXPECT_TRUE(det.is_zero());
      }
      for (const auto& [pos, value] : sp.direction_entries()) EXPECT_EQ(w[pos], FieldElement(s.field(), Rational(value)));
    }
  }
}

TEST(Subperiods, Fig4HasTypesThreeAndFour) {
  auto sps = find_subperiods(fig4_coords());
  ASSERT_EQ(sps.size(), 2u);
  EXPECT_EQ(sps[0].type, 3);
  EXPECT_EQ(coeffs(sps[0]), ints({0, 3, -1}));  // G24 = 3 G14
  EXPECT_EQ(sps[1].type, 4);
  EXPECT_EQ(coeffs(sps[1]), ints({0, 2, -1}));  // G23 = 2 G13
  auto lifted = find_subperiods(fig4());
  for (const auto& sp : lifted) EXPECT_TRUE(sp.lift);
}

TEST(Subperiods, RationalPlaneHasTwoPerType) {
  auto sps = find_subperiods(rational_plane());
  ASSERT_EQ(sps.size(), 8u);
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(count_of_type(sps, k), 2);
}

TEST(Subperiods, BiquadraticExampleHasNone) {
  const auto& f = q23();
  Slope s(f, {biquad(f, 1, 0, 0, 0), biquad(f, 0, 0, 0, 0), biquad(f, 0, 1, 0, 0), biquad(f, 0, 0, 1, 0)},
          {biquad(f, 0, 0, 0, 0), biquad(f, 1, 0, 0, 0), biquad(f, 0, 0, 1, 0), biquad(f, 0, 0, 0, 1)});
  ASSERT_TRUE(is_nondegenerate(grassmann(s)));
  EXPECT_TRUE(find_subperiods(s).empty());
}

TEST(Subperiods, DegenerateSlopeRejected) {
  FieldDescriptor f;
  Slope s(f, {FieldElement(1), FieldElement(0), FieldElement(0), FieldElement(0)},
          {FieldElement(0), FieldElement(1), FieldElement(0), FieldElement(0)});
  EXPECT_THROW(find_subperiods(s), PreconditionError);
}

TEST(SubperiodProperties, QuadraticSlopesHaveEveryType) {
  // Three elements of a two-dimensional Q-space are always dependent.
  std::mt19937_64 rng(5);
  int seen = 0;
  for (int trial = 0; trial < 300 && seen < 100; ++trial) {
    auto s = random_slope(rng, trial % 2 ? q2() : FieldDescriptor{5});
    auto g = grassmann(s);
    if (!is_nondegenerate(g)) continue;
    ++seen;
    auto sps = find_subperiods(s);
    EXPECT_EQ(count_types(sps), 4);
    for (const auto& sp : sps) {
      EXPECT_TRUE(sp.evaluate(g).is_zero());
      EXPECT_TRUE(sp.lift);
    }
  }
  EXPECT_GE(seen, 50);
}

TEST(SubperiodProperties, InvariantUnderConjugation) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = grassmann(random_slope(rng, q2()));
    if (!is_nondegenerate(g)) continue;
    auto base = find_subperiods(g);
    for (const auto& c : conjugate_slopes(g)) EXPECT_EQ(find_subperiods(c), base);
  }
  auto g4 = fig4_coords();
  for (const auto& c : conjugate_slopes(g4)) EXPECT_EQ(find_subperiods(c), find_subperiods(g4));
}

TEST(SubperiodProperties, TwoPlusTwoSubperiodsForceRationalPlane) {
  std::mt19937_64 rng(13);
  int hits = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    auto s = random_sparse_slope(rng, q2(), 0.15);
    auto g = grassmann(s);
    if (!is_nondegenerate(g)) continue;
    auto sps = find_subperiods(g);
    int doubled = 0;
    for (int k = 1; k <= 4; ++k) doubled += count_of_type(sps, k) >= 2;
    if (doubled >= 2) {
      ++hits;
      EXPECT_EQ(rational_subspace(g).size(), 2u);
    }
  }
  EXPECT_GE(hits, 10);
}
