#pragma once

#include "octa/slope.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <vector>

namespace octa {

/// The three coordinate indices (into kPairs) that avoid index k, in
/// lexicographic order; type 4 gives (G12, G13, G23).
inline std::array<int, 3> pairs_without(int k) {
  std::array<int, 3> out{};
  int n = 0;
  for (int p = 0; p < 6; ++p)
    if (kPairs[p].first != k && kPairs[p].second != k) out[n++] = p;
  return out;
}

/// The indices other than k, increasing.
inline std::array<int, 3> indices_without(int k) {
  std::array<int, 3> out{};
  int n = 0;
  for (int i = 1; i <= 4; ++i)
    if (i != k) out[n++] = i;
  return out;
}

/// Integer relation p*G_A + q*G_B + r*G_C = 0 on the three Grassmann
/// coordinates without index `type`.
struct Subperiod {
  int type = 0;
  std::array<int, 3> pairs{};  // indices into kPairs
  std::array<Integer, 3> coeffs{};
  std::optional<Vec4> lift;

  /// The relation as a linear form on (G12, G13, G14, G23, G24, G34).
  std::array<Integer, 6> linear_form() const {
    std::array<Integer, 6> f{};
    for (int t = 0; t < 3; ++t) f[pairs[t]] = coeffs[t];
    return f;
  }

  FieldElement evaluate(const GrassmannCoords& g) const {
    FieldElement s(g.field(), Rational(0));
    for (int t = 0; t < 3; ++t) s += g[pairs[t]].scaled(Rational(coeffs[t]));
    return s;
  }

  /// The integer entries of the corresponding direction in E at the three
  /// positions other than `type` (0-based positions, value), first nonzero
  /// positive.
  std::array<std::pair<int, Integer>, 3> direction_entries() const {
    auto idx = indices_without(type);  // i < j < l
    // relation c_ij G_ij + c_il G_il + c_jl G_jl; the direction w satisfies
    // w_i G_jl - w_j G_il + w_l G_ij = 0.
    std::array<Integer, 3> w{coeffs[2], -coeffs[1], coeffs[0]};
    for (const auto& x : w)
      if (x != 0) {
        if (x < 0)
          for (auto& y : w) y = -y;
        break;
      }
    return {{{idx[0] - 1, w[0]}, {idx[1] - 1, w[1]}, {idx[2] - 1, w[2]}}};
  }

  friend bool operator==(const Subperiod& a, const Subperiod& b) {
    return a.type == b.type && a.pairs == b.pairs && a.coeffs == b.coeffs;
  }
};

/// Every subperiod of a nondegenerate plane. For each type k, the rational
/// kernel of the three coordinates without k, as primitive integer vectors
/// in reduced echelon order.
inline std::vector<Subperiod> find_subperiods(const GrassmannCoords& g) {
  if (!is_nondegenerate(g)) throw PreconditionError("subperiod analysis needs a nondegenerate slope");
  std::vector<Subperiod> out;
  for (int k = 1; k <= 4; ++k) {
    auto pairs = pairs_without(k);
    Matrix<FieldElement> m(1, 3);
    for (int t = 0; t < 3; ++t) m(0, t) = g[pairs[t]];
    for (auto& v : rational_kernel(m)) {
      Subperiod sp;
      sp.type = k;
      sp.pairs = pairs;
      for (int t = 0; t < 3; ++t) sp.coeffs[t] = v[t];
      out.push_back(std::move(sp));
    }
  }
  return out;
}

/// The direction of E with the subperiod's integers at the positions other
/// than its type, and a field element at position `type`.
inline Vec4 lift_subperiod(const Slope& s, const Subperiod& sp) {
  auto entries = sp.direction_entries();
  // Solve lambda*u + mu*v = w on two positions with a nonzero minor.
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const int pa = entries[a].first, pb = entries[b].first;
      FieldElement det = s.u()[pa] * s.v()[pb] - s.u()[pb] * s.v()[pa];
      if (det.is_zero()) continue;
      const Rational wa(entries[a].second), wb(entries[b].second);
      FieldElement inv = det.inverse();
      FieldElement lambda = (s.v()[pb].scaled(wa) - s.v()[pa].scaled(wb)) * inv;
      FieldElement mu = (s.u()[pa].scaled(wb) - s.u()[pb].scaled(wa)) * inv;
      Vec4 w;
      for (int i = 0; i < 4; ++i) w[i] = lambda * s.u()[i] + mu * s.v()[i];
      for (const auto& [pos, value] : entries)
        if (!(w[pos] == FieldElement(s.field(), Rational(value))))
          throw PreconditionError("relation is not a subperiod of this slope");
      return w;
    }
  }
  throw PreconditionError("slope projects degenerately onto the subperiod coordinates");
}

/// Subperiods of s with their lifts filled in.
inline std::vector<Subperiod> find_subperiods(const Slope& s) {
  auto sps = find_subperiods(grassmann(s));
  for (auto& sp : sps) sp.lift = lift_subperiod(s, sp);
  return sps;
}

inline int count_types(const std::vector<Subperiod>& sps) {
  std::set<int> types;
  for (const auto& sp : sps) types.insert(sp.type);
  return static_cast<int>(types.size());
}

inline int count_of_type(const std::vector<Subperiod>& sps, int k) {
  return static_cast<int>(std::count_if(sps.begin(), sps.end(), [k](const auto& sp) { return sp.type == k; }));
}

}  // namespace octa
