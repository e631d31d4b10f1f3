#pragma once

#include "octa/field.hpp"
#include "octa/linalg.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <utility>
#include <vector>

namespace octa {

using Vec4 = FieldVector<4>;
using RationalVec4 = std::array<Rational, 4>;

/// Index pairs (i, j), 1-based, i < j, in lexicographic order:
/// 12, 13, 14, 23, 24, 34.
inline constexpr std::array<std::pair<int, int>, 6> kPairs{
    {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};

/// Position of the pair {i, j} (any order, 1-based) in kPairs.
inline int pair_index(int i, int j) {
  if (i > j) std::swap(i, j);
  for (int k = 0; k < 6; ++k)
    if (kPairs[k].first == i && kPairs[k].second == j) return k;
  throw std::out_of_range("no such index pair");
}

inline std::string pair_label(int k) {
  return std::to_string(kPairs[k].first) + std::to_string(kPairs[k].second);
}

/// A 2-plane E of R^4: the direction span(u, v) plus a rational offset.
class Slope {
 public:
  Slope(FieldDescriptor field, Vec4 u, Vec4 v, RationalVec4 offset = {})
      : field_(field), u_(std::move(u)), v_(std::move(v)), offset_(std::move(offset)) {
    for (auto* vec : {&u_, &v_})
      for (auto& x : *vec) x = x.in(field_);
    bool independent = false;
    for (auto [i, j] : kPairs)
      if (!(u_[i - 1] * v_[j - 1] - u_[j - 1] * v_[i - 1]).is_zero()) independent = true;
    if (!independent) throw PreconditionError("slope basis vectors are linearly dependent");
  }

  const FieldDescriptor& field() const { return field_; }
  const Vec4& u() const { return u_; }
  const Vec4& v() const { return v_; }
  const RationalVec4& offset() const { return offset_; }

  Slope with_offset(RationalVec4 offset) const { return Slope(field_, u_, v_, std::move(offset)); }

 private:
  FieldDescriptor field_;
  Vec4 u_, v_;
  RationalVec4 offset_;
};

/// The six Grassmann coordinates G12..G34 of a plane.
class GrassmannCoords {
 public:
  GrassmannCoords() = default;
  GrassmannCoords(FieldDescriptor field, std::array<FieldElement, 6> g, bool normalized = false)
      : field_(field), g_(std::move(g)), normalized_(normalized) {
    for (auto& x : g_) x = x.in(field_);
  }

  const FieldDescriptor& field() const { return field_; }
  const FieldElement& operator[](int k) const { return g_[k]; }
  /// G_ij for 1-based i != j, antisymmetric.
  FieldElement at(int i, int j) const {
    if (i == j) return FieldElement(field_, Rational(0));
    const FieldElement& x = g_[pair_index(i, j)];
    return i < j ? x : -x;
  }
  const std::array<FieldElement, 6>& values() const { return g_; }
  bool normalized() const { return normalized_; }

  bool all_zero() const {
    return std::all_of(g_.begin(), g_.end(), [](const auto& x) { return x.is_zero(); });
  }

  /// G12 G34 - G13 G24 + G14 G23; zero exactly on Grassmann vectors of planes.
  FieldElement plucker_residual() const {
    return g_[0] * g_[5] - g_[1] * g_[4] + g_[2] * g_[3];
  }
  bool satisfies_plucker() const { return plucker_residual().is_zero(); }

  /// Divides by the lexicographically first nonzero coordinate.
  GrassmannCoords normalize() const {
    for (const auto& x : g_) {
      if (x.is_zero()) continue;
      FieldElement inv = x.inverse();
      std::array<FieldElement, 6> out;
      for (int k = 0; k < 6; ++k) out[k] = g_[k] * inv;
      return GrassmannCoords(field_, out, true);
    }
    throw PreconditionError("all Grassmann coordinates vanish");
  }

  GrassmannCoords conjugate(unsigned flips) const {
    std::array<FieldElement, 6> out;
    for (int k = 0; k < 6; ++k) out[k] = g_[k].conjugate(flips);
    return GrassmannCoords(field_, out, normalized_);
  }

  GrassmannCoords in(const FieldDescriptor& target) const {
    std::array<FieldElement, 6> out;
    for (int k = 0; k < 6; ++k) out[k] = embed(g_[k], target);
    return GrassmannCoords(target, out, normalized_);
  }

  friend bool operator==(const GrassmannCoords& a, const GrassmannCoords& b) {
    for (int k = 0; k < 6; ++k)
      if (!(a.g_[k] == b.g_[k])) return false;
    return true;
  }

  /// True when both vectors span the same projective point.
  bool proportional_to(const GrassmannCoords& o) const {
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b)
        if (!(g_[a] * o.g_[b] - g_[b] * o.g_[a]).is_zero()) return false;
    return true;
  }

 private:
  FieldDescriptor field_;
  std::array<FieldElement, 6> g_{};
  bool normalized_ = false;
};

/// The six 2x2 minors u_i v_j - u_j v_i, normalized.
inline GrassmannCoords grassmann(const Slope& s) {
  std::array<FieldElement, 6> g;
  for (int k = 0; k < 6; ++k) {
    auto [i, j] = kPairs[k];
    g[k] = s.u()[i - 1] * s.v()[j - 1] - s.u()[j - 1] * s.v()[i - 1];
  }
  GrassmannCoords raw(s.field(), g);
  if (raw.all_zero()) throw std::logic_error("slope with vanishing Grassmann coordinates");
  GrassmannCoords out = raw.normalize();
  if (!out.satisfies_plucker()) throw std::logic_error("Plucker identity failed on computed minors");
  return out;
}

inline bool is_nondegenerate(const GrassmannCoords& g) {
  return std::none_of(g.values().begin(), g.values().end(), [](const auto& x) { return x.is_zero(); });
}

/// Basis over Q of the rational vectors lying in the plane direction.
/// x lies in span(u, v) iff the four 3x3 minors x_i G_jk - x_j G_ik + x_k G_ij
/// vanish, one per triple i < j < k.
inline std::vector<IntVector> rational_subspace(const GrassmannCoords& g) {
  Matrix<FieldElement> m(4, 4);
  const std::array<std::array<int, 3>, 4> triples{{{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}}};
  for (std::size_t t = 0; t < triples.size(); ++t) {
    auto [i, j, k] = triples[t];
    m(t, i - 1) = g.at(j, k);
    m(t, j - 1) = -g.at(i, k);
    m(t, k - 1) = g.at(i, j);
  }
  return rational_kernel(m);
}

inline std::vector<IntVector> rational_subspace(const Slope& s) { return rational_subspace(grassmann(s)); }

inline bool is_irrational(const GrassmannCoords& g) { return rational_subspace(g).empty(); }

/// The plane spanned by (0, G12, G13, G14) and (-G12, 0, G23, G24). Its
/// minors are G12 * g, using the Plucker identity for the 34 minor.
inline Slope plane_from_grassmann(const GrassmannCoords& g) {
  if (!is_nondegenerate(g)) throw PreconditionError("degenerate Grassmann coordinates");
  if (!g.satisfies_plucker()) throw PreconditionError("Grassmann coordinates violate the Plucker relation");
  const FieldElement zero(g.field(), Rational(0));
  Vec4 u{zero, g[0], g[1], g[2]};
  Vec4 v{-g[0], zero, g[3], g[4]};
  return Slope(g.field(), u, v);
}

/// Distinct images of g under the field automorphisms, g itself first.
inline std::vector<GrassmannCoords> conjugate_slopes(const GrassmannCoords& g) {
  std::vector<GrassmannCoords> out;
  for (unsigned m = 0; m < static_cast<unsigned>(g.field().dimension()); ++m) {
    GrassmannCoords c = g.conjugate(m);
    if (std::none_of(out.begin(), out.end(), [&](const auto& o) { return o == c; }))
      out.push_back(std::move(c));
  }
  return out;
}

}  // namespace octa
