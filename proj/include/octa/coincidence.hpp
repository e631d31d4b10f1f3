#pragma once

#include "octa/determination.hpp"
#include "octa/geometry.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

namespace octa {

/// The open unit segment base + (0,1) e_direction, direction in 1..4.
struct LatticeSegment {
  Point4 base{};
  int direction = 1;
  friend auto operator<=>(const LatticeSegment&, const LatticeSegment&) = default;
};

/// A window point on the projections of segments in at least three distinct
/// directions. The point is in window coordinates w (the window is
/// w([0,1]^4)).
struct Coincidence {
  std::vector<LatticeSegment> segments;  // sorted
  Vec2 point;

  std::set<int> directions() const {
    std::set<int> d;
    for (const auto& s : segments) d.insert(s.direction);
    return d;
  }
};

namespace detail {

struct Crossing {
  long double x, y;
  std::size_t a, b;  // candidate segment indices
};

// Union-find over crossings closer than `tol` in both coordinates.
inline std::vector<std::vector<std::size_t>> cluster_crossings(std::vector<Crossing>& xs, long double tol) {
  std::sort(xs.begin(), xs.end(), [](const Crossing& p, const Crossing& q) { return p.x < q.x; });
  std::vector<std::size_t> parent(xs.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t k) {
    while (parent[k] != k) k = parent[k] = parent[parent[k]];
    return k;
  };
  for (std::size_t k = 0; k < xs.size(); ++k)
    for (std::size_t l = k + 1; l < xs.size() && xs[l].x - xs[k].x <= tol; ++l)
      if (std::fabs(xs[l].y - xs[k].y) <= tol) parent[find(l)] = find(k);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < xs.size(); ++k) groups[find(k)].push_back(k);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

}  // namespace detail

/// Whether the open segment's projection passes through p (exact).
inline bool segment_contains(const Projection& proj, const LatticeSegment& seg, const Vec2& p) {
  const Vec2 a = proj.perp(to_field(seg.base, proj.field()));
  const Vec2& c = proj.column(seg.direction - 1);
  const Vec2 d{p[0] - a[0], p[1] - a[1]};
  if (!cross(d, c).is_zero()) return false;
  const FieldElement t = (d[0] * c[0] + d[1] * c[1]) / (c[0] * c[0] + c[1] * c[1]);
  return sign(t) > 0 && sign(t - FieldElement(1)) < 0;
}

/// Coincidences formed by segments with |base|_inf <= radius. Candidate
/// crossings are found in floating point and every reported point is
/// recomputed and checked exactly.
inline std::vector<Coincidence> find_coincidences(const Slope& s, int radius) {
  Projection proj(s);
  Window window(proj);
  const long double tol = 1e-9L;

  std::array<Approx2, 4> col;
  for (int i = 0; i < 4; ++i) col[i] = {proj.column(i)[0].approx(), proj.column(i)[1].approx()};
  std::array<Approx2, 4> normal;
  std::array<long double, 4> lo, hi;
  for (int k = 0; k < 4; ++k) {
    normal[k] = {window.normal(k)[0].approx(), window.normal(k)[1].approx()};
    lo[k] = window.lower(k).approx();
    hi[k] = window.upper(k).approx();
  }
  auto in_window = [&](const Approx2& p) {
    for (int k = 0; k < 4; ++k) {
      const long double x = normal[k][0] * p[0] + normal[k][1] * p[1];
      if (x < lo[k] - 1e-7L || x > hi[k] + 1e-7L) return false;
    }
    return true;
  };

  // Segments whose projection may meet the closed window.
  std::vector<LatticeSegment> cand;
  std::vector<Approx2> start;
  const int side = 2 * radius + 1;
  const long total = static_cast<long>(side) * side * side * side;
  for (long k = 0; k < total; ++k) {
    Point4 z;
    long t = k;
    for (int i = 0; i < 4; ++i, t /= side) z[i] = t % side - radius;
    const Approx2 p = proj.perp_approx(z);
    for (int i = 0; i < 4; ++i) {
      long double t0 = 0, t1 = 1;
      for (int m = 0; m < 4 && t0 <= t1; ++m) {
        const long double base = normal[m][0] * p[0] + normal[m][1] * p[1];
        const long double slope = normal[m][0] * col[i][0] + normal[m][1] * col[i][1];
        const long double a = lo[m] - 1e-7L - base, b = hi[m] + 1e-7L - base;
        if (std::fabs(slope) < 1e-15L) {
          if (a > 0 || b < 0) t1 = -1;
          continue;
        }
        long double ta = a / slope, tb = b / slope;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
      }
      if (t0 <= t1) {
        cand.push_back({z, i + 1});
        start.push_back(p);
      }
    }
  }

  std::vector<detail::Crossing> xs;
  for (std::size_t a = 0; a < cand.size(); ++a)
    for (std::size_t b = a + 1; b < cand.size(); ++b) {
      const int i = cand[a].direction - 1, j = cand[b].direction - 1;
      if (i == j) continue;
      const long double den = cross(col[i], col[j]);
      const Approx2 d{start[b][0] - start[a][0], start[b][1] - start[a][1]};
      const long double t = cross(d, col[j]) / den, u = cross(d, col[i]) / den;
      if (t <= -tol || t >= 1 + tol || u <= -tol || u >= 1 + tol) continue;
      const Approx2 x{start[a][0] + t * col[i][0], start[a][1] + t * col[i][1]};
      if (!in_window(x)) continue;
      xs.push_back({x[0], x[1], a, b});
    }

  std::vector<Coincidence> out;
  for (const auto& group : detail::cluster_crossings(xs, 1e-7L)) {
    std::set<int> dirs;
    std::set<std::size_t> segs;
    for (auto k : group) {
      segs.insert(xs[k].a);
      segs.insert(xs[k].b);
    }
    for (auto k : segs) dirs.insert(cand[k].direction);
    if (dirs.size() < 3) continue;
    // Exact points of every crossing in the group, deduplicated.
    std::vector<Vec2> points;
    for (auto k : group) {
      const auto& A = cand[xs[k].a];
      const auto& B = cand[xs[k].b];
      const Vec2 pa = proj.perp(to_field(A.base, proj.field())), pb = proj.perp(to_field(B.base, proj.field()));
      const Vec2 &ci = proj.column(A.direction - 1), &cj = proj.column(B.direction - 1);
      const FieldElement t = cross(Vec2{pb[0] - pa[0], pb[1] - pa[1]}, cj) / cross(ci, cj);
      Vec2 x{pa[0] + t * ci[0], pa[1] + t * ci[1]};
      bool known = false;
      for (const auto& p : points) known = known || (p[0] == x[0] && p[1] == x[1]);
      if (!known) points.push_back(x);
    }
    for (const auto& x : points) {
      if (!window.contains_closed(x)) continue;
      Coincidence c{{}, x};
      for (auto k : segs)
        if (segment_contains(proj, cand[k], x)) c.segments.push_back(cand[k]);
      std::sort(c.segments.begin(), c.segments.end());
      if (c.directions().size() >= 3) out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(), [](const Coincidence& a, const Coincidence& b) { return a.segments < b.segments; });
  return out;
}

/// Integer quadratic relation
///   a G14 G23 - b G13 G24 + c G12 G34 + d G24 G34 + e G14 G34 + f G14 G24 = 0
/// written in relabelled coordinates: index roles[k] plays k+1 and `special`
/// plays 4 (G'_pq = G_{roles(p) roles(q)}, antisymmetric).
struct CoincidenceEquation {
  int special = 4;
  std::array<int, 3> roles{1, 2, 3};
  std::array<Integer, 6> coeffs{};  // a, b, c, d, e, f

  int original(int p) const { return p == 4 ? special : roles[p - 1]; }

  struct Term {
    int coeff;  // index into coeffs
    int sign;
    std::array<int, 2> first, second;  // relabelled pairs
  };
  static constexpr std::array<Term, 6> kTerms{{{0, 1, {1, 4}, {2, 3}},
                                               {1, -1, {1, 3}, {2, 4}},
                                               {2, 1, {1, 2}, {3, 4}},
                                               {3, 1, {2, 4}, {3, 4}},
                                               {4, 1, {1, 4}, {3, 4}},
                                               {5, 1, {1, 4}, {2, 4}}}};

  FieldElement evaluate(const GrassmannCoords& g) const {
    FieldElement s(g.field(), Rational(0));
    for (const auto& t : kTerms) {
      if (coeffs[t.coeff] == 0) continue;
      FieldElement x = g.at(original(t.first[0]), original(t.first[1])) * g.at(original(t.second[0]), original(t.second[1]));
      s += x.scaled(Rational(coeffs[t.coeff] * t.sign));
    }
    return s;
  }

  /// Symmetric matrix S on (G12, ..., G34) with equation G^T S G = 0.
  Matrix<Rational> quadric() const {
    Matrix<Rational> s(6, 6);
    auto place = [&](const std::array<int, 2>& pq, int& sgn) {
      const int a = original(pq[0]), b = original(pq[1]);
      if (a > b) sgn = -sgn;
      return pair_index(a, b);
    };
    for (const auto& t : kTerms) {
      if (coeffs[t.coeff] == 0) continue;
      int sgn = t.sign;
      const int k1 = place(t.first, sgn), k2 = place(t.second, sgn);
      const Rational half = Rational(coeffs[t.coeff] * sgn) / 2;
      s(k1, k2) += half;
      s(k2, k1) += half;
    }
    return s;
  }
};

/// The relation obtained by eliminating the three non-integer entries of
/// the points of the segments that project onto the coincidence. `roles`
/// picks which segment directions play 1, 2, 3; by default the three
/// smallest directions present, in increasing order.
inline CoincidenceEquation coincidence_equation(const Slope& s, const Coincidence& c,
                                               std::optional<std::array<int, 3>> roles = std::nullopt) {
  auto dirs = c.directions();
  if (!roles) {
    if (dirs.size() < 3) throw std::invalid_argument("coincidence needs segments in three directions");
    auto it = dirs.begin();
    roles = std::array<int, 3>{*it, *std::next(it), *std::next(it, 2)};
  }
  std::set<int> used(roles->begin(), roles->end());
  if (used.size() != 3) throw std::invalid_argument("roles must be three distinct directions");
  for (int d : *roles)
    if (!dirs.count(d)) throw std::invalid_argument("coincidence has no segment in direction " + std::to_string(d));
  if (!is_nondegenerate(grassmann(s))) throw PreconditionError("equation synthesis needs a nondegenerate slope");
  CoincidenceEquation eq;
  eq.roles = *roles;
  for (int m = 1; m <= 4; ++m)
    if (!used.count(m)) eq.special = m;
  auto first_with = [&](int d) {
    for (const auto& seg : c.segments)
      if (seg.direction == d) return seg.base;
    throw std::logic_error("missing direction");
  };
  const Point4 z1 = first_with(eq.roles[0]), z2 = first_with(eq.roles[1]), z3 = first_with(eq.roles[2]);
  const int i = eq.roles[0] - 1, j = eq.roles[1] - 1, l = eq.roles[2] - 1, m = eq.special - 1;
  eq.coeffs = {Integer(0),
               Integer(z1[m] - z2[m]),
               Integer(z1[m] - z3[m]),
               Integer(z2[i] - z3[i]),
               Integer(-(z1[j] - z3[j])),
               Integer(z1[l] - z2[l])};
  return eq;
}

namespace detail {

// Homogeneous binary form in (a, b): coefficient k multiplies a^(deg-k) b^k.
using BinaryForm = std::vector<Rational>;

inline BinaryForm mul(const BinaryForm& p, const BinaryForm& q) {
  BinaryForm r(p.size() + q.size() - 1, Rational(0));
  for (std::size_t x = 0; x < p.size(); ++x)
    for (std::size_t y = 0; y < q.size(); ++y) r[x + y] += p[x] * q[y];
  return r;
}
inline BinaryForm sub(const BinaryForm& p, const BinaryForm& q) {
  BinaryForm r = p;
  for (std::size_t k = 0; k < q.size(); ++k) r[k] -= q[k];
  return r;
}
inline BinaryForm times(const Rational& s, const BinaryForm& p) {
  BinaryForm r = p;
  for (auto& x : r) x *= s;
  return r;
}

// T^t A T with T = [[1,0,s],[0,1,t],[0,0,1]].
inline Matrix<Rational> substitute(const Matrix<Rational>& a, const Rational& s, const Rational& t) {
  Matrix<Rational> tm(3, 3);
  tm(0, 0) = tm(1, 1) = tm(2, 2) = 1;
  tm(0, 2) = s;
  tm(1, 2) = t;
  Matrix<Rational> out(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Rational v = 0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) v += tm(k, i) * a(k, l) * tm(l, j);
      out(i, j) = v;
    }
  return out;
}

inline Rational ternary_value(const Matrix<Rational>& a, const std::array<Rational, 3>& x) {
  Rational v = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v += a(i, j) * x[i] * x[j];
  return v;
}

inline Matrix<Rational> restrict_quadric(const Matrix<Rational>& s, const std::vector<IntVector>& basis) {
  const std::size_t n = basis.size();
  Matrix<Rational> out(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      Rational v = 0;
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) v += Rational(basis[a][i]) * s(i, j) * Rational(basis[b][j]);
      out(a, b) = v;
    }
  return out;
}

}  // namespace detail

/// Gram matrix of the Plucker form on (G12, ..., G34).
inline Matrix<Rational> plucker_quadric() {
  Matrix<Rational> s(6, 6);
  const Rational h(1, 2);
  s(0, 5) = s(5, 0) = h;
  s(1, 4) = s(4, 1) = -h;
  s(2, 3) = s(3, 2) = h;
  return s;
}

/// Resultant in c of two ternary quadratic forms (symmetric 3x3 matrices),
/// after a small integer change of variables making both c^2 coefficients
/// nonzero. Returns the binary quartic in (a, b); empty if either form
/// vanishes identically.
inline std::vector<Rational> conic_resultant(const Matrix<Rational>& q1, const Matrix<Rational>& q2) {
  auto zero = [](const Matrix<Rational>& m) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (m(i, j) != 0) return false;
    return true;
  };
  if (zero(q1) || zero(q2)) return {};
  for (int n = 0;; ++n) {
    // enumerate (s, t) on growing squares, deterministically
    for (int s = -n; s <= n; ++s)
      for (int t = -n; t <= n; ++t) {
        if (std::max(std::abs(s), std::abs(t)) != n) continue;
        const std::array<Rational, 3> x{Rational(s), Rational(t), Rational(1)};
        if (detail::ternary_value(q1, x) == 0 || detail::ternary_value(q2, x) == 0) continue;
        auto a = detail::substitute(q1, s, t), b = detail::substitute(q2, s, t);
        using detail::BinaryForm;
        const BinaryForm p2{a(2, 2)}, q2c{b(2, 2)};
        const BinaryForm p1{2 * a(0, 2), 2 * a(1, 2)}, q1c{2 * b(0, 2), 2 * b(1, 2)};
        const BinaryForm p0{a(0, 0), 2 * a(0, 1), a(1, 1)}, q0{b(0, 0), 2 * b(0, 1), b(1, 1)};
        auto e = detail::sub(detail::times(p2[0], q0), detail::times(q2c[0], p0));
        auto f = detail::sub(detail::times(p2[0], q1c), detail::times(q2c[0], p1));
        auto g = detail::sub(detail::mul(p1, q0), detail::mul(p0, q1c));
        return detail::sub(detail::mul(e, e), detail::mul(f, g));
      }
  }
}

/// Whether three independent subperiods of distinct types, the Plucker
/// relation and the coincidence equation cut out finitely many projective
/// points.
inline bool zero_dimensional_with_coincidence(const std::vector<Subperiod>& three, const CoincidenceEquation& eq) {
  if (three.size() != 3) throw std::invalid_argument("expected three subperiods");
  std::set<int> types;
  for (const auto& sp : three) types.insert(sp.type);
  if (types.size() != 3) throw std::invalid_argument("subperiods must have distinct types");
  const auto sys = SubperiodSystem::from(three);
  if (sys.rank() != 3) throw PreconditionError("subperiods are dependent");
  const auto basis = sys.kernel_basis();
  const auto q1 = detail::restrict_quadric(plucker_quadric(), basis);
  const auto q2 = detail::restrict_quadric(eq.quadric(), basis);
  const auto res = conic_resultant(q1, q2);
  return std::any_of(res.begin(), res.end(), [](const Rational& x) { return x != 0; });
}

}  // namespace octa
