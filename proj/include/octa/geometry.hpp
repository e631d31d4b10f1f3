#pragma once

#include "octa/slope.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace octa {

using Point4 = std::array<std::int64_t, 4>;
using Vec2 = std::array<FieldElement, 2>;
using Approx2 = std::array<long double, 2>;

inline Point4 operator+(Point4 a, const Point4& b) {
  for (int i = 0; i < 4; ++i) a[i] += b[i];
  return a;
}
inline Point4 operator-(Point4 a, const Point4& b) {
  for (int i = 0; i < 4; ++i) a[i] -= b[i];
  return a;
}
inline Point4 unit(int i) {
  Point4 e{};
  e[i] = 1;
  return e;
}

struct Point4Hash {
  std::size_t operator()(const Point4& z) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto x : z) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

inline Vec4 to_field(const RationalVec4& x, const FieldDescriptor& f) {
  Vec4 out;
  for (int i = 0; i < 4; ++i) out[i] = FieldElement(f, x[i]);
  return out;
}

inline Vec4 to_field(const Point4& z, const FieldDescriptor& f) {
  Vec4 out;
  for (int i = 0; i < 4; ++i) out[i] = FieldElement(f, Rational(z[i]));
  return out;
}

inline Vec4 operator+(const Vec4& a, const Vec4& b) {
  Vec4 out;
  for (int i = 0; i < 4; ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vec4 scaled(const Vec4& a, const Rational& q) {
  Vec4 out;
  for (int i = 0; i < 4; ++i) out[i] = a[i].scaled(q);
  return out;
}

inline int sgn(long double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// Relative error allowed on long double evaluations of short sums of
// products of cached field values.
inline constexpr long double kRelError = 1e-14L;

/// Sign of a quantity estimated in long double with absolute error at most
/// `bound`; `exact` is only called when the estimate is inconclusive.
template <class Exact>
int filtered_sign(long double estimate, long double bound, Exact&& exact) {
  if (estimate > bound) return 1;
  if (estimate < -bound) return -1;
  return sign(exact());
}

inline FieldElement cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }
inline long double cross(const Approx2& a, const Approx2& b) { return a[0] * b[1] - a[1] * b[0]; }

/// Affine form a.z + c on lattice points with a cached long double copy.
class LatticeForm {
 public:
  LatticeForm() = default;
  LatticeForm(std::array<FieldElement, 4> a, FieldElement c) : a_(std::move(a)), c_(std::move(c)) {
    for (int i = 0; i < 4; ++i) af_[i] = a_[i].approx();
    cf_ = c_.approx();
  }

  FieldElement value(const Point4& z) const {
    FieldElement s = c_;
    for (int i = 0; i < 4; ++i)
      if (z[i] != 0) s += a_[i].scaled(Rational(z[i]));
    return s;
  }

  long double approx(const Point4& z) const {
    long double s = cf_;
    for (int i = 0; i < 4; ++i) s += af_[i] * static_cast<long double>(z[i]);
    return s;
  }

  int sign(const Point4& z) const {
    long double s = cf_, mag = std::fabs(cf_);
    for (int i = 0; i < 4; ++i) {
      s += af_[i] * static_cast<long double>(z[i]);
      mag += std::fabs(af_[i] * static_cast<long double>(z[i]));
    }
    return filtered_sign(s, mag * kRelError + 1e-30L, [&] { return value(z); });
  }

  const std::array<FieldElement, 4>& coefficients() const { return a_; }
  const FieldElement& constant() const { return c_; }

 private:
  std::array<FieldElement, 4> a_;
  FieldElement c_;
  std::array<long double, 4> af_{};
  long double cf_ = 0;
};

/// Exact projections of R^4 onto a slope E and onto its orthogonal
/// complement.
///
/// E-side points are handled through b(x) = (u.x, v.x); the induced metric
/// is |pi(x)|^2 = b^T M^-1 b with M the Gram matrix of (u, v). Perp-side
/// points use w(x) = (p1.x, p2.x) for a basis p1, p2 of E^perp, an affine
/// image of the orthogonal projection (window predicates are affine
/// invariant).
class Projection {
 public:
  explicit Projection(const Slope& s) : slope_(s) {
    const auto& u = s.u();
    const auto& v = s.v();
    uu_ = dot(u, u);
    uv_ = dot(u, v);
    vv_ = dot(v, v);
    det_ = uu_ * vv_ - uv_ * uv_;
    Matrix<FieldElement> m(2, 4);
    for (int i = 0; i < 4; ++i) {
      m(0, i) = u[i];
      m(1, i) = v[i];
    }
    auto k = kernel(m);
    for (int r = 0; r < 2; ++r)
      for (int i = 0; i < 4; ++i) perp_basis_[r][i] = k[r][i].in(s.field());
    for (int i = 0; i < 4; ++i) {
      columns_[i] = {perp_basis_[0][i], perp_basis_[1][i]};
      uf_[i] = u[i].approx();
      vf_[i] = v[i].approx();
      pf_[0][i] = perp_basis_[0][i].approx();
      pf_[1][i] = perp_basis_[1][i].approx();
    }
    uuf_ = uu_.approx();
    uvf_ = uv_.approx();
    vvf_ = vv_.approx();
    detf_ = det_.approx();
  }

  const Slope& slope() const { return slope_; }
  const FieldDescriptor& field() const { return slope_.field(); }

  const FieldElement& uu() const { return uu_; }
  const FieldElement& uv() const { return uv_; }
  const FieldElement& vv() const { return vv_; }
  const FieldElement& det_gram() const { return det_; }

  Vec2 along(const Vec4& x) const { return {dot(slope_.u(), x), dot(slope_.v(), x)}; }
  Vec2 along(const Point4& z) const { return along(to_field(z, field())); }
  Approx2 along_approx(const Point4& z) const {
    Approx2 b{0, 0};
    for (int i = 0; i < 4; ++i) {
      b[0] += uf_[i] * static_cast<long double>(z[i]);
      b[1] += vf_[i] * static_cast<long double>(z[i]);
    }
    return b;
  }

  /// det(M) times the E inner product, for b-coordinates.
  FieldElement scaled_inner(const Vec2& a, const Vec2& b) const {
    return vv_ * a[0] * b[0] - uv_ * (a[0] * b[1] + a[1] * b[0]) + uu_ * a[1] * b[1];
  }
  long double scaled_inner(const Approx2& a, const Approx2& b) const {
    return vvf_ * a[0] * b[0] - uvf_ * (a[0] * b[1] + a[1] * b[0]) + uuf_ * a[1] * b[1];
  }
  FieldElement norm2(const Vec2& b) const { return scaled_inner(b, b) / det_; }
  long double norm2(const Approx2& b) const { return scaled_inner(b, b) / detf_; }
  long double det_gram_approx() const { return detf_; }

  /// Orthonormal coordinates in E (first axis along u), for drawing and
  /// spatial hashing.
  std::array<double, 2> frame(const Approx2& b) const {
    const long double su = std::sqrt(uuf_);
    return {static_cast<double>(b[0] / su), static_cast<double>((uuf_ * b[1] - uvf_ * b[0]) / (su * std::sqrt(detf_)))};
  }

  /// Coordinates (lambda, mu) of pi(x) = lambda u + mu v.
  Vec2 plane_coords(const Vec2& b) const {
    return {(vv_ * b[0] - uv_ * b[1]) / det_, (uu_ * b[1] - uv_ * b[0]) / det_};
  }

  Vec4 lift(const Vec2& lm) const {
    Vec4 out;
    for (int i = 0; i < 4; ++i) out[i] = lm[0] * slope_.u()[i] + lm[1] * slope_.v()[i];
    return out;
  }

  const Vec2& column(int i) const { return columns_[i]; }
  const std::array<Vec4, 2>& perp_basis() const { return perp_basis_; }
  Vec2 perp(const Vec4& x) const { return {dot(perp_basis_[0], x), dot(perp_basis_[1], x)}; }
  Approx2 perp_approx(const Point4& z) const {
    Approx2 w{0, 0};
    for (int i = 0; i < 4; ++i) {
      w[0] += pf_[0][i] * static_cast<long double>(z[i]);
      w[1] += pf_[1][i] * static_cast<long double>(z[i]);
    }
    return w;
  }

  static FieldElement dot(const Vec4& a, const Vec4& b) {
    FieldElement s = a[0] * b[0];
    for (int i = 1; i < 4; ++i) s += a[i] * b[i];
    return s;
  }

 private:
  Slope slope_;
  FieldElement uu_, uv_, vv_, det_;
  std::array<Vec4, 2> perp_basis_;
  std::array<Vec2, 4> columns_;
  std::array<long double, 4> uf_{}, vf_{};
  std::array<std::array<long double, 4>, 2> pf_{};
  long double uuf_ = 0, uvf_ = 0, vvf_ = 0, detf_ = 0;
};

/// The projection of [0,1]^4 to E^perp. For a nondegenerate slope it is an
/// octagon (a zonogon with four edge directions c_i = w(e_i)), equal to the
/// intersection of four slabs lower_i <= n_i.p <= upper_i, n_i normal to
/// c_i. The half-open version keeps lower_i and drops upper_i; each n_i is
/// oriented to have positive product with a fixed direction d, so half-open
/// membership equals closed membership after a tiny translation along -d.
class Window {
 public:
  explicit Window(const Projection& proj) : proj_(&proj) {
    if (!is_nondegenerate(grassmann(proj.slope())))
      throw PreconditionError("window needs a nondegenerate slope (a Grassmann coordinate vanishes)");
    const auto& f = proj.field();
    for (int i = 0; i < 4; ++i) normals_[i] = {-proj.column(i)[1], proj.column(i)[0]};
    // Generic direction: not parallel to any edge.
    const std::array<std::array<int, 2>, 6> candidates{{{1, 0}, {0, 1}, {1, 1}, {1, -1}, {1, 2}, {2, 1}}};
    for (auto cand : candidates) {
      Vec2 d{FieldElement(f, Rational(cand[0])), FieldElement(f, Rational(cand[1]))};
      bool ok = true;
      for (int i = 0; i < 4; ++i) ok = ok && !dot2(normals_[i], d).is_zero();
      if (ok) {
        direction_ = d;
        break;
      }
    }
    for (int i = 0; i < 4; ++i) {
      if (sign(dot2(normals_[i], direction_)) < 0) normals_[i] = {-normals_[i][0], -normals_[i][1]};
      lower_[i] = FieldElement(f, Rational(0));
      upper_[i] = FieldElement(f, Rational(0));
      for (int j = 0; j < 4; ++j) {
        coeff_[i][j] = dot2(normals_[i], proj.column(j));
        if (sign(coeff_[i][j]) < 0)
          lower_[i] += coeff_[i][j];
        else
          upper_[i] += coeff_[i][j];
      }
    }
    build_vertices();
  }

  const Projection& projection() const { return *proj_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Vec2& normal(int i) const { return normals_[i]; }
  const FieldElement& lower(int i) const { return lower_[i]; }
  const FieldElement& upper(int i) const { return upper_[i]; }
  /// n_i . c_j
  const FieldElement& coefficient(int i, int j) const { return coeff_[i][j]; }
  const Vec2& direction() const { return direction_; }

  Vec2 center() const {
    const auto& f = proj_->field();
    Vec2 c{FieldElement(f, Rational(0)), FieldElement(f, Rational(0))};
    for (int j = 0; j < 4; ++j) {
      c[0] += proj_->column(j)[0].scaled(Rational(1, 2));
      c[1] += proj_->column(j)[1].scaled(Rational(1, 2));
    }
    return c;
  }

  bool contains_closed(const Vec2& p) const {
    for (int i = 0; i < 4; ++i) {
      FieldElement x = dot2(normals_[i], p);
      if (sign(x - lower_[i]) < 0 || sign(x - upper_[i]) > 0) return false;
    }
    return true;
  }

  bool contains(const Vec2& p) const {
    for (int i = 0; i < 4; ++i) {
      FieldElement x = dot2(normals_[i], p);
      if (sign(x - lower_[i]) < 0 || sign(x - upper_[i]) >= 0) return false;
    }
    return true;
  }

  static FieldElement dot2(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

 private:
  void build_vertices() {
    std::vector<Vec2> pts;
    const auto& f = proj_->field();
    for (unsigned mask = 0; mask < 16; ++mask) {
      Vec2 p{FieldElement(f, Rational(0)), FieldElement(f, Rational(0))};
      for (int j = 0; j < 4; ++j)
        if (mask >> j & 1) {
          p[0] += proj_->column(j)[0];
          p[1] += proj_->column(j)[1];
        }
      pts.push_back(p);
    }
    auto less = [](const Vec2& a, const Vec2& b) {
      int c = compare(a[0], b[0]);
      return c != 0 ? c < 0 : compare(a[1], b[1]) < 0;
    };
    std::sort(pts.begin(), pts.end(), less);
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return a[0] == b[0] && a[1] == b[1]; }),
              pts.end());
    auto turn = [](const Vec2& o, const Vec2& a, const Vec2& b) {
      return sign(cross(Vec2{a[0] - o[0], a[1] - o[1]}, Vec2{b[0] - o[0], b[1] - o[1]}));
    };
    // Andrew's monotone chain, counter-clockwise, collinear points dropped.
    std::vector<Vec2> hull;
    for (int pass = 0; pass < 2; ++pass) {
      const std::size_t start = hull.size();
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const Vec2& p = pass == 0 ? pts[k] : pts[pts.size() - 1 - k];
        while (hull.size() >= start + 2 && turn(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
        hull.push_back(p);
      }
      hull.pop_back();
    }
    vertices_ = std::move(hull);
  }

  const Projection* proj_;
  std::array<Vec2, 4> normals_;
  std::array<FieldElement, 4> lower_, upper_;
  std::array<std::array<FieldElement, 4>, 4> coeff_;
  Vec2 direction_;
  std::vector<Vec2> vertices_;
};

/// Lattice points z with w(z - offset) in the half-open window: the
/// vertices of the planar tiling with slope E through `offset`.
class Selector {
 public:
  Selector(const Window& w, const Vec4& offset) {
    const auto& proj = w.projection();
    const Vec2 shift = proj.perp(offset);
    for (int i = 0; i < 4; ++i) {
      std::array<FieldElement, 4> a;
      std::array<FieldElement, 4> neg;
      for (int j = 0; j < 4; ++j) {
        a[j] = w.coefficient(i, j);
        neg[j] = -a[j];
      }
      const FieldElement s = Window::dot2(w.normal(i), shift);
      lower_[i] = LatticeForm(a, -s - w.lower(i));
      upper_[i] = LatticeForm(neg, w.upper(i) + s);
    }
  }

  bool operator()(const Point4& z) const {
    for (int i = 0; i < 4; ++i)
      if (!in_slab(i, z)) return false;
    return true;
  }

  /// Half-open membership in slab i alone, i.e. in W + R c_i.
  bool in_slab(int i, const Point4& z) const { return lower_[i].sign(z) >= 0 && upper_[i].sign(z) > 0; }

  /// z lies exactly on the boundary of the closed window.
  bool on_boundary(const Point4& z) const {
    bool inside = true, touches = false;
    for (int i = 0; i < 4; ++i) {
      int lo = lower_[i].sign(z), hi = upper_[i].sign(z);
      if (lo < 0 || hi < 0) inside = false;
      if (lo == 0 || hi == 0) touches = true;
    }
    return inside && touches;
  }

  /// Distance to the window centre measured by the slab gauge: the least t
  /// with w(z - offset) in centre + t (W - centre).
  FieldElement gauge(const Point4& z) const {
    FieldElement best;
    bool first = true;
    for (int i = 0; i < 4; ++i) {
      // n.p - lower and upper - n.p; half width h = (upper - lower) / 2
      FieldElement lo = lower_[i].value(z), hi = upper_[i].value(z);
      FieldElement width = lo + hi;
      FieldElement g = (lo - hi) / width;
      if (sign(g) < 0) g = -g;
      if (first || sign(g - best) > 0) best = g;
      first = false;
    }
    return best;
  }

  const LatticeForm& lower_form(int i) const { return lower_[i]; }
  const LatticeForm& upper_form(int i) const { return upper_[i]; }

 private:
  std::array<LatticeForm, 4> lower_, upper_;
};

}  // namespace octa
