#pragma once

#include "octa/subperiod.hpp"

#include <optional>
#include <string>
#include <vector>

namespace octa {

/// Linear forms of the subperiods on (G12, G13, G14, G23, G24, G34); the
/// Plucker quadric G12 G34 - G13 G24 + G14 G23 is implicit.
struct SubperiodSystem {
  std::vector<std::array<Integer, 6>> forms;

  static SubperiodSystem from(const std::vector<Subperiod>& sps) {
    SubperiodSystem sys;
    for (const auto& sp : sps) sys.forms.push_back(sp.linear_form());
    return sys;
  }

  Matrix<Rational> matrix() const {
    Matrix<Rational> m(0, 6);
    for (const auto& f : forms) {
      std::vector<Rational> row(f.begin(), f.end());
      m.append_row(row);
    }
    return m;
  }

  std::size_t rank() const { return forms.empty() ? 0 : octa::rank(matrix()); }

  bool annihilates(const GrassmannCoords& g) const {
    for (const auto& f : forms) {
      FieldElement s(g.field(), Rational(0));
      for (int k = 0; k < 6; ++k) s += g[k].scaled(Rational(f[k]));
      if (!s.is_zero()) return false;
    }
    return true;
  }

  std::vector<IntVector> kernel_basis() const {
    if (forms.empty()) {
      std::vector<IntVector> e;
      for (int k = 0; k < 6; ++k) {
        IntVector v(6, 0);
        v[k] = 1;
        e.push_back(v);
      }
      return e;
    }
    std::vector<IntVector> out;
    for (auto& v : kernel(matrix())) out.push_back(primitive_integer(v));
    return out;
  }
};

/// Symmetric bilinear form of the Plucker quadric, so that
/// P(x) = plucker_polar(x, x).
template <class T>
T plucker_polar(const std::vector<T>& x, const std::vector<T>& y) {
  T s = x[0] * y[5] + y[0] * x[5] - x[1] * y[4] - y[1] * x[4] + x[2] * y[3] + y[2] * x[3];
  return s / T(2);
}

/// Gram matrix of the Plucker form restricted to span(basis).
inline Matrix<Rational> restricted_plucker(const std::vector<IntVector>& basis) {
  const std::size_t n = basis.size();
  std::vector<std::vector<Rational>> q;
  for (const auto& b : basis) q.emplace_back(b.begin(), b.end());
  Matrix<Rational> s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = plucker_polar(q[i], q[j]);
  return s;
}

/// Projective root [alpha : beta] of a binary form.
struct ProjectiveRoot {
  FieldElement alpha, beta;
  bool at_infinity() const { return beta.is_zero(); }
  /// alpha / beta; only meaningful when !at_infinity().
  FieldElement ratio() const { return alpha / beta; }
};

enum class RootKind { TwoRational, TwoConjugate, Double, NoRealRoot, IdenticallyZero };

inline std::string to_string(RootKind k) {
  switch (k) {
    case RootKind::TwoRational: return "two-rational";
    case RootKind::TwoConjugate: return "two-conjugate";
    case RootKind::Double: return "double";
    case RootKind::NoRealRoot: return "no-real-root";
    case RootKind::IdenticallyZero: return "identically-zero";
  }
  return "?";
}

struct PencilSolution {
  Rational a, b, c;  // A alpha^2 + B alpha beta + C beta^2
  RootKind kind = RootKind::IdenticallyZero;
  FieldDescriptor field;  // field of the roots
  std::vector<ProjectiveRoot> roots;
};

/// Projective roots of A alpha^2 + B alpha beta + C beta^2. Irrational roots
/// live in Q(sqrt f), f the squarefree part of the discriminant.
inline PencilSolution solve_binary_quadratic(const Rational& A, const Rational& B, const Rational& C) {
  PencilSolution out{A, B, C};
  if (A == 0 && B == 0 && C == 0) return out;
  if (A == 0) {
    // beta * (B alpha + C beta)
    out.roots.push_back({FieldElement(Rational(1)), FieldElement(Rational(0))});
    if (B != 0) {
      out.kind = RootKind::TwoRational;
      out.roots.push_back({FieldElement(-C), FieldElement(B)});
    } else {
      out.kind = RootKind::Double;
    }
    return out;
  }
  Rational disc = B * B - 4 * A * C;
  if (disc < 0) {
    out.kind = RootKind::NoRealRoot;
    return out;
  }
  if (disc == 0) {
    out.kind = RootKind::Double;
    out.roots.push_back({FieldElement(-B), FieldElement(2 * A)});
    return out;
  }
  // sqrt(p/q) = sqrt(p q) / q = s sqrt(f) / q
  const Integer p = numerator(disc), q = denominator(disc);
  auto [s, f] = square_decompose(p * q);
  const Rational root_scale = Rational(s) / Rational(q);
  if (f == 1) {
    out.kind = RootKind::TwoRational;
    out.roots.push_back({FieldElement(-B + root_scale), FieldElement(2 * A)});
    out.roots.push_back({FieldElement(-B - root_scale), FieldElement(2 * A)});
    return out;
  }
  out.kind = RootKind::TwoConjugate;
  out.field = FieldDescriptor{f.convert_to<std::int64_t>()};
  FieldElement sq = FieldElement::radical(out.field, 1).scaled(root_scale);
  FieldElement minus_b(out.field, -B);
  FieldElement two_a(out.field, 2 * A);
  out.roots.push_back({minus_b + sq, two_a});
  out.roots.push_back({minus_b - sq, two_a});
  return out;
}

/// Restricts the Plucker form to the pencil alpha*w1 + beta*w2 and solves it.
inline PencilSolution solve_pencil(const IntVector& w1, const IntVector& w2) {
  auto s = restricted_plucker({w1, w2});
  Matrix<Rational> pair(0, 6);
  pair.append_row(std::vector<Rational>(w1.begin(), w1.end()));
  pair.append_row(std::vector<Rational>(w2.begin(), w2.end()));
  if (rank(pair) < 2) throw std::invalid_argument("pencil generators are dependent");
  return solve_binary_quadratic(s(0, 0), 2 * s(0, 1), s(1, 1));
}

enum class Status { Determined, OneParameterFamily, HigherDimensional, FewerThanThreeTypes };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::Determined: return "Determined";
    case Status::OneParameterFamily: return "OneParameterFamily";
    case Status::HigherDimensional: return "HigherDimensional";
    case Status::FewerThanThreeTypes: return "FewerThanThreeTypes";
  }
  return "?";
}

/// Solution set of a non-determined system: the kernel of the linear forms
/// and the Plucker conic (or binary form) restricted to it.
struct FamilyWitness {
  SubperiodSystem system;
  std::vector<IntVector> kernel_basis;
  Matrix<Rational> quadric;  // Gram matrix on kernel_basis

  /// g lies in the family: every form vanishes and Plucker holds.
  bool contains(const GrassmannCoords& g) const { return system.annihilates(g) && g.satisfies_plucker(); }
};

struct Verdict {
  Status status = Status::HigherDimensional;
  std::size_t rank = 0;
  std::vector<GrassmannCoords> solutions;
  std::optional<FamilyWitness> family;
  std::optional<PencilSolution> pencil;
};

inline GrassmannCoords coords_from(const IntVector& w) {
  std::array<FieldElement, 6> g;
  for (int k = 0; k < 6; ++k) g[k] = FieldElement(Rational(w[k]));
  return GrassmannCoords(FieldDescriptor{}, g);
}

/// Decides whether the subperiods together with the Plucker relation cut out
/// finitely many projective points (over the algebraic closure), and lists
/// them when they do.
inline Verdict determined_by_subperiods(const SubperiodSystem& sys) {
  Verdict v;
  v.rank = sys.rank();
  auto basis = sys.kernel_basis();
  const std::size_t kappa = basis.size();
  auto family = [&](Status st) {
    v.status = st;
    v.family = FamilyWitness{sys, basis, restricted_plucker(basis)};
    return v;
  };
  if (kappa == 0) throw PreconditionError("subperiod system has no nonzero solution");
  if (kappa == 1) {
    GrassmannCoords g = coords_from(basis[0]);
    if (!g.satisfies_plucker()) throw PreconditionError("subperiod system is inconsistent with Plucker");
    v.status = Status::Determined;
    v.solutions.push_back(g.normalize());
    return v;
  }
  if (kappa == 2) {
    PencilSolution pen = solve_pencil(basis[0], basis[1]);
    v.pencil = pen;
    if (pen.kind == RootKind::IdenticallyZero) return family(Status::OneParameterFamily);
    v.status = Status::Determined;
    for (const auto& root : pen.roots) {
      std::array<FieldElement, 6> g;
      for (int k = 0; k < 6; ++k)
        g[k] = root.alpha.scaled(Rational(basis[0][k])) + root.beta.scaled(Rational(basis[1][k]));
      const FieldDescriptor f = root.alpha.field().is_rational() ? root.beta.field() : root.alpha.field();
      v.solutions.push_back(GrassmannCoords(f, g).normalize());
    }
    return v;
  }
  Matrix<Rational> q = restricted_plucker(basis);
  bool zero = true;
  for (std::size_t i = 0; i < kappa; ++i)
    for (std::size_t j = 0; j < kappa; ++j) zero = zero && q(i, j) == 0;
  // A quadric section of P^2 is a curve; of P^(kappa-1), kappa >= 4, a
  // surface or more.
  if (kappa == 3 && !zero) return family(Status::OneParameterFamily);
  return family(Status::HigherDimensional);
}

/// Compares two projective points that may be written over different
/// (nested) fields.
inline bool same_point(const GrassmannCoords& a, const GrassmannCoords& b) {
  try {
    return a.in(b.field()).proportional_to(b);
  } catch (const DescriptorMismatch&) {
  }
  try {
    return b.in(a.field()).proportional_to(a);
  } catch (const DescriptorMismatch&) {
  }
  return false;
}

struct Analysis {
  GrassmannCoords grassmann;
  std::vector<Subperiod> subperiods;
  int types = 0;
  Verdict verdict;
};

/// Full pipeline: Grassmann coordinates, subperiods with lifts, verdict.
inline Analysis analyze(const Slope& s) {
  Analysis a;
  a.grassmann = grassmann(s);
  if (!is_nondegenerate(a.grassmann)) throw PreconditionError("slope is degenerate (a Grassmann coordinate vanishes)");
  a.subperiods = find_subperiods(s);
  a.types = count_types(a.subperiods);
  const auto sys = SubperiodSystem::from(a.subperiods);
  if (a.types < 3) {
    a.verdict.status = Status::FewerThanThreeTypes;
    a.verdict.rank = sys.rank();
    return a;
  }
  a.verdict = determined_by_subperiods(sys);
  return a;
}

}  // namespace octa
