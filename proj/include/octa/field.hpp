#pragma once

#include "octa/rational.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace octa {

/// Thrown when two field elements from different fields are combined.
class DescriptorMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The field Q, Q(sqrt d1) or Q(sqrt d1, sqrt d2).
///
/// The monomial basis is indexed by a bit mask: bit 0 selects sqrt(d1) and
/// bit 1 selects sqrt(d2), so index 3 is sqrt(d1 d2).
class FieldDescriptor {
 public:
  FieldDescriptor() = default;

  FieldDescriptor(std::initializer_list<std::int64_t> radicands)
      : FieldDescriptor(std::vector<std::int64_t>(radicands)) {}

  explicit FieldDescriptor(const std::vector<std::int64_t>& radicands) {
    if (radicands.size() > 2)
      throw std::invalid_argument("at most two radicands are supported");
    for (auto d : radicands)
      if (!is_squarefree(d))
        throw std::invalid_argument("radicand " + std::to_string(d) +
                                    " is not a squarefree integer >= 2");
    if (radicands.size() == 2 && radicands[0] == radicands[1])
      throw std::invalid_argument("radicands must be distinct");
    count_ = static_cast<int>(radicands.size());
    for (int i = 0; i < count_; ++i) radicands_[i] = radicands[i];
  }

  int count() const { return count_; }
  int dimension() const { return 1 << count_; }
  std::int64_t radicand(int i) const { return radicands_.at(i); }
  std::vector<std::int64_t> radicands() const {
    return {radicands_.begin(), radicands_.begin() + count_};
  }
  bool is_rational() const { return count_ == 0; }

  /// Product of the squares of the basis radicals selected by `mask`.
  std::int64_t radical_square(unsigned mask) const {
    std::int64_t p = 1;
    for (int i = 0; i < count_; ++i)
      if (mask & (1u << i)) p *= radicands_[i];
    return p;
  }

  /// The field generated by the first radicand only.
  FieldDescriptor first_subfield() const {
    FieldDescriptor f;
    if (count_ >= 1) {
      f.count_ = 1;
      f.radicands_[0] = radicands_[0];
    }
    return f;
  }

  friend bool operator==(const FieldDescriptor& a, const FieldDescriptor& b) {
    if (a.count_ != b.count_) return false;
    for (int i = 0; i < a.count_; ++i)
      if (a.radicands_[i] != b.radicands_[i]) return false;
    return true;
  }

  std::string str() const {
    std::string s = "Q";
    if (count_ == 0) return s;
    s += "(";
    for (int i = 0; i < count_; ++i) s += (i ? ",sqrt" : "sqrt") + std::to_string(radicands_[i]);
    return s + ")";
  }

 private:
  int count_ = 0;
  std::array<std::int64_t, 2> radicands_{};
};

/// Exact element of a multi-quadratic field, stored on the monomial basis.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(FieldDescriptor field, Rational value) : field_(field) {
    coeffs_[0] = std::move(value);
  }
  FieldElement(FieldDescriptor field, std::vector<Rational> coeffs) : field_(field) {
    if (static_cast<int>(coeffs.size()) != field.dimension())
      throw std::invalid_argument("expected " + std::to_string(field.dimension()) +
                                  " coefficients for " + field.str());
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs_[i] = std::move(coeffs[i]);
  }
  /// Rational constant in Q.
  FieldElement(const Rational& value) : FieldElement(FieldDescriptor{}, value) {}  // NOLINT
  FieldElement(long value) : FieldElement(FieldDescriptor{}, Rational(value)) {}   // NOLINT
  FieldElement(int value) : FieldElement(FieldDescriptor{}, Rational(value)) {}    // NOLINT

  /// The basis monomial selected by `mask` (1 is sqrt d1, 3 is sqrt(d1 d2)).
  static FieldElement radical(const FieldDescriptor& field, unsigned mask) {
    if (static_cast<int>(mask) >= field.dimension())
      throw std::out_of_range("basis index outside field");
    FieldElement e(field, Rational(0));
    e.coeffs_[mask] = 1;
    return e;
  }

  const FieldDescriptor& field() const { return field_; }
  int dimension() const { return field_.dimension(); }
  const Rational& coeff(unsigned mask) const { return coeffs_.at(mask); }
  std::vector<Rational> coeffs() const {
    return {coeffs_.begin(), coeffs_.begin() + dimension()};
  }

  bool is_zero() const {
    for (int i = 0; i < dimension(); ++i)
      if (coeffs_[i] != 0) return false;
    return true;
  }
  bool is_rational() const {
    for (int i = 1; i < dimension(); ++i)
      if (coeffs_[i] != 0) return false;
    return true;
  }
  const Rational& rational_part() const { return coeffs_[0]; }

  /// Same value seen in another field. Only constants change field here;
  /// embeddings between distinct fields are done by `embed`.
  FieldElement in(const FieldDescriptor& target) const {
    if (field_ == target) return *this;
    if (!is_rational())
      throw DescriptorMismatch("cannot move " + str() + " into " + target.str());
    return FieldElement(target, coeffs_[0]);
  }

  FieldElement& operator+=(const FieldElement& b) {
    unify(b);
    const FieldElement& o = b.field_ == field_ ? b : b.in(field_);
    for (int i = 0; i < dimension(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  FieldElement& operator-=(const FieldElement& b) {
    unify(b);
    const FieldElement& o = b.field_ == field_ ? b : b.in(field_);
    for (int i = 0; i < dimension(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  FieldElement& operator*=(const FieldElement& b) { return *this = *this * b; }
  FieldElement& operator/=(const FieldElement& b) { return *this = *this * b.inverse(); }

  friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    return a * b.inverse();
  }
  FieldElement operator-() const {
    FieldElement r = *this;
    for (int i = 0; i < dimension(); ++i) r.coeffs_[i] = -r.coeffs_[i];
    return r;
  }

  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    if (b.is_rational()) return a.scaled(b.coeffs_[0]).with_field(common(a, b));
    if (a.is_rational()) return b.scaled(a.coeffs_[0]).with_field(common(a, b));
    if (!(a.field_ == b.field_)) throw DescriptorMismatch(a.field_.str() + " vs " + b.field_.str());
    FieldElement r(a.field_, Rational(0));
    const int n = a.dimension();
    for (int i = 0; i < n; ++i) {
      if (a.coeffs_[i] == 0) continue;
      for (int j = 0; j < n; ++j) {
        if (b.coeffs_[j] == 0) continue;
        const unsigned both = static_cast<unsigned>(i & j);
        r.coeffs_[i ^ j] += a.coeffs_[i] * b.coeffs_[j] * a.field_.radical_square(both);
      }
    }
    return r;
  }

  FieldElement scaled(const Rational& q) const {
    FieldElement r = *this;
    for (int i = 0; i < dimension(); ++i) r.coeffs_[i] *= q;
    return r;
  }

  /// Image under the automorphism flipping the radicals selected by `flips`.
  FieldElement conjugate(unsigned flips) const {
    FieldElement r = *this;
    for (int i = 0; i < dimension(); ++i)
      if (__builtin_popcount(static_cast<unsigned>(i) & flips) % 2) r.coeffs_[i] = -r.coeffs_[i];
    return r;
  }

  /// Product of all nontrivial conjugates: a * norm_cofactor() is rational.
  FieldElement norm_cofactor() const {
    FieldElement r(field_, Rational(1));
    for (unsigned m = 1; m < static_cast<unsigned>(dimension()); ++m) r = r * conjugate(m);
    return r;
  }

  FieldElement inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero");
    if (is_rational()) return FieldElement(field_, Rational(1) / coeffs_[0]);
    FieldElement cof = norm_cofactor();
    Rational norm = (*this * cof).coeffs_[0];
    return cof.scaled(Rational(1) / norm);
  }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    if (a.field_ == b.field_) {
      for (int i = 0; i < a.dimension(); ++i)
        if (a.coeffs_[i] != b.coeffs_[i]) return false;
      return true;
    }
    return a.is_rational() && b.is_rational() && a.coeffs_[0] == b.coeffs_[0];
  }

  /// Value under the embedding with all radicals positive.
  long double approx() const {
    long double s = 0;
    for (int i = 0; i < dimension(); ++i)
      if (coeffs_[i] != 0)
        s += to_long_double(coeffs_[i]) *
             std::sqrt(static_cast<long double>(field_.radical_square(static_cast<unsigned>(i))));
    return s;
  }

  std::string str() const {
    std::string s;
    for (int i = 0; i < dimension(); ++i) {
      if (coeffs_[i] == 0) continue;
      if (!s.empty()) s += " + ";
      s += to_string(coeffs_[i]);
      if (i) s += "*sqrt" + std::to_string(field_.radical_square(static_cast<unsigned>(i)));
    }
    return s.empty() ? "0" : s;
  }

 private:
  static FieldDescriptor common(const FieldElement& a, const FieldElement& b) {
    if (a.field_ == b.field_) return a.field_;
    if (a.is_rational() && a.field_.is_rational()) return b.field_;
    if (b.is_rational() && b.field_.is_rational()) return a.field_;
    throw DescriptorMismatch(a.field_.str() + " vs " + b.field_.str());
  }
  FieldElement with_field(const FieldDescriptor& f) const {
    if (f == field_) return *this;
    return in(f);
  }
  // Elements of Q act as constants in every field; anything else must match.
  void unify(const FieldElement& b) {
    if (field_ == b.field_) return;
    if (field_.is_rational() && is_rational()) {
      *this = in(b.field_);
      return;
    }
    if (b.field_.is_rational()) return;
    throw DescriptorMismatch(field_.str() + " vs " + b.field_.str());
  }

  FieldDescriptor field_;
  std::array<Rational, 4> coeffs_{};
};

inline std::ostream& operator<<(std::ostream& os, const FieldElement& a) { return os << a.str(); }

/// Exact sign under the positive-root embedding, by recursion on the last
/// radical: a = A + B sqrt(d) with A, B in the subfield.
inline int sign(const FieldElement& a) {
  const FieldDescriptor& f = a.field();
  if (f.count() == 0) return a.coeff(0).sign();
  if (f.count() == 1) {
    const Rational& A = a.coeff(0);
    const Rational& B = a.coeff(1);
    if (B == 0) return A.sign();
    if (A == 0) return B.sign();
    if (A.sign() == B.sign()) return A.sign();
    return A.sign() * (A * A - B * B * f.radicand(0)).sign();
  }
  FieldDescriptor sub = f.first_subfield();
  FieldElement A(sub, std::vector<Rational>{a.coeff(0), a.coeff(1)});
  FieldElement B(sub, std::vector<Rational>{a.coeff(2), a.coeff(3)});
  const int sa = sign(A), sb = sign(B);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  return sa * sign(A * A - B * B * FieldElement(sub, Rational(f.radicand(1))));
}

inline bool is_zero(const FieldElement& a) { return a.is_zero(); }
inline bool is_zero(const Rational& q) { return q == 0; }
inline Rational inverse(const Rational& q) {
  if (q == 0) throw std::domain_error("inverse of zero");
  return Rational(1) / q;
}
inline FieldElement inverse(const FieldElement& a) { return a.inverse(); }

inline FieldElement add(const FieldElement& a, const FieldElement& b) {
  if (!(a.field() == b.field())) throw DescriptorMismatch(a.field().str() + " vs " + b.field().str());
  return a + b;
}
inline FieldElement mul(const FieldElement& a, const FieldElement& b) {
  if (!(a.field() == b.field())) throw DescriptorMismatch(a.field().str() + " vs " + b.field().str());
  return a * b;
}

inline int compare(const FieldElement& a, const FieldElement& b) { return sign(a - b); }

/// Images under every sign flip of the radicals; entry m flips the radicals
/// in bit mask m, so entry 0 is `a` itself.
inline std::vector<FieldElement> conjugations(const FieldElement& a) {
  std::vector<FieldElement> out;
  for (unsigned m = 0; m < static_cast<unsigned>(a.dimension()); ++m) out.push_back(a.conjugate(m));
  return out;
}

/// Largest integer n with n <= a.
inline Integer floor(const FieldElement& a) {
  if (a.is_rational()) {
    const Rational& q = a.coeff(0);
    Integer n = numerator(q) / denominator(q);
    if (n * denominator(q) > numerator(q)) n -= 1;
    return n;
  }
  auto guess = static_cast<long long>(std::floor(a.approx()));
  Integer n(guess);
  while (sign(a - FieldElement(Rational(n))) < 0) n -= 1;
  while (sign(a - FieldElement(Rational(n + 1))) >= 0) n += 1;
  return n;
}

/// Maps `a` into `target` when a's field is a subfield of it (for instance
/// Q(sqrt 6) inside Q(sqrt 2, sqrt 3)). Throws DescriptorMismatch otherwise.
inline FieldElement embed(const FieldElement& a, const FieldDescriptor& target) {
  if (a.field() == target || a.is_rational()) return a.in(target);
  FieldElement out(target, Rational(0));
  for (unsigned m = 0; m < static_cast<unsigned>(a.dimension()); ++m) {
    if (a.coeff(m) == 0) continue;
    const std::int64_t want = a.field().radical_square(m);
    bool placed = false;
    for (unsigned t = 0; t < static_cast<unsigned>(target.dimension()) && !placed; ++t) {
      auto [s, f] = square_decompose(Integer(target.radical_square(t)));
      if (f != want) continue;
      // sqrt(want) = sqrt(radical_square(t)) / s
      FieldElement basis = FieldElement::radical(target, t).scaled(Rational(1) / Rational(s));
      out += basis.scaled(a.coeff(m));
      placed = true;
    }
    if (!placed) throw DescriptorMismatch(a.field().str() + " does not embed in " + target.str());
  }
  return out;
}

template <std::size_t N>
using FieldVector = std::array<FieldElement, N>;

}  // namespace octa
