#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace octa {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

/// Thrown for malformed textual input (rationals, configs, CLI values).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an operation's precondition is violated by its input data
/// (degenerate slope, relation that is not a subperiod, ...).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  return Rational(num, den);  // canonicalized by the gmp backend
}

/// Parses "p", "-p", "p/q". The result is always reduced with q > 0.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [](std::string_view s) -> Integer {
    if (s.empty()) throw ParseError("empty integer");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw ParseError("malformed integer '" + std::string(s) + "'");
    for (std::size_t k = i; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9') throw ParseError("malformed integer '" + std::string(s) + "'");
    return Integer(std::string(s[0] == '+' ? s.substr(1) : s));
  };
  text = trim(text);
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  Integer den = parse_int(trim(text.substr(slash + 1)));
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return make_rational(parse_int(trim(text.substr(0, slash))), den);
}

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& q) {
  const Integer& den = denominator(q);
  if (den == 1) return numerator(q).str();
  return numerator(q).str() + "/" + den.str();
}

inline int sign(const Rational& q) { return q.sign(); }

inline Integer gcd(Integer a, Integer b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Integer t = a % b;
    a = std::move(b);
    b = std::move(t);
  }
  return a;
}

inline Integer lcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  Integer g = gcd(a, b);
  Integer r = (a / g) * b;
  return r < 0 ? Integer(-r) : r;
}

/// Scales a rational vector to the primitive integer vector on the same ray
/// (gcd 1, first nonzero entry positive). The zero vector maps to zeros.
inline std::vector<Integer> primitive_integer(std::span<const Rational> v) {
  Integer den = 1;
  for (const auto& q : v) den = lcm(den, denominator(q));
  std::vector<Integer> out;
  out.reserve(v.size());
  Integer g = 0;
  for (const auto& q : v) {
    out.push_back(numerator(q) * (den / denominator(q)));
    g = gcd(g, out.back());
  }
  if (g == 0) return out;
  int lead = 0;
  for (const auto& x : out)
    if (x != 0) {
      lead = x.sign();
      break;
    }
  for (auto& x : out) x = x / g * lead;
  return out;
}

/// Writes |n| = s^2 * f with f squarefree; returns {s, f}. Trial division,
/// intended for the small discriminants produced by slope analysis.
inline std::pair<Integer, Integer> square_decompose(Integer n) {
  if (n < 0) n = -n;
  Integer s = 1, f = 1;
  for (Integer p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    for (int k = 0; k < e / 2; ++k) s *= p;
    if (e % 2) f *= p;
  }
  f *= n;
  return {s, f};
}

inline bool is_squarefree(std::int64_t d) {
  if (d < 2) return false;
  return square_decompose(Integer(d)).first == 1;
}

inline long double to_long_double(const Rational& q) { return q.convert_to<long double>(); }

}  // namespace octa
