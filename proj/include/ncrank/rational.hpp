#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ncrank {

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator (GMP canonical form).
using Rational = mpq_class;
using Integer = mpz_class;

class DivisionByZero : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// p/q in canonical form (the two-argument mpq constructor does not reduce).
inline Rational make_rational(long p, long q) {
  if (q == 0) throw std::domain_error("zero denominator");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

inline Rational rational_inverse(const Rational& q) {
  if (is_zero(q)) throw DivisionByZero("inverse of rational zero");
  return Rational(1) / q;
}

/// "p/q" or "p" when the denominator is 1.
inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Parses "p", "-p", "p/q" (q nonzero). Whitespace around the tokens is ignored.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [&](std::string_view s) {
    s = trim(s);
    std::string str(s);
    if (!str.empty() && str.front() == '+') str.erase(str.begin());
    if (str.empty()) throw ParseError("empty integer in rational literal");
    std::size_t start = str.front() == '-' ? 1 : 0;
    if (start == str.size()) throw ParseError("bad integer '" + str + "'");
    for (std::size_t i = start; i < str.size(); ++i)
      if (str[i] < '0' || str[i] > '9') throw ParseError("bad integer '" + str + "'");
    return Integer(str, 10);
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  Integer num = parse_int(text.substr(0, slash));
  Integer den = parse_int(text.substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator in rational literal");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Bit length of max(|num|, den); used for growth monitoring.
inline std::size_t bit_length(const Rational& q) {
  std::size_t a = mpz_sizeinbase(q.get_num_mpz_t(), 2);
  std::size_t b = mpz_sizeinbase(q.get_den_mpz_t(), 2);
  return a > b ? a : b;
}

}  // namespace ncrank
