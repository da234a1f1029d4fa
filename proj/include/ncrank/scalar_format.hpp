#pragma once

// Text encoding of scalars.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' digits)?
//   atom   := digits | 'u' | 'y' | 'w' | '(' expr ')'
//
// 'u' is zeta_N for the index N declared alongside the text; 'y' and 'w' are
// the transcendentals of K. Evaluation is exact, so "1/2*y" is the scalar
// y/2 and "(y^2-1)/(y-1)" parses to y+1.

#include <cctype>
#include <string>
#include <string_view>

#include "ncrank/field_scalar.hpp"

namespace ncrank {

inline std::string to_string(const CycloNumber& c) {
  std::string out;
  for (std::size_t k = 0; k < c.coeffs().size(); ++k) {
    const Rational& q = c.coeffs()[k];
    if (is_zero(q)) continue;
    bool neg = sgn(q) < 0;
    Rational mag = neg ? Rational(-q) : q;
    if (out.empty()) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    if (k == 0) {
      out += to_string(mag);
    } else {
      if (mag != 1) out += to_string(mag) + "*";
      out += "u";
      if (k > 1) out += "^" + std::to_string(k);
    }
  }
  return out.empty() ? "0" : out;
}

inline std::string to_string(const BiPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& t : p.terms()) {
    std::string mono;
    if (t.ey > 0) mono += t.ey == 1 ? "y" : "y^" + std::to_string(t.ey);
    if (t.ew > 0) {
      if (!mono.empty()) mono += "*";
      mono += t.ew == 1 ? "w" : "w^" + std::to_string(t.ew);
    }
    bool neg = false;
    std::string coeff;
    if (t.c.is_rational()) {
      Rational q = t.c.constant();
      neg = sgn(q) < 0;
      if (neg) q = -q;
      if (q != 1 || mono.empty()) coeff = to_string(q);
    } else {
      coeff = "(" + to_string(t.c) + ")";
    }
    if (out.empty()) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    out += coeff;
    if (!coeff.empty() && !mono.empty()) out += "*";
    out += mono;
  }
  return out;
}

inline std::string to_string(const FieldScalar& s) {
  if (s.is_polynomial()) return to_string(s.num());
  return "(" + to_string(s.num()) + ")/(" + to_string(s.den()) + ")";
}

namespace detail {

class ScalarParser {
 public:
  ScalarParser(std::string_view text, int index) : text_(text), index_(index) {}

  FieldScalar parse() {
    FieldScalar v = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("scalar '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + why);
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  FieldScalar expr() {
    FieldScalar v = term();
    while (true) {
      if (accept('+')) {
        v += term();
      } else if (accept('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }
  FieldScalar term() {
    FieldScalar v = unary();
    while (true) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        FieldScalar d = unary();
        if (d.is_zero()) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }
  FieldScalar unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  FieldScalar power() {
    FieldScalar base = atom();
    if (!accept('^')) return base;
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected exponent");
    if (pos_ - start > 6) fail("exponent too large");
    long e = std::stol(std::string(text_.substr(start, pos_ - start)));
    FieldScalar out(1L);
    for (long i = 0; i < e; ++i) out *= base;
    return out;
  }
  FieldScalar atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      Rational q(Integer(std::string(text_.substr(start, pos_ - start)), 10));
      return FieldScalar(CycloNumber(q, index_));
    }
    ++pos_;
    switch (c) {
      case 'u':
        return FieldScalar(CycloNumber::zeta(index_, 1));
      case 'y':
        return FieldScalar::y(index_);
      case 'w':
        return FieldScalar::w(index_);
      case '(': {
        FieldScalar v = expr();
        if (!accept(')')) fail("expected ')'");
        return v;
      }
      default:
        --pos_;
        fail(std::string("unexpected character '") + c + "'");
    }
  }

  std::string_view text_;
  int index_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a scalar in Q(zeta_index)(y, w); the result carries the given index.
inline FieldScalar parse_scalar(std::string_view text, int index = 1) {
  if (index < 1) throw ParseError("cyclotomic index must be positive");
  return detail::ScalarParser(text, index).parse().embedded(index);
}

}  // namespace ncrank
