#pragma once

#include <utility>

#include "ncrank/bipoly.hpp"

namespace ncrank {

/// Element of K = Q(zeta_N)(y, w): a reduced fraction num/den of bivariate
/// polynomials with den monic under the lexicographic term order.
///
/// Representation is canonical, so equality is structural (after bringing
/// both operands to a common cyclotomic index). Mixed-index arithmetic
/// works in Q(zeta_lcm).
class FieldScalar {
 public:
  FieldScalar() : num_(1), den_(CycloNumber(Rational(1))) {}
  FieldScalar(long v) : num_(CycloNumber(Rational(v))), den_(CycloNumber(Rational(1))) {}  // NOLINT
  FieldScalar(const Rational& q) : num_(CycloNumber(q)), den_(CycloNumber(Rational(1))) {}  // NOLINT
  FieldScalar(const CycloNumber& c) : num_(c), den_(CycloNumber(Rational(1), c.index())) {}  // NOLINT
  FieldScalar(const BiPoly& p) : num_(p), den_(CycloNumber(Rational(1), p.index())) {}  // NOLINT

  static FieldScalar y(int index = 1) { return FieldScalar(BiPoly::y(index)); }
  static FieldScalar w(int index = 1) { return FieldScalar(BiPoly::w(index)); }

  /// Assumes the pair is already canonical (used by the arithmetic fast paths).
  static FieldScalar from_canonical(BiPoly num, BiPoly den) {
    FieldScalar s;
    s.num_ = std::move(num);
    s.den_ = std::move(den);
    return s;
  }

  const BiPoly& num() const { return num_; }
  const BiPoly& den() const { return den_; }
  int index() const { return lcm_index(num_.index(), den_.index()); }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_one(); }
  /// Constant in Q(zeta_N) (no y or w).
  bool is_constant() const { return num_.is_constant() && den_.is_one(); }
  bool is_rational() const { return is_constant() && num_.constant_value().is_rational(); }
  Rational rational_value() const { return num_.constant_value().constant(); }

  FieldScalar embedded(int target) const {
    return from_canonical(num_.embedded(target), den_.embedded(target));
  }

  FieldScalar operator-() const { return from_canonical(-num_, den_); }

  friend FieldScalar operator+(const FieldScalar& a, const FieldScalar& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_.is_one() && b.den_.is_one()) return FieldScalar(a.num_ + b.num_);
    if (a.den_ == b.den_) return normalized(a.num_ + b.num_, a.den_);
    // gcd(n + m*d, d) = gcd(n, d) = 1, so no reduction is needed here.
    if (b.den_.is_one()) return from_canonical(a.num_ + b.num_ * a.den_, a.den_);
    if (a.den_.is_one()) return from_canonical(a.num_ * b.den_ + b.num_, b.den_);
    return normalized(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend FieldScalar operator-(const FieldScalar& a, const FieldScalar& b) { return a + (-b); }

  friend FieldScalar operator*(const FieldScalar& a, const FieldScalar& b) {
    if (a.is_zero() || b.is_zero()) return FieldScalar(BiPoly(lcm_index(a.index(), b.index())));
    if (a.den_.is_one() && b.den_.is_one()) return FieldScalar(a.num_ * b.num_);
    if (a.is_constant()) return from_canonical(b.num_.scaled(a.num_.lead().c), b.den_);
    if (b.is_constant()) return from_canonical(a.num_.scaled(b.num_.lead().c), a.den_);
    // Cross-cancel: both inputs are reduced, so these two gcds finish the job.
    BiPoly g1 = bipoly_gcd(a.num_, b.den_);
    BiPoly g2 = bipoly_gcd(b.num_, a.den_);
    BiPoly n1 = g1.is_one() ? a.num_ : exact_divide(a.num_, g1);
    BiPoly d2 = g1.is_one() ? b.den_ : exact_divide(b.den_, g1);
    BiPoly n2 = g2.is_one() ? b.num_ : exact_divide(b.num_, g2);
    BiPoly d1 = g2.is_one() ? a.den_ : exact_divide(a.den_, g2);
    return from_canonical(n1 * n2, make_monic(d1 * d2));
  }

  FieldScalar inverse() const {
    if (is_zero()) throw DivisionByZero("inverse of zero in K");
    CycloNumber lc_inv = cyclo_inverse(num_.lead().c);
    return from_canonical(den_.scaled(lc_inv), num_.scaled(lc_inv));
  }

  friend FieldScalar operator/(const FieldScalar& a, const FieldScalar& b) { return a * b.inverse(); }

  FieldScalar& operator+=(const FieldScalar& b) { return *this = *this + b; }
  FieldScalar& operator-=(const FieldScalar& b) { return *this = *this - b; }
  FieldScalar& operator*=(const FieldScalar& b) { return *this = *this * b; }
  FieldScalar& operator/=(const FieldScalar& b) { return *this = *this / b; }

  friend bool operator==(const FieldScalar& a, const FieldScalar& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const FieldScalar& a, const FieldScalar& b) { return !(a == b); }

  std::size_t max_bit_length() const { return std::max(num_.max_bit_length(), den_.max_bit_length()); }

  /// Canonical representative of num/den.
  static FieldScalar normalized(const BiPoly& num, const BiPoly& den) {
    if (den.is_zero()) throw DivisionByZero("zero denominator");
    int idx = lcm_index(num.index(), den.index());
    if (num.is_zero()) return FieldScalar(BiPoly(idx));
    BiPoly g = bipoly_gcd(num, den);
    BiPoly n = g.is_one() ? num : exact_divide(num, g);
    BiPoly d = g.is_one() ? den : exact_divide(den, g);
    CycloNumber lc = d.lead().c;
    if (!lc.is_one()) {
      CycloNumber inv = cyclo_inverse(lc);
      n = n.scaled(inv);
      d = d.scaled(inv);
    }
    return from_canonical(n.embedded(idx), d.embedded(idx));
  }

 private:
  BiPoly num_;
  BiPoly den_;
};

inline bool is_zero(const FieldScalar& a) { return a.is_zero(); }

/// Canonical scalar num/den; throws DivisionByZero when den = 0.
inline FieldScalar scalar_normalize(const BiPoly& num, const BiPoly& den) {
  return FieldScalar::normalized(num, den);
}

namespace detail {
inline BiPoly substitute_y_scaled(const BiPoly& p, const CycloNumber& factor) {
  std::vector<BiTerm> out;
  out.reserve(p.terms().size());
  CycloNumber one(Rational(1), factor.index());
  std::vector<CycloNumber> powers{one};
  for (const auto& t : p.terms()) {
    while (static_cast<int>(powers.size()) <= t.ey) powers.push_back(powers.back() * factor);
    out.push_back({t.ey, t.ew, t.c * powers[static_cast<std::size_t>(t.ey)]});
  }
  return BiPoly::from_terms(lcm_index(p.index(), factor.index()), std::move(out));
}
}  // namespace detail

/// Value at y = y0, w = w0, an element of Q(zeta). Throws DivisionByZero
/// when the denominator vanishes there.
inline FieldScalar specialize_yw(const FieldScalar& a, const Rational& y0, const Rational& w0) {
  if (a.is_constant()) return a;
  auto eval = [&](const BiPoly& p) {
    CycloNumber acc(Rational(0), p.index());
    for (const auto& t : p.terms()) {
      Rational f(1);
      for (int k = 0; k < t.ey; ++k) f *= y0;
      for (int k = 0; k < t.ew; ++k) f *= w0;
      acc += t.c.scaled(f);
    }
    return acc;
  };
  CycloNumber den = eval(a.den());
  if (den.is_zero()) throw DivisionByZero("specialize_yw: denominator vanishes");
  return FieldScalar(eval(a.num())) / FieldScalar(den);
}

/// sigma^j where sigma: y -> zeta_ell * y fixes Q(zeta_ell), w and y^ell.
inline FieldScalar galois_shift(const FieldScalar& a, long j, int ell) {
  if (ell < 1) throw std::invalid_argument("galois_shift: ell must be positive");
  long e = ((j % ell) + ell) % ell;
  if (e == 0 || a.is_constant()) return a;
  int idx = lcm_index(a.index(), ell);
  CycloNumber omega_j = cyclo_embed(CycloNumber::zeta(ell, e), idx);
  return FieldScalar::normalized(detail::substitute_y_scaled(a.num().embedded(idx), omega_j),
                                 detail::substitute_y_scaled(a.den().embedded(idx), omega_j));
}

}  // namespace ncrank
