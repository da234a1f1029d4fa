#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ncrank/cyclotomic.hpp"
#include "ncrank/modarith.hpp"

namespace ncrank {

/// One term c * y^ey * w^ew.
struct BiTerm {
  int ey = 0;
  int ew = 0;
  CycloNumber c;
};

/// Sparse polynomial in the commuting variables y, w over Q(zeta_N).
///
/// Terms are kept sorted by descending (ey, ew) in lexicographic order with
/// y before w, so the first term is the leading term and equality is
/// structural. Zero coefficients are never stored.
class BiPoly {
 public:
  BiPoly() = default;
  explicit BiPoly(int index) : index_(index) {}
  BiPoly(const CycloNumber& c) : index_(c.index()) {  // NOLINT(google-explicit-constructor)
    if (!c.is_zero()) terms_.push_back({0, 0, c});
  }

  static BiPoly monomial(const CycloNumber& c, int ey, int ew) {
    if (ey < 0 || ew < 0) throw std::invalid_argument("negative exponent in monomial");
    BiPoly p(c.index());
    if (!c.is_zero()) p.terms_.push_back({ey, ew, c});
    return p;
  }
  static BiPoly y(int index = 1) { return monomial(CycloNumber(Rational(1), index), 1, 0); }
  static BiPoly w(int index = 1) { return monomial(CycloNumber(Rational(1), index), 0, 1); }

  /// Builds from unsorted terms; like terms are combined.
  static BiPoly from_terms(int index, std::vector<BiTerm> terms) {
    BiPoly p(index);
    for (auto& t : terms)
      if (t.c.index() != index) t.c = cyclo_embed(t.c, lcm_index(index, t.c.index()));
    for (const auto& t : terms) p.index_ = lcm_index(p.index_, t.c.index());
    for (auto& t : terms)
      if (t.c.index() != p.index_) t.c = cyclo_embed(t.c, p.index_);
    std::sort(terms.begin(), terms.end(), [](const BiTerm& a, const BiTerm& b) {
      return a.ey != b.ey ? a.ey > b.ey : a.ew > b.ew;
    });
    for (auto& t : terms) {
      if (!p.terms_.empty() && p.terms_.back().ey == t.ey && p.terms_.back().ew == t.ew) {
        p.terms_.back().c += t.c;
      } else {
        if (!p.terms_.empty() && p.terms_.back().c.is_zero()) p.terms_.pop_back();
        p.terms_.push_back(std::move(t));
      }
    }
    if (!p.terms_.empty() && p.terms_.back().c.is_zero()) p.terms_.pop_back();
    return p;
  }

  int index() const { return index_; }
  const std::vector<BiTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].ey == 0 && terms_[0].ew == 0);
  }
  bool is_one() const { return is_constant() && !terms_.empty() && terms_[0].c.is_one(); }
  bool is_monomial() const { return terms_.size() == 1; }
  /// Leading term; requires nonzero.
  const BiTerm& lead() const { return terms_.front(); }
  CycloNumber constant_value() const {
    if (terms_.empty()) return CycloNumber(Rational(0), index_);
    return terms_.back().ey == 0 && terms_.back().ew == 0 ? terms_.back().c
                                                           : CycloNumber(Rational(0), index_);
  }

  int deg_y() const { return terms_.empty() ? -1 : terms_.front().ey; }
  int deg_w() const {
    int d = -1;
    for (const auto& t : terms_) d = std::max(d, t.ew);
    return d;
  }
  int min_y() const {
    int d = terms_.empty() ? 0 : terms_.front().ey;
    for (const auto& t : terms_) d = std::min(d, t.ey);
    return d;
  }
  int min_w() const {
    int d = terms_.empty() ? 0 : terms_.front().ew;
    for (const auto& t : terms_) d = std::min(d, t.ew);
    return d;
  }

  BiPoly embedded(int target) const {
    if (target == index_) return *this;
    BiPoly p(target);
    p.terms_.reserve(terms_.size());
    for (const auto& t : terms_) p.terms_.push_back({t.ey, t.ew, cyclo_embed(t.c, target)});
    return p;
  }

  BiPoly operator-() const {
    BiPoly p = *this;
    for (auto& t : p.terms_) t.c = -t.c;
    return p;
  }

  BiPoly scaled(const CycloNumber& c) const {
    if (c.is_zero()) return BiPoly(lcm_index(index_, c.index()));
    std::vector<BiTerm> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back({t.ey, t.ew, t.c * c});
    BiPoly p(lcm_index(index_, c.index()));
    p.terms_ = std::move(out);
    return p;
  }

  /// Multiplies by y^ey * w^ew.
  BiPoly shifted(int ey, int ew) const {
    BiPoly p = *this;
    for (auto& t : p.terms_) {
      t.ey += ey;
      t.ew += ew;
    }
    return p;
  }

  /// Coefficient of y^k as a polynomial in w alone.
  BiPoly coeff_y(int k) const {
    BiPoly p(index_);
    for (const auto& t : terms_)
      if (t.ey == k) p.terms_.push_back({0, t.ew, t.c});
    return p;
  }

  friend BiPoly operator+(const BiPoly& a, const BiPoly& b) { return merge(a, b, false); }
  friend BiPoly operator-(const BiPoly& a, const BiPoly& b) { return merge(a, b, true); }
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    int idx = lcm_index(a.index_, b.index_);
    if (a.is_zero() || b.is_zero()) return BiPoly(idx);
    if (a.is_constant()) return b.scaled(a.terms_[0].c);
    if (b.is_constant()) return a.scaled(b.terms_[0].c);
    std::vector<BiTerm> prod;
    prod.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_)
      for (const auto& t : b.terms_) prod.push_back({s.ey + t.ey, s.ew + t.ew, s.c * t.c});
    return from_terms(idx, std::move(prod));
  }
  friend bool operator==(const BiPoly& a, const BiPoly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      const auto& s = a.terms_[i];
      const auto& t = b.terms_[i];
      if (s.ey != t.ey || s.ew != t.ew || !(s.c == t.c)) return false;
    }
    return true;
  }

  std::size_t max_bit_length() const {
    std::size_t m = 0;
    for (const auto& t : terms_) m = std::max(m, t.c.max_bit_length());
    return m;
  }

 private:
  static BiPoly merge(const BiPoly& a, const BiPoly& b, bool subtract) {
    int idx = lcm_index(a.index_, b.index_);
    if (a.index_ != idx || b.index_ != idx) return merge(a.embedded(idx), b.embedded(idx), subtract);
    BiPoly p(idx);
    p.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    auto greater = [](const BiTerm& s, const BiTerm& t) {
      return s.ey != t.ey ? s.ey > t.ey : s.ew > t.ew;
    };
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && greater(a.terms_[i], b.terms_[j]))) {
        p.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || greater(b.terms_[j], a.terms_[i])) {
        const auto& t = b.terms_[j++];
        p.terms_.push_back({t.ey, t.ew, subtract ? -t.c : t.c});
      } else {
        CycloNumber c = subtract ? a.terms_[i].c - b.terms_[j].c : a.terms_[i].c + b.terms_[j].c;
        if (!c.is_zero()) p.terms_.push_back({a.terms_[i].ey, a.terms_[i].ew, std::move(c)});
        ++i;
        ++j;
      }
    }
    return p;
  }

  int index_ = 1;
  std::vector<BiTerm> terms_;
};

inline bool is_zero(const BiPoly& p) { return p.is_zero(); }

/// Divides by the leading coefficient so the leading term has coefficient 1.
inline BiPoly make_monic(const BiPoly& p) {
  if (p.is_zero() || p.lead().c.is_one()) return p;
  return p.scaled(cyclo_inverse(p.lead().c));
}

/// Exact quotient a / b; throws std::domain_error if b does not divide a.
inline BiPoly exact_divide(const BiPoly& a, const BiPoly& b) {
  if (b.is_zero()) throw DivisionByZero("polynomial division by zero");
  int idx = lcm_index(a.index(), b.index());
  if (b.is_constant()) return a.scaled(cyclo_inverse(b.lead().c)).embedded(idx);
  const BiTerm& lb = b.lead();
  CycloNumber inv = cyclo_inverse(lb.c);
  std::vector<BiTerm> quotient;
  BiPoly r = a.embedded(idx);
  while (!r.is_zero()) {
    const BiTerm& lr = r.lead();
    if (lr.ey < lb.ey || lr.ew < lb.ew) throw std::domain_error("inexact polynomial division");
    BiTerm t{lr.ey - lb.ey, lr.ew - lb.ew, lr.c * inv};
    r = r - (b * BiPoly::monomial(t.c, t.ey, t.ew));
    quotient.push_back(std::move(t));
  }
  return BiPoly::from_terms(idx, std::move(quotient));
}

namespace detail {

using UPoly = std::vector<CycloNumber>;  // ascending coefficients, common index

inline void upoly_trim(UPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

// Monic gcd in Q(zeta)[t] by the Euclidean algorithm.
inline UPoly upoly_gcd(UPoly a, UPoly b) {
  upoly_trim(a);
  upoly_trim(b);
  while (!b.empty()) {
    CycloNumber inv = cyclo_inverse(b.back());
    while (a.size() >= b.size()) {
      CycloNumber f = a.back() * inv;
      std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i)
        if (!b[i].is_zero()) a[shift + i] = a[shift + i] - f * b[i];
      a.pop_back();
      upoly_trim(a);
    }
    std::swap(a, b);
  }
  if (!a.empty() && !a.back().is_one()) {
    CycloNumber inv = cyclo_inverse(a.back());
    for (auto& c : a) c = c * inv;
  }
  return a;
}

// Image of a cyclotomic number under zeta_N -> h in F_p.
inline std::optional<u64> cyclo_image(const CycloNumber& c, const PrimeRoot& pr) {
  u64 acc = 0, pw = 1;
  for (const auto& q : c.coeffs()) {
    if (sgn(q) != 0) {
      Integer n, d;
      mpz_fdiv_r_ui(n.get_mpz_t(), q.get_num_mpz_t(), pr.p);
      mpz_fdiv_r_ui(d.get_mpz_t(), q.get_den_mpz_t(), pr.p);
      u64 dv = d.get_ui();
      if (dv == 0) return std::nullopt;
      u64 v = mulmod(n.get_ui(), powmod(dv, pr.p - 2, pr.p), pr.p);
      acc = (acc + mulmod(v, pw, pr.p)) % pr.p;
    }
    pw = mulmod(pw, pr.h, pr.p);
  }
  return acc;
}

// Image of p in F_p[t] after substituting a fixed value for the other
// variable; t is y when `in_y`, else w. Empty optional if undefined.
inline std::optional<std::vector<u64>> bipoly_image(const BiPoly& p, bool in_y, const PrimeRoot& pr, u64 other) {
  int deg = 0;
  for (const auto& t : p.terms()) deg = std::max(deg, in_y ? t.ey : t.ew);
  std::vector<u64> out(static_cast<std::size_t>(deg) + 1, 0);
  for (const auto& t : p.terms()) {
    auto c = cyclo_image(t.c, pr);
    if (!c) return std::nullopt;
    u64 v = mulmod(*c, powmod(other, static_cast<u64>(in_y ? t.ew : t.ey), pr.p), pr.p);
    auto& slot = out[static_cast<std::size_t>(in_y ? t.ey : t.ew)];
    slot = (slot + v) % pr.p;
  }
  return out;
}

// True when the images certify that gcd(a, b) has degree 0 in the chosen
// variable. Sound because an image of a common factor keeps its degree as
// long as one input keeps its degree under the map.
inline bool certify_degree_zero(const BiPoly& a, const BiPoly& b, bool in_y, int idx) {
  PrimeRoot pr = prime_with_root(idx, 0);
  const u64 other = in_y ? 0x2545F4914F6CDD1DULL % pr.p : 0x5851F42D4C957F2DULL % pr.p;
  auto ia = bipoly_image(a.embedded(idx), in_y, pr, other);
  auto ib = bipoly_image(b.embedded(idx), in_y, pr, other);
  if (!ia || !ib) return false;
  if (ia->back() == 0 && ib->back() == 0) return false;
  return gcd_degree_mod(std::move(*ia), std::move(*ib), pr.p) == 0;
}

// Coefficients of a w-only polynomial as a UPoly in w.
inline UPoly as_upoly_w(const BiPoly& p) {
  UPoly out(static_cast<std::size_t>(std::max(p.deg_w(), 0)) + 1, CycloNumber(Rational(0), p.index()));
  for (const auto& t : p.terms()) out[static_cast<std::size_t>(t.ew)] = t.c;
  upoly_trim(out);
  return out;
}

inline BiPoly from_upoly_w(const UPoly& u, int idx) {
  std::vector<BiTerm> ts;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (!u[k].is_zero()) ts.push_back({0, static_cast<int>(k), u[k]});
  return BiPoly::from_terms(idx, std::move(ts));
}

// Monic gcd of two polynomials in w alone (y-degree 0).
inline BiPoly gcd_w(const BiPoly& a, const BiPoly& b) {
  int idx = lcm_index(a.index(), b.index());
  if (a.is_zero()) return make_monic(b.embedded(idx));
  if (b.is_zero()) return make_monic(a.embedded(idx));
  BiPoly one(CycloNumber(Rational(1), idx));
  if (a.is_constant() || b.is_constant()) return one;
  if (a == b) return make_monic(a.embedded(idx));
  if (a.is_monomial() || b.is_monomial()) {
    const BiPoly& m = a.is_monomial() ? a : b;
    const BiPoly& o = a.is_monomial() ? b : a;
    return BiPoly::monomial(CycloNumber(Rational(1), idx), 0, std::min(m.lead().ew, o.min_w()));
  }
  if (certify_degree_zero(a, b, false, idx)) return one;
  return from_upoly_w(upoly_gcd(as_upoly_w(a.embedded(idx)), as_upoly_w(b.embedded(idx))), idx);
}

// Content with respect to y: gcd of the y-coefficients, as a w-polynomial.
inline BiPoly content_y(const BiPoly& p) {
  BiPoly g(p.index());
  for (int k = p.deg_y(); k >= 0; --k) {
    BiPoly c = p.coeff_y(k);
    if (c.is_zero()) continue;
    g = gcd_w(g, c);
    if (g.is_constant()) break;
  }
  return g;
}

inline BiPoly primitive_part(const BiPoly& p) {
  BiPoly c = content_y(p);
  return c.is_constant() ? p : exact_divide(p, c);
}

inline CycloNumber eval_w_poly(const BiPoly& p, const CycloNumber& x) {
  CycloNumber acc(Rational(0), p.index());
  for (const auto& t : p.terms()) {
    CycloNumber v = t.c;
    for (int e = 0; e < t.ew; ++e) v = v * x;
    acc = acc + v;
  }
  return acc;
}

// p(y, x) as a polynomial in y.
inline UPoly eval_w_point(const BiPoly& p, const CycloNumber& x) {
  UPoly out(static_cast<std::size_t>(std::max(p.deg_y(), 0)) + 1, CycloNumber(Rational(0), p.index()));
  for (const auto& t : p.terms()) {
    CycloNumber v = t.c;
    for (int e = 0; e < t.ew; ++e) v = v * x;
    out[static_cast<std::size_t>(t.ey)] = out[static_cast<std::size_t>(t.ey)] + v;
  }
  upoly_trim(out);
  return out;
}

// Newton interpolation in w of the y-coefficients of the samples.
inline BiPoly interpolate_w(const std::vector<long>& xs, const std::vector<UPoly>& hs, int idx) {
  const std::size_t m = xs.size();
  std::size_t dy = 0;
  for (const auto& h : hs) dy = std::max(dy, h.size());
  std::vector<BiTerm> terms;
  for (std::size_t k = 0; k < dy; ++k) {
    std::vector<CycloNumber> dd(m);
    for (std::size_t i = 0; i < m; ++i) dd[i] = k < hs[i].size() ? hs[i][k] : CycloNumber(Rational(0), idx);
    for (std::size_t j = 1; j < m; ++j)
      for (std::size_t i = m - 1; i >= j; --i) {
        dd[i] = (dd[i] - dd[i - 1]).scaled(make_rational(1, xs[i] - xs[i - j]));
        if (i == j) break;
      }
    UPoly poly{dd[m - 1]};
    for (std::size_t i = m - 1; i-- > 0;) {
      // poly <- poly * (w - x_i) + dd[i]
      UPoly next(poly.size() + 1, CycloNumber(Rational(0), idx));
      for (std::size_t e = 0; e < poly.size(); ++e) {
        next[e + 1] = next[e + 1] + poly[e];
        next[e] = next[e] - poly[e].scaled(Rational(xs[i]));
      }
      next[0] = next[0] + dd[i];
      poly = std::move(next);
    }
    for (std::size_t e = 0; e < poly.size(); ++e)
      if (!poly[e].is_zero()) terms.push_back({static_cast<int>(k), static_cast<int>(e), poly[e]});
  }
  return BiPoly::from_terms(idx, std::move(terms));
}

inline bool divides(const BiPoly& g, const BiPoly& a) {
  try {
    (void)exact_divide(a, g);
    return true;
  } catch (const std::domain_error&) {
    return false;
  }
}

// gcd of two y-primitive polynomials by evaluation at w = 0, 1, 2, ...,
// univariate gcds in y and interpolation in w (Brown's dense scheme);
// the result is verified by exact division.
inline BiPoly gcd_primitive(const BiPoly& pa, const BiPoly& pb, int idx) {
  BiPoly one(CycloNumber(Rational(1), idx));
  BiPoly la = pa.coeff_y(pa.deg_y());
  BiPoly lb = pb.coeff_y(pb.deg_y());
  BiPoly gamma = gcd_w(la, lb);
  const std::size_t bound = static_cast<std::size_t>(std::max(gamma.deg_w(), 0) + std::min(pa.deg_w(), pb.deg_w()));
  std::vector<long> xs;
  std::vector<UPoly> hs;
  std::size_t best = static_cast<std::size_t>(-1);
  for (long x = 0; x < 4096; ++x) {
    CycloNumber cx(Rational(x), idx);
    if (eval_w_poly(la, cx).is_zero() || eval_w_poly(lb, cx).is_zero()) continue;
    UPoly g = upoly_gcd(eval_w_point(pa, cx), eval_w_point(pb, cx));
    std::size_t deg = g.size() - 1;
    if (deg == 0) return one;
    if (deg > best) continue;
    if (deg < best) {
      best = deg;
      xs.clear();
      hs.clear();
    }
    CycloNumber scale = eval_w_poly(gamma, cx);
    for (auto& c : g) c = c * scale;
    xs.push_back(x);
    hs.push_back(std::move(g));
    if (xs.size() == bound + 1) {
      BiPoly h = primitive_part(interpolate_w(xs, hs, idx));
      if (divides(h, pa) && divides(h, pb)) return make_monic(h);
      xs.clear();
      hs.clear();
    }
  }
  throw std::logic_error("bipoly_gcd: interpolation did not converge");
}

}  // namespace detail

/// gcd in Q(zeta_N)[y, w], monic; gcd(0, 0) = 0.
inline BiPoly bipoly_gcd(const BiPoly& a, const BiPoly& b) {
  int idx = lcm_index(a.index(), b.index());
  if (a.is_zero()) return make_monic(b.embedded(idx));
  if (b.is_zero()) return make_monic(a.embedded(idx));
  BiPoly one(CycloNumber(Rational(1), idx));
  if (a.is_constant() || b.is_constant()) return one;
  if (a.is_monomial() || b.is_monomial()) {
    const BiPoly& m = a.is_monomial() ? a : b;
    const BiPoly& o = a.is_monomial() ? b : a;
    int ey = std::min(m.lead().ey, o.min_y());
    int ew = std::min(m.lead().ew, o.min_w());
    return BiPoly::monomial(CycloNumber(Rational(1), idx), ey, ew);
  }
  if (a == b) return make_monic(a.embedded(idx));
  BiPoly ae = a.embedded(idx), be = b.embedded(idx);
  bool no_y = detail::certify_degree_zero(ae, be, true, idx);
  if (no_y && detail::certify_degree_zero(ae, be, false, idx)) return one;
  BiPoly ca = detail::content_y(ae);
  BiPoly cb = detail::content_y(be);
  BiPoly c = detail::gcd_w(ca, cb);
  if (no_y) return c;
  BiPoly pa = ca.is_constant() ? ae : exact_divide(ae, ca);
  BiPoly pb = cb.is_constant() ? be : exact_divide(be, cb);
  if (pa.deg_y() <= 0 || pb.deg_y() <= 0) return c;
  if (detail::divides(pb, pa)) return make_monic(c * pb);
  if (detail::divides(pa, pb)) return make_monic(c * pa);
  return make_monic(c * detail::gcd_primitive(pa, pb, idx));
}

}  // namespace ncrank
