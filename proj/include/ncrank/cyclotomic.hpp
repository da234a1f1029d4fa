#pragma once

#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ncrank/rational.hpp"

namespace ncrank {

namespace detail {

// Dense univariate polynomials over Q, coefficients low to high, no trailing zeros.
using QPoly = std::vector<Rational>;

inline void trim(QPoly& p) {
  while (!p.empty() && is_zero(p.back())) p.pop_back();
}

inline QPoly qpoly_mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  trim(out);
  return out;
}

inline QPoly qpoly_sub(QPoly a, const QPoly& b) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim(a);
  return a;
}

// Quotient and remainder; b must be nonzero.
inline std::pair<QPoly, QPoly> qpoly_divmod(QPoly a, const QPoly& b) {
  trim(a);
  if (a.size() < b.size()) return {{}, a};
  QPoly q(a.size() - b.size() + 1);
  Rational lead_inv = rational_inverse(b.back());
  for (std::size_t k = a.size(); k-- >= b.size();) {
    if (is_zero(a[k])) continue;
    Rational c = a[k] * lead_inv;
    std::size_t shift = k - (b.size() - 1);
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
  }
  trim(a);
  trim(q);
  return {q, a};
}

inline int euler_phi(int n) {
  int result = n;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

inline QPoly compute_cyclotomic(int n) {
  // x^n - 1 divided by every Phi_d for proper divisors d of n.
  QPoly p(static_cast<std::size_t>(n) + 1);
  p[0] = -1;
  p[static_cast<std::size_t>(n)] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    p = qpoly_divmod(p, compute_cyclotomic(d)).first;
  }
  return p;
}

}  // namespace detail

/// Monic N-th cyclotomic polynomial, cached.
inline const detail::QPoly& cyclotomic_polynomial(int n) {
  if (n < 1) throw std::invalid_argument("cyclotomic index must be positive");
  static std::mutex mutex;
  static std::map<int, detail::QPoly> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_cyclotomic(n)).first;
  return it->second;
}

inline int phi_of(int n) { return detail::euler_phi(n); }

/// Element of Q(zeta_N) stored in the power basis 1, u, ..., u^{phi(N)-1}
/// with u = zeta_N. Reduction modulo Phi_N happens on every construction.
class CycloNumber {
 public:
  CycloNumber() : index_(1), coeffs_(1) {}
  CycloNumber(long v) : index_(1), coeffs_{Rational(v)} {}  // NOLINT(google-explicit-constructor)
  explicit CycloNumber(const Rational& q, int index = 1) : index_(index), coeffs_(phi_of(index)) {
    check_index(index);
    coeffs_[0] = q;
  }

  /// Reduces an arbitrary-length coefficient vector (in powers of zeta_N).
  static CycloNumber from_coeffs(int index, detail::QPoly coeffs) {
    check_index(index);
    CycloNumber out;
    out.index_ = index;
    out.coeffs_ = reduce(index, std::move(coeffs));
    return out;
  }

  /// zeta_N^power, power taken modulo N.
  static CycloNumber zeta(int index, long power = 1) {
    check_index(index);
    long e = ((power % index) + index) % index;
    detail::QPoly c(static_cast<std::size_t>(e) + 1);
    c[static_cast<std::size_t>(e)] = 1;
    return from_coeffs(index, std::move(c));
  }

  int index() const { return index_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (!ncrank::is_zero(c)) return false;
    return true;
  }
  bool is_rational() const {
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
      if (!ncrank::is_zero(coeffs_[i])) return false;
    return true;
  }
  bool is_one() const { return is_rational() && coeffs_[0] == 1; }
  const Rational& constant() const { return coeffs_[0]; }

  CycloNumber operator-() const {
    CycloNumber out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
  }
  CycloNumber& operator+=(const CycloNumber& rhs) {
    if (rhs.index_ != index_) return *this = *this + rhs;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
    return *this;
  }
  CycloNumber& operator-=(const CycloNumber& rhs) {
    if (rhs.index_ != index_) return *this = *this - rhs;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
    return *this;
  }
  CycloNumber& operator*=(const CycloNumber& rhs) { return *this = *this * rhs; }

  friend CycloNumber operator+(const CycloNumber& a, const CycloNumber& b);
  friend CycloNumber operator-(const CycloNumber& a, const CycloNumber& b);
  friend CycloNumber operator*(const CycloNumber& a, const CycloNumber& b);
  friend bool operator==(const CycloNumber& a, const CycloNumber& b);

  CycloNumber scaled(const Rational& q) const {
    CycloNumber out = *this;
    for (auto& c : out.coeffs_) c *= q;
    return out;
  }

  std::size_t max_bit_length() const {
    std::size_t m = 0;
    for (const auto& c : coeffs_) m = std::max(m, bit_length(c));
    return m;
  }

 private:
  static void check_index(int index) {
    if (index < 1) throw std::invalid_argument("cyclotomic index must be positive");
  }

  static std::vector<Rational> reduce(int index, detail::QPoly p) {
    const auto& phi = cyclotomic_polynomial(index);
    std::size_t deg = phi.size() - 1;
    for (std::size_t k = p.size(); k-- > deg;) {
      if (ncrank::is_zero(p[k])) continue;
      Rational c = p[k];
      for (std::size_t i = 0; i <= deg; ++i) p[k - deg + i] -= c * phi[i];
    }
    p.resize(deg);
    return p;
  }

  int index_;
  std::vector<Rational> coeffs_;
};

/// Image of a under Q(zeta_N) -> Q(zeta_M), zeta_N = zeta_M^{M/N}.
inline CycloNumber cyclo_embed(const CycloNumber& a, int target) {
  if (target < 1 || target % a.index() != 0)
    throw std::invalid_argument("cyclo_embed: target index must be a multiple of the source index");
  if (target == a.index()) return a;
  if (a.is_rational()) return CycloNumber(a.constant(), target);
  std::size_t step = static_cast<std::size_t>(target / a.index());
  detail::QPoly p((a.coeffs().size() - 1) * step + 1);
  for (std::size_t k = 0; k < a.coeffs().size(); ++k) p[k * step] = a.coeffs()[k];
  return CycloNumber::from_coeffs(target, std::move(p));
}

inline int lcm_index(int a, int b) { return std::lcm(a, b); }

inline CycloNumber operator+(const CycloNumber& a, const CycloNumber& b) {
  if (a.index_ != b.index_) {
    int m = lcm_index(a.index_, b.index_);
    return cyclo_embed(a, m) + cyclo_embed(b, m);
  }
  CycloNumber out = a;
  for (std::size_t i = 0; i < out.coeffs_.size(); ++i) out.coeffs_[i] += b.coeffs_[i];
  return out;
}

inline CycloNumber operator-(const CycloNumber& a, const CycloNumber& b) {
  if (a.index_ != b.index_) {
    int m = lcm_index(a.index_, b.index_);
    return cyclo_embed(a, m) - cyclo_embed(b, m);
  }
  CycloNumber out = a;
  for (std::size_t i = 0; i < out.coeffs_.size(); ++i) out.coeffs_[i] -= b.coeffs_[i];
  return out;
}

inline CycloNumber operator*(const CycloNumber& a, const CycloNumber& b) {
  if (a.index_ != b.index_) {
    if (a.is_rational()) return b.scaled(a.constant());
    if (b.is_rational()) return a.scaled(b.constant());
    int m = lcm_index(a.index_, b.index_);
    return cyclo_embed(a, m) * cyclo_embed(b, m);
  }
  if (a.coeffs_.size() == 1) {
    CycloNumber out = a;
    out.coeffs_[0] *= b.coeffs_[0];
    return out;
  }
  if (a.is_rational()) return b.scaled(a.constant());
  if (b.is_rational()) return a.scaled(b.constant());
  return CycloNumber::from_coeffs(a.index_, detail::qpoly_mul(a.coeffs_, b.coeffs_));
}

inline bool operator==(const CycloNumber& a, const CycloNumber& b) {
  if (a.index_ == b.index_) return a.coeffs_ == b.coeffs_;
  if (a.is_rational() && b.is_rational()) return a.constant() == b.constant();
  int m = lcm_index(a.index_, b.index_);
  return cyclo_embed(a, m).coeffs_ == cyclo_embed(b, m).coeffs_;
}

inline bool is_zero(const CycloNumber& a) { return a.is_zero(); }

/// Multiplicative inverse in Q(zeta_N) via the extended Euclidean algorithm
/// against Phi_N.
inline CycloNumber cyclo_inverse(const CycloNumber& a) {
  if (a.is_zero()) throw DivisionByZero("inverse of zero in cyclotomic field");
  if (a.is_rational()) return CycloNumber(rational_inverse(a.constant()), a.index());
  using detail::QPoly;
  QPoly r0 = cyclotomic_polynomial(a.index());
  QPoly r1 = a.coeffs();
  detail::trim(r1);
  QPoly s0, s1{Rational(1)};  // coefficients of a in the remainder sequence
  while (r1.size() > 1) {
    auto [q, r] = detail::qpoly_divmod(r0, r1);
    QPoly s2 = detail::qpoly_sub(s0, detail::qpoly_mul(q, s1));
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r1.empty()) throw DivisionByZero("non-invertible cyclotomic element");
  Rational inv = rational_inverse(r1[0]);
  for (auto& c : s1) c *= inv;
  return CycloNumber::from_coeffs(a.index(), std::move(s1));
}

/// Inverse of cyclo_embed: the preimage of a in Q(zeta_M) for M | index(a),
/// or nullopt when a does not lie in that subfield.
inline std::optional<CycloNumber> cyclo_project(const CycloNumber& a, int target) {
  if (target < 1 || a.index() % target != 0)
    throw std::invalid_argument("cyclo_project: target must divide the source index");
  if (target == a.index()) return a;
  if (a.is_rational()) return CycloNumber(a.constant(), target);
  // Solve sum_k c_k * embed(zeta_M^k) = a over Q.
  std::size_t rows = a.coeffs().size();
  std::size_t cols = static_cast<std::size_t>(phi_of(target));
  std::vector<std::vector<Rational>> m(rows, std::vector<Rational>(cols + 1));
  for (std::size_t k = 0; k < cols; ++k) {
    CycloNumber e = cyclo_embed(CycloNumber::zeta(target, static_cast<long>(k)), a.index());
    for (std::size_t i = 0; i < rows; ++i) m[i][k] = e.coeffs()[i];
  }
  for (std::size_t i = 0; i < rows; ++i) m[i][cols] = a.coeffs()[i];
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t piv = row;
    while (piv < rows && is_zero(m[piv][col])) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[row]);
    Rational inv = rational_inverse(m[row][col]);
    for (auto& v : m[row]) v *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == row || is_zero(m[i][col])) continue;
      Rational f = m[i][col];
      for (std::size_t j = col; j <= cols; ++j) m[i][j] -= f * m[row][j];
    }
    pivots.push_back(col);
    ++row;
  }
  for (std::size_t i = row; i < rows; ++i)
    if (!is_zero(m[i][cols])) return std::nullopt;
  detail::QPoly c(cols);
  for (std::size_t i = 0; i < pivots.size(); ++i) c[pivots[i]] = m[i][cols];
  return CycloNumber::from_coeffs(target, std::move(c));
}

}  // namespace ncrank
