#pragma once

// Homomorphic images of K = Q(zeta_N)(y, w) in a word-sized prime field.
//
// A probe fixes a prime p = 1 (mod N), an element h of exact order N and
// points y0, w0. Rank over F_p of the image of a matrix is a lower bound for
// its rank over K (every nonvanishing minor of the image lifts), so probes
// certify "rank >= k" and "minor != 0" without exact elimination.

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncrank/field_scalar.hpp"
#include "ncrank/matrix.hpp"
#include "ncrank/modarith.hpp"

namespace ncrank {


class ModProbe {
 public:
  /// Probe number `which` (0, 1, ...) for cyclotomic index N; cached.
  static const ModProbe& get(int N, int which = 0) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, ModProbe> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(N, which);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, ModProbe(N, which)).first;
    return it->second;
  }

  u64 prime() const { return p_; }
  int index() const { return n_; }

  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p_ - b; }
  u64 mul(u64 a, u64 b) const { return detail::mulmod(a, b, p_); }
  u64 inv(u64 a) const { return detail::powmod(a, p_ - 2, p_); }

  std::optional<u64> image(const Integer& z) const {
    Integer r;
    mpz_fdiv_r_ui(r.get_mpz_t(), z.get_mpz_t(), p_);
    return static_cast<u64>(r.get_ui());
  }

  std::optional<u64> image(const Rational& q) const {
    u64 n = *image(q.get_num()), d = *image(q.get_den());
    if (d == 0) return std::nullopt;
    return mul(n, inv(d));
  }

  std::optional<u64> image(const CycloNumber& c) const {
    if (n_ % c.index() != 0) return std::nullopt;
    u64 u = detail::powmod(h_, static_cast<u64>(n_ / c.index()), p_);
    u64 acc = 0, pw = 1;
    for (const auto& q : c.coeffs()) {
      if (!is_zero(q)) {
        auto v = image(q);
        if (!v) return std::nullopt;
        acc = add(acc, mul(*v, pw));
      }
      pw = mul(pw, u);
    }
    return acc;
  }

  std::optional<u64> image(const BiPoly& b) const {
    u64 acc = 0;
    for (const auto& t : b.terms()) {
      auto c = image(t.c);
      if (!c) return std::nullopt;
      acc = add(acc, mul(*c, mul(detail::powmod(y0_, static_cast<u64>(t.ey), p_),
                                 detail::powmod(w0_, static_cast<u64>(t.ew), p_))));
    }
    return acc;
  }

  std::optional<u64> image(const FieldScalar& s) const {
    if (s.is_zero()) return 0;
    auto n = image(s.num());
    auto d = image(s.den());
    if (!n || !d || *d == 0) return std::nullopt;
    return mul(*n, inv(*d));
  }

  template <class F>
  std::optional<Matrix<u64>> image(const Matrix<F>& m) const {
    std::vector<u64> out;
    out.reserve(m.rows() * m.cols());
    for (const auto& v : m.data()) {
      if (is_zero(v)) {
        out.push_back(0);
        continue;
      }
      auto x = image(v);
      if (!x) return std::nullopt;
      out.push_back(*x);
    }
    return Matrix<u64>(m.rows(), m.cols(), std::move(out));
  }

  /// Rank of a matrix over F_p together with the pivot rows and columns of a
  /// nonsingular maximal minor (columns scanned left to right).
  struct RankProfile {
    std::size_t rank = 0;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
  };

  RankProfile rank_profile(Matrix<u64> m) const {
    RankProfile out;
    std::vector<bool> used(m.rows(), false);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::size_t piv = m.rows();
      for (std::size_t r = 0; r < m.rows(); ++r)
        if (!used[r] && m(r, c) != 0) {
          piv = r;
          break;
        }
      if (piv == m.rows()) continue;
      used[piv] = true;
      out.rows.push_back(piv);
      out.cols.push_back(c);
      u64 iv = inv(m(piv, c));
      for (std::size_t r = 0; r < m.rows(); ++r) {
        if (used[r] || m(r, c) == 0) continue;
        u64 f = mul(m(r, c), iv);
        for (std::size_t k = c; k < m.cols(); ++k)
          if (m(piv, k) != 0) m(r, k) = sub(m(r, k), mul(f, m(piv, k)));
      }
    }
    out.rank = out.rows.size();
    std::sort(out.rows.begin(), out.rows.end());
    return out;
  }

  std::size_t rank(const Matrix<u64>& m) const { return rank_profile(m).rank; }

  /// Rank of the image of m, or nullopt when some entry has no image.
  template <class F>
  std::optional<std::size_t> rank_of(const Matrix<F>& m) const {
    auto im = image(m);
    if (!im) return std::nullopt;
    return rank(*im);
  }

 private:
  ModProbe(int N, int which) : n_(N) {
    auto pr = detail::prime_with_root(N, which);
    p_ = pr.p;
    h_ = pr.h;
    // Fixed, unremarkable evaluation points; distinct per probe.
    y0_ = (0x9E3779B97F4A7C15ULL + 7919ULL * static_cast<u64>(which)) % p_;
    w0_ = (0xC2B2AE3D27D4EB4FULL + 104729ULL * static_cast<u64>(which)) % p_;
  }

  int n_;
  u64 p_ = 0;
  u64 h_ = 1;
  u64 y0_ = 0;
  u64 w0_ = 0;
};

/// Element of F_p for the modulus installed on the current thread by an
/// FpScope. Lets the generic elimination and ABP code run in an image.
class Fp {
 public:
  Fp() = default;
  Fp(long v) {  // NOLINT
    const u64 p = modulus();
    long r = v % static_cast<long>(p);
    v_ = static_cast<u64>(r < 0 ? r + static_cast<long>(p) : r);
  }
  explicit Fp(const Rational& q) {
    const u64 p = modulus();
    Integer n, d;
    mpz_fdiv_r_ui(n.get_mpz_t(), q.get_num_mpz_t(), p);
    mpz_fdiv_r_ui(d.get_mpz_t(), q.get_den_mpz_t(), p);
    if (d == 0) throw DivisionByZero("Fp: denominator vanishes modulo p");
    v_ = detail::mulmod(n.get_ui(), detail::powmod(d.get_ui(), p - 2, p), p);
  }

  static Fp raw(u64 v) {
    Fp a;
    a.v_ = v;
    return a;
  }
  u64 value() const { return v_; }
  bool is_zero() const { return v_ == 0; }
  static u64 modulus() {
    if (current() == 0) throw std::logic_error("Fp: no modulus installed");
    return current();
  }

  friend Fp operator+(Fp a, Fp b) {
    u64 s = a.v_ + b.v_;
    return raw(s >= modulus() ? s - modulus() : s);
  }
  friend Fp operator-(Fp a, Fp b) { return raw(a.v_ >= b.v_ ? a.v_ - b.v_ : a.v_ + modulus() - b.v_); }
  friend Fp operator-(Fp a) { return raw(a.v_ == 0 ? 0 : modulus() - a.v_); }
  friend Fp operator*(Fp a, Fp b) { return raw(detail::mulmod(a.v_, b.v_, modulus())); }
  friend Fp operator/(Fp a, Fp b) {
    if (b.v_ == 0) throw DivisionByZero("Fp: division by zero");
    return raw(detail::mulmod(a.v_, detail::powmod(b.v_, modulus() - 2, modulus()), modulus()));
  }
  friend bool operator==(Fp a, Fp b) { return a.v_ == b.v_; }
  friend bool operator!=(Fp a, Fp b) { return a.v_ != b.v_; }

 private:
  friend class FpScope;
  static u64& current() {
    thread_local u64 p = 0;
    return p;
  }
  u64 v_ = 0;
};

inline bool is_zero(const Fp& a) { return a.is_zero(); }
inline std::string to_string(const Fp& a) { return std::to_string(a.value()); }

class FpScope {
 public:
  explicit FpScope(u64 p) : saved_(Fp::current()) { Fp::current() = p; }
  ~FpScope() { Fp::current() = saved_; }
  FpScope(const FpScope&) = delete;
  FpScope& operator=(const FpScope&) = delete;

 private:
  u64 saved_;
};

}  // namespace ncrank
