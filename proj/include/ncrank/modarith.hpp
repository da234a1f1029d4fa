#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ncrank {

using u64 = std::uint64_t;

namespace detail {

inline u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p); }

inline u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> out;
  for (u64 q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    out.push_back(q);
    while (n % q == 0) n /= q;
  }
  if (n > 1) out.push_back(n);
  return out;
}

/// A prime p = 1 (mod N) just below 2^62 and an element h of exact order N.
/// `which` selects the which-th such prime counting downward.
struct PrimeRoot {
  u64 p = 0;
  u64 h = 0;
};

inline PrimeRoot prime_with_root(int N, int which) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PrimeRoot> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(N, which);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (N < 1) throw std::invalid_argument("prime_with_root: index must be positive");
  u64 n = static_cast<u64>(N);
  u64 k = ((1ULL << 62) - 1) / n;
  int skip = which;
  while (true) {
    if (is_prime_u64(k * n + 1)) {
      if (skip == 0) break;
      --skip;
    }
    --k;
  }
  PrimeRoot pr;
  pr.p = k * n + 1;
  auto factors = prime_factors(n);
  for (u64 a = 2;; ++a) {
    u64 h = powmod(a, (pr.p - 1) / n, pr.p);
    bool exact = true;
    for (u64 q : factors)
      if (powmod(h, n / q, pr.p) == 1) exact = false;
    if (exact) {
      pr.h = h;
      break;
    }
  }
  cache.emplace(key, pr);
  return pr;
}

/// Degree of gcd(a, b) in F_p[t]; coefficient vectors are ascending.
inline int gcd_degree_mod(std::vector<u64> a, std::vector<u64> b, u64 p) {
  auto trim = [](std::vector<u64>& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
  };
  trim(a);
  trim(b);
  while (!b.empty()) {
    // a <- a mod b
    u64 inv = powmod(b.back(), p - 2, p);
    while (a.size() >= b.size()) {
      u64 f = mulmod(a.back(), inv, p);
      std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) {
        u64 t = mulmod(f, b[i], p);
        a[shift + i] = a[shift + i] >= t ? a[shift + i] - t : a[shift + i] + p - t;
      }
      trim(a);
    }
    std::swap(a, b);
  }
  return static_cast<int>(a.size()) - 1;
}

}  // namespace detail
}  // namespace ncrank
