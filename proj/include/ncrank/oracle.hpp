#pragma once

// Independent ground truth for tests: brute-force expansions and searches
// that share no code path with the zero test or the rank loop.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncrank/abp.hpp"
#include "ncrank/linalg.hpp"
#include "ncrank/pencil.hpp"

namespace ncrank {

/// Full monomial expansion of an ABP: word -> nonzero coefficient.
/// Exponential in the number of layers; intended for small programs only.
template <class F>
std::map<Word, F> abp_expand(const Abp<F>& f) {
  f.validate();
  // row vectors of polynomials, one map per column
  std::vector<std::map<Word, F>> cur(1);
  cur[0][Word{}] = F(1L);
  for (const auto& layer : f.layers) {
    std::vector<std::map<Word, F>> nxt(layer.cols());
    for (std::size_t i = 0; i < layer.rows(); ++i)
      for (const auto& [w, c] : cur[i])
        for (std::size_t j = 0; j < layer.cols(); ++j) {
          if (!is_zero(layer.constant(i, j))) nxt[j][w] = nxt[j][w] + c * layer.constant(i, j);
          for (const auto& [v, m] : layer.coeffs) {
            if (is_zero(m(i, j))) continue;
            Word w2 = w;
            w2.push_back(v);
            nxt[j][w2] = nxt[j][w2] + c * m(i, j);
          }
        }
    for (auto& col : nxt)
      for (auto it = col.begin(); it != col.end();)
        it = is_zero(it->second) ? col.erase(it) : std::next(it);
    cur = std::move(nxt);
  }
  return cur[0];
}

struct BruteResult {
  std::size_t rank = 0;  // max over samples of floor(rank T(p) / d)
  MatTuple<Rational> tuple;
  std::size_t tuple_rank = 0;
};

/// Lower bound on ncrank by random search: `budget` integer tuples with
/// entries in [-3, 3] at each dimension d = 1..max_dim. Ranks come from a
/// modular image (never above the true rank); the stored tuple is the best one.
inline BruteResult brute_lower_bound(const Pencil& T, std::size_t max_dim, std::size_t budget, std::uint64_t seed) {
  T.validate();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> entry(-3, 3);
  const ModProbe& probe = ModProbe::get(1, 0);
  const std::size_t full = std::min(T.rows(), T.cols());
  BruteResult best;
  best.tuple = MatTuple<Rational>::zero(T.num_vars(), 1);
  for (std::size_t d = 1; d <= max_dim && best.rank < full; ++d)
    for (std::size_t k = 0; k < budget && best.rank < full; ++k) {
      MatTuple<Rational> p = MatTuple<Rational>::zero(T.num_vars(), d);
      for (auto& m : p.mats)
        for (auto& v : m.data()) v = entry(rng);
      auto img = probe.image(pencil_eval(T, p));
      std::size_t r = img ? probe.rank(*img) : 0;
      if (r / d > best.rank) {
        best.rank = r / d;
        best.tuple = std::move(p);
        best.tuple_rank = r;
      }
    }
  return best;
}

/// Rank over Q(x) estimated by exact ranks at three random integer points.
inline std::size_t commutative_rank(const Pencil& T, std::uint64_t seed) {
  T.validate();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> pt(-1000000, 1000000);
  std::size_t best = 0;
  for (int k = 0; k < 3; ++k) {
    std::vector<Rational> x;
    for (std::size_t v = 0; v < T.num_vars(); ++v) x.emplace_back(pt(rng));
    best = std::max(best, rank(pencil_at_scalars(T, x)));
  }
  return best;
}

/// Maximum matching of a bipartite graph given by adjacency lists (left -> right).
inline std::size_t max_matching(const std::vector<std::vector<std::size_t>>& adj, std::size_t right) {
  std::vector<long> match(right, -1);
  std::size_t size = 0;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    std::vector<bool> seen(right, false);
    std::function<bool(std::size_t)> augment = [&](std::size_t x) {
      for (std::size_t y : adj[x]) {
        if (seen[y]) continue;
        seen[y] = true;
        if (match[y] < 0 || augment(static_cast<std::size_t>(match[y]))) {
          match[y] = static_cast<long>(x);
          return true;
        }
      }
      return false;
    };
    if (augment(u)) ++size;
  }
  return size;
}

struct GenParams {
  std::string kind;           // bipartite | skew | factorized | random
  std::size_t n = 3;          // bipartite: side size; random/factorized: variable count
  std::string edges = "random";  // bipartite: cycle | star | complete | random
  std::size_t s = 3;
  std::size_t r = 1;          // factorized inner dimension
  int lo = -3;
  int hi = 3;
  std::uint64_t seed = 1;
};

struct Generated {
  Pencil T;
  std::optional<std::size_t> rank;        // known ncrank
  std::optional<std::size_t> rank_bound;  // known upper bound
};

namespace detail {

inline Matrix<Rational> random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int lo, int hi) {
  std::uniform_int_distribution<int> e(lo, hi);
  Matrix<Rational> m(r, c);
  for (auto& v : m.data()) v = e(rng);
  return m;
}

}  // namespace detail

/// Pencil families with known rank information, deterministic in the seed.
inline Generated gen_family(const GenParams& g) {
  std::mt19937_64 rng(g.seed);
  Generated out;
  Pencil& T = out.T;
  if (g.kind == "bipartite") {
    const std::size_t n = g.n;
    if (n == 0) throw std::invalid_argument("gen: bipartite needs n >= 1");
    std::vector<std::vector<std::size_t>> adj(n);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        bool e;
        if (g.edges == "cycle") {
          e = j == i || j == (i + 1) % n;
        } else if (g.edges == "star") {
          e = i == 0;
        } else if (g.edges == "complete") {
          e = true;
        } else if (g.edges == "random") {
          e = coin(rng);
        } else {
          throw std::invalid_argument("gen: unknown edge pattern '" + g.edges + "'");
        }
        if (e) adj[i].push_back(j);
      }
    T.A0 = Matrix<Rational>(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j : adj[i]) {
        T.vars.push_back("x" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
        Matrix<Rational> m(n, n);
        m(i, j) = 1;
        T.A.push_back(std::move(m));
      }
    out.rank = max_matching(adj, n);
  } else if (g.kind == "skew") {
    const std::size_t s = g.s;
    if (s == 0) throw std::invalid_argument("gen: skew needs s >= 1");
    T.A0 = Matrix<Rational>(s, s);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = i + 1; j < s; ++j) {
        T.vars.push_back("x" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
        Matrix<Rational> m(s, s);
        m(i, j) = 1;
        m(j, i) = -1;
        T.A.push_back(std::move(m));
      }
  } else if (g.kind == "factorized") {
    // T = [Pc | Pl] [Ql; Qc] with Pc, Qc constant and Pl, Ql affine, so
    // T stays linear and factors through dimension r.
    const std::size_t s = g.s, r = g.r, n = g.n;
    if (s == 0 || r == 0 || r > s || n == 0) throw std::invalid_argument("gen: factorized needs 1 <= r <= s and n >= 1");
    const std::size_t r1 = (r + 1) / 2, r2 = r - r1;
    Matrix<Rational> Pc = detail::random_matrix(rng, s, r1, g.lo, g.hi);
    Matrix<Rational> Qc = detail::random_matrix(rng, r2, s, g.lo, g.hi);
    std::vector<Matrix<Rational>> Ql, Pl;
    for (std::size_t v = 0; v <= n; ++v) {
      Ql.push_back(detail::random_matrix(rng, r1, s, g.lo, g.hi));
      Pl.push_back(detail::random_matrix(rng, s, r2, g.lo, g.hi));
    }
    T.A0 = Pc * Ql[0] + Pl[0] * Qc;
    for (std::size_t v = 1; v <= n; ++v) {
      T.vars.push_back("x" + std::to_string(v));
      T.A.push_back(Pc * Ql[v] + Pl[v] * Qc);
    }
    out.rank_bound = r;
  } else if (g.kind == "random") {
    if (g.s == 0 || g.n == 0) throw std::invalid_argument("gen: random needs s, n >= 1");
    T.A0 = detail::random_matrix(rng, g.s, g.s, g.lo, g.hi);
    for (std::size_t v = 1; v <= g.n; ++v) {
      T.vars.push_back("x" + std::to_string(v));
      T.A.push_back(detail::random_matrix(rng, g.s, g.s, g.lo, g.hi));
    }
  } else {
    throw std::invalid_argument("gen: unknown family '" + g.kind + "'");
  }
  return out;
}

}  // namespace ncrank
