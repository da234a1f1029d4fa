#pragma once

// Noncommutative rank of a linear pencil by witness improvement. A witness
// of rank r is a d x d tuple p with rank T(p) >= r*d. Truncated Schur
// complements of T_d(Z + p) decide whether r is maximal; if not, a nonzero
// word gives a larger witness, which is rounded into a cyclic division
// algebra and cut back to dimension at most r + 1.

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "ncrank/abp.hpp"
#include "ncrank/digest.hpp"
#include "ncrank/division_algebra.hpp"
#include "ncrank/pencil.hpp"
#include "ncrank/scalar_format.hpp"

namespace ncrank {

using KTuple = MatTuple<FieldScalar>;

struct Witness {
  std::size_t r = 0;
  std::size_t dim = 1;
  int cyclo_index = 1;
  KTuple tuple;

  static Witness initial(std::size_t nvars) {
    Witness w;
    w.tuple = KTuple::zero(nvars, 1);
    return w;
  }

  bool is_rational() const {
    for (const auto& m : tuple.mats)
      for (const auto& v : m.data())
        if (!v.is_rational()) return false;
    return true;
  }
};

namespace detail {

inline int scalar_index(const Rational&) { return 1; }
inline int scalar_index(const FieldScalar& v) { return v.index(); }

template <class F>
int matrix_index(const Matrix<F>& m) {
  int idx = 1;
  for (const auto& v : m.data()) idx = lcm_index(idx, scalar_index(v));
  return idx;
}

template <class F>
int tuple_index(const MatTuple<F>& t) {
  int idx = 1;
  for (const auto& m : t.mats) idx = lcm_index(idx, matrix_index(m));
  return idx;
}

inline MatTuple<Rational> rational_tuple(const KTuple& t) {
  MatTuple<Rational> out;
  out.dim = t.dim;
  for (const auto& m : t.mats) out.mats.push_back(m.map([](const FieldScalar& v) { return v.rational_value(); }));
  return out;
}

template <class F>
KTuple k_tuple(const MatTuple<F>& t) {
  if constexpr (std::is_same_v<F, FieldScalar>) {
    return t;
  } else {
    KTuple out;
    out.dim = t.dim;
    for (const auto& m : t.mats) out.mats.push_back(m.map([](const Rational& q) { return FieldScalar(q); }));
    return out;
  }
}

// Rank lower bound from a few modular images.
template <class F>
std::size_t probe_rank(const Matrix<F>& m, int tries = 2) {
  const int idx = matrix_index(m);
  const std::size_t full = std::min(m.rows(), m.cols());
  std::size_t best = 0;
  for (int which = 0; which < tries && best < full; ++which)
    if (auto r = ModProbe::get(idx, which).rank_of(m)) best = std::max(best, *r);
  return best;
}

template <class F>
bool rank_at_least(const Matrix<F>& m, std::size_t k) {
  if (k == 0) return true;
  if (probe_rank(m) >= k) return true;
  return rank(m) >= k;
}

inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t e = 0; e < count; ++e) fn(e);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t e = next++; e < count; e = next++) {
      try {
        fn(e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::min<std::size_t>(jobs, count);
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// T(p) in F_p for a tuple already mapped into F_p.
inline std::optional<Matrix<u64>> pencil_eval_mod(const Pencil& T, const std::vector<Matrix<u64>>& p, std::size_t d,
                                                  const ModProbe& probe) {
  Matrix<u64> out(T.rows() * d, T.cols() * d);
  for (std::size_t i = 0; i < T.rows(); ++i)
    for (std::size_t j = 0; j < T.cols(); ++j) {
      if (is_zero(T.A0(i, j))) continue;
      auto c = probe.image(T.A0(i, j));
      if (!c) return std::nullopt;
      for (std::size_t k = 0; k < d; ++k) out(i * d + k, j * d + k) = probe.add(out(i * d + k, j * d + k), *c);
    }
  for (std::size_t v = 0; v < T.num_vars(); ++v)
    for (std::size_t i = 0; i < T.rows(); ++i)
      for (std::size_t j = 0; j < T.cols(); ++j) {
        if (is_zero(T.A[v](i, j))) continue;
        auto c = probe.image(T.A[v](i, j));
        if (!c) return std::nullopt;
        for (std::size_t k = 0; k < d; ++k)
          for (std::size_t l = 0; l < d; ++l) {
            u64 x = p[v](k, l);
            if (x == 0) continue;
            u64& dst = out(i * d + k, j * d + l);
            dst = probe.add(dst, probe.mul(*c, x));
          }
      }
  return out;
}

template <class F>
std::optional<MatTuple<Fp>> tuple_image(const MatTuple<F>& p, const ModProbe& probe) {
  MatTuple<Fp> out;
  out.dim = p.dim;
  for (const auto& m : p.mats) {
    auto im = probe.image(m);
    if (!im) return std::nullopt;
    out.mats.push_back(im->map([](u64 v) { return Fp::raw(v); }));
  }
  return out;
}

template <class F>
std::string abp_text(const Abp<F>& f) {
  std::string out;
  for (const auto& layer : f.layers) {
    out += "layer " + std::to_string(layer.rows()) + "x" + std::to_string(layer.cols()) + "\n";
    auto dump = [&out](const std::string& tag, const Matrix<F>& m) {
      if (m.is_zero()) return;
      out += tag;
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
          if (!is_zero(m(i, j))) out += " " + std::to_string(i) + "," + std::to_string(j) + "=" + to_string(m(i, j));
      out += "\n";
    };
    dump("1", layer.constant);
    for (const auto& [v, m] : layer.coeffs) dump(f.vars[v], m);
  }
  return out;
}

}  // namespace detail

/// U * T_d(Z + p) * V = [[I - L, A], [B, C]] with the split at m = r*d.
/// L, A, B are homogeneous linear in the z-variables; C carries the constant
/// diag(I_{rho-m}, 0) when rank T(p) = rho exceeds m.
template <class F>
struct SchurData {
  Matrix<F> U, V;
  LinearPencil<F> L, A, B, C;
  std::size_t r = 0;
  std::size_t d = 1;
  std::size_t m = 0;
};

template <class F>
SchurData<F> schur_data(const Pencil& T, const MatTuple<F>& p, std::size_t r) {
  const std::size_t d = p.dim, s = T.rows(), t = T.cols(), n = T.num_vars();
  LinearPencil<F> Z = blowup_shift(T, d, p);
  const std::size_t R = Z.rows(), Cc = Z.cols(), m = r * d;
  SchurData<F> out;
  out.r = r;
  out.d = d;
  out.m = m;
  LinearPencil<F> M;
  if (m == 0) {
    out.U = Matrix<F>::identity(R);
    out.V = Matrix<F>::identity(Cc);
    M = std::move(Z);
  } else {
    auto pf = pivot_form(Z.A0);
    if (pf.rho < m) throw std::logic_error("schur_data: witness does not reach rank r*d");
    out.U = std::move(pf.U);
    out.V = std::move(pf.V);
    M.vars = Z.vars;
    M.A0 = Matrix<F>(R, Cc);
    for (std::size_t k = 0; k < pf.rho; ++k) M.A0(k, k) = F(1L);
    // U (A_i (x) E_jk) V = U[:, J] A_i V[K, :] with J = {a*d + j}, K = {b*d + k}
    std::vector<Matrix<F>> Uj(d, Matrix<F>(R, s)), Vk(d, Matrix<F>(t, Cc));
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t x = 0; x < R; ++x)
        for (std::size_t a = 0; a < s; ++a) Uj[j](x, a) = out.U(x, a * d + j);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t b = 0; b < t; ++b)
        for (std::size_t y = 0; y < Cc; ++y) Vk[k](b, y) = out.V(b * d + k, y);
    for (std::size_t i = 0; i < n; ++i) {
      Matrix<F> Ai = T.A[i].map([](const Rational& q) { return detail::lift<F>(q); });
      for (std::size_t j = 0; j < d; ++j) {
        Matrix<F> UA = Uj[j] * Ai;
        for (std::size_t k = 0; k < d; ++k) M.A.push_back(UA * Vk[k]);
      }
    }
  }
  auto part = [&](std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc, bool negate, bool keep_const) {
    LinearPencil<F> P;
    P.vars = M.vars;
    P.A0 = keep_const ? M.A0.block(r0, c0, nr, nc) : Matrix<F>(nr, nc);
    for (const auto& a : M.A) P.A.push_back(negate ? a.block(r0, c0, nr, nc).scaled(F(-1L)) : a.block(r0, c0, nr, nc));
    return P;
  };
  out.L = part(0, 0, m, m, true, false);
  out.A = part(0, m, m, Cc - m, false, false);
  out.B = part(m, 0, R - m, m, false, false);
  out.C = part(m, m, R - m, Cc - m, false, true);
  return out;
}

/// ABP for C_ij - B_i (sum_{k < m} L^k) A_j, m = r*d, over the z-variables:
/// a 1 x (m+1) layer [-B_i | C_ij], m - 1 layers [[L, A_j], [0, 1]] and a
/// final (m+1) x 1 layer [A_j; 1]. For m = 0 it is the single entry C_ij.
/// A nonzero `terms` keeps that many powers of L instead of m.
template <class F>
Abp<F> schur_truncated_abp(const SchurData<F>& sd, std::size_t i, std::size_t j, std::size_t terms = 0) {
  const std::size_t m = sd.m, nv = sd.C.num_vars();
  if (terms == 0) terms = m;
  if (i >= sd.C.rows() || j >= sd.C.cols()) throw std::out_of_range("schur_truncated_abp: index outside residual block");
  Abp<F> f;
  f.vars = sd.C.vars;
  if (m == 0) {
    AbpLayer<F> only = AbpLayer<F>::zero(1, 1);
    only.constant(0, 0) = sd.C.A0(i, j);
    for (std::size_t v = 0; v < nv; ++v)
      if (!is_zero(sd.C.A[v](i, j))) only.coeffs.emplace(v, Matrix<F>(1, 1, {sd.C.A[v](i, j)}));
    f.layers.push_back(std::move(only));
    return f;
  }
  AbpLayer<F> first = AbpLayer<F>::zero(1, m + 1);
  first.constant(0, m) = sd.C.A0(i, j);
  AbpLayer<F> mid = AbpLayer<F>::zero(m + 1, m + 1);
  mid.constant(m, m) = F(1L);
  AbpLayer<F> last = AbpLayer<F>::zero(m + 1, 1);
  last.constant(m, 0) = F(1L);
  for (std::size_t v = 0; v < nv; ++v) {
    Matrix<F> a(1, m + 1);
    for (std::size_t k = 0; k < m; ++k)
      if (!is_zero(sd.B.A[v](i, k))) a(0, k) = -sd.B.A[v](i, k);
    a(0, m) = sd.C.A[v](i, j);
    if (!a.is_zero()) first.coeffs.emplace(v, std::move(a));

    Matrix<F> col(m, 1);
    for (std::size_t k = 0; k < m; ++k) col(k, 0) = sd.A.A[v](k, j);
    if (!sd.L.A[v].is_zero() || !col.is_zero()) {
      Matrix<F> b(m + 1, m + 1);
      b.set_block(0, 0, sd.L.A[v]);
      b.set_block(0, m, col);
      mid.coeffs.emplace(v, std::move(b));
    }
    if (!col.is_zero()) {
      Matrix<F> c(m + 1, 1);
      c.set_block(0, 0, col);
      last.coeffs.emplace(v, std::move(c));
    }
  }
  f.layers.push_back(std::move(first));
  for (std::size_t k = 0; k + 1 < terms; ++k) f.layers.push_back(mid);
  f.layers.push_back(std::move(last));
  return f;
}

struct PairWord {
  std::size_t i = 0;
  std::size_t j = 0;
  Word word;
};

struct MaxRankScan {
  bool maximal = false;
  std::optional<PairWord> pick;  // nonzero entry with the shortest word
  std::vector<std::pair<std::size_t, std::size_t>> zero_pairs;
  std::string transcript;        // PIT transcript when maximal
  bool automaton_check = true;   // picked word evaluates nonzero at its automaton tuple
};

/// Runs the zero test on every residual entry. The whole Schur
/// construction is first done in a modular image, which finds nonzero words
/// cheaply (the rank increment then certifies its own progress). Only when
/// every image vanishes are the exact tests run; their transcript is the
/// upper-bound certificate.
template <class F>
MaxRankScan max_rank_scan(const Pencil& T, const MatTuple<F>& p, std::size_t r, unsigned jobs = 1, bool audit = false) {
  MaxRankScan out;
  std::string header = "ncrank-pit-transcript\nr " + std::to_string(r) + " d " + std::to_string(p.dim) + "\n";
  if (r >= std::min(T.rows(), T.cols())) {
    out.maximal = true;
    out.transcript = header + "full\n";
    return out;
  }
  std::vector<std::optional<Word>> words;
  std::size_t nc = 0;
  auto choose = [&] {
    for (std::size_t e = 0; e < words.size(); ++e) {
      if (!words[e]) continue;
      if (!out.pick || words[e]->size() < out.pick->word.size()) out.pick = PairWord{e / nc, e % nc, *words[e]};
    }
    return out.pick.has_value();
  };
  auto finish = [&] {
    if (audit) {
      Abp<F> f = schur_truncated_abp(schur_data(T, p, r), out.pick->i, out.pick->j);
      const Word& w = out.pick->word;
      Matrix<F> val = abp_eval(f, automaton_tuple<F>(w, f.vars.size(), w.size() + 1));
      out.automaton_check = !is_zero(val(0, w.size()));
    }
    return out;
  };

  const ModProbe& probe = ModProbe::get(detail::tuple_index(p), 0);
  if (auto image = detail::tuple_image(p, probe)) {
    const u64 prime = probe.prime();
    std::optional<SchurData<Fp>> sdm;
    try {
      FpScope scope(prime);
      sdm = schur_data(T, *image, r);
    } catch (const DivisionByZero&) {
    } catch (const std::logic_error&) {
      // image rank below r*d: inconclusive
    }
    if (sdm) {
      nc = sdm->C.cols();
      words.assign(sdm->C.rows() * nc, std::nullopt);
      detail::parallel_for(words.size(), jobs, [&](std::size_t e) {
        FpScope scope(prime);
        auto res = detail::rs_core(detail::flatten(schur_truncated_abp(*sdm, e / nc, e % nc)), sdm->C.num_vars(),
                                   detail::ExactOps<Fp>{});
        if (!res.zero) words[e] = std::move(res.word);
      });
      if (choose()) return finish();
    }
  }

  const SchurData<F> sd = schur_data(T, p, r);
  nc = sd.C.cols();
  const std::size_t count = sd.C.rows() * nc;
  words.assign(count, std::nullopt);
  std::vector<std::string> texts(count);
  detail::parallel_for(count, jobs, [&](std::size_t e) {
    Abp<F> f = schur_truncated_abp(sd, e / nc, e % nc);
    auto res = detail::rs_core(detail::flatten(f), f.vars.size(), detail::ExactOps<F>{});
    if (res.zero)
      texts[e] = "P " + std::to_string(e / nc + 1) + " " + std::to_string(e % nc + 1) + "\n" + detail::abp_text(f) + "ZERO\n";
    else
      words[e] = std::move(res.word);
  });
  if (choose()) return finish();
  out.maximal = true;
  out.transcript = header;
  for (std::size_t e = 0; e < count; ++e) {
    out.zero_pairs.emplace_back(e / nc, e % nc);
    out.transcript += texts[e];
  }
  return out;
}

template <class F>
struct Increment {
  MatTuple<F> tuple;  // dimension d * d'
  std::size_t d_prime = 1;
  long t0 = 0;
};

/// p' = t0 * Q + p (x) I_{d'} where Q substitutes the automaton tuple of
/// `word` (dimension d' = |word| + 1) for the z-variables, and t0 is the
/// first t in {1, ..., 2*r*d*d' + 1} with rank T(p') > r*d*d'.
template <class F>
Increment<F> rank_increment_word(const Pencil& T, const MatTuple<F>& p, std::size_t r, const Word& word) {
  const std::size_t d = p.dim, n = T.num_vars(), dp = word.size() + 1, D = d * dp;
  MatTuple<F> q = automaton_tuple<F>(word, n * d * d, dp);
  std::vector<Matrix<F>> Q(n, Matrix<F>(D, D)), base;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) Q[i].set_block(j * dp, k * dp, q.mats[(i * d + j) * d + k]);
    base.push_back(tensor_with_identity(p.mats[i], dp));
  }
  const long limit = static_cast<long>(2 * r * d * dp + 1);
  const std::size_t bound = r * d * dp;
  auto candidate = [&](long t) {
    MatTuple<F> c;
    c.dim = D;
    for (std::size_t i = 0; i < n; ++i) c.mats.push_back(base[i] + Q[i].scaled(F(t)));
    return c;
  };
  for (long t = 1; t <= limit; ++t) {
    MatTuple<F> c = candidate(t);
    if (detail::probe_rank(pencil_eval(T, c)) > bound) return {std::move(c), dp, t};
  }
  for (long t = 1; t <= limit; ++t) {
    MatTuple<F> c = candidate(t);
    if (rank(pencil_eval(T, c)) > bound) return {std::move(c), dp, t};
  }
  throw std::logic_error("rank_increment: no candidate in the scan raised the rank");
}

/// Word of a nonzero P~_ij: modular first, exact otherwise.
template <class F>
Word nonzero_word(const Abp<F>& f, int index) {
  if (auto w = rs_nonzero_word_mod(f, ModProbe::get(index, 0))) return *w;
  return extract_monomial(f);
}

/// Rank increment from a witness and a residual entry (i, j) with P~_ij != 0.
inline Increment<FieldScalar> rank_increment(const Pencil& T, const Witness& w, std::size_t i, std::size_t j) {
  if (w.is_rational()) {
    auto p = detail::rational_tuple(w.tuple);
    auto inc = rank_increment_word(T, p, w.r, nonzero_word(schur_truncated_abp(schur_data(T, p, w.r), i, j), 1));
    return {detail::k_tuple(inc.tuple), inc.d_prime, inc.t0};
  }
  auto word = nonzero_word(schur_truncated_abp(schur_data(T, w.tuple, w.r), i, j), detail::tuple_index(w.tuple));
  return rank_increment_word(T, w.tuple, w.r, word);
}

struct RoundInfo {
  std::size_t minor_size = 0;
  std::size_t rank_lower = 0;
};

/// Replaces p' (dimension l, rank T(p') > r*l) by a tuple of elements of the
/// division algebra of index l with rank T(q') >= (r+1)*l. The coordinates of
/// p' in the basis C_ij are fixed one at a time, in (k, i, j) order, to the
/// first value of {0, ..., size} that keeps a chosen maximal nonsingular
/// minor of T(p') nonsingular; coordinates that are already rational stay.
template <class F>
Witness round_witness(const Pencil& T, const MatTuple<F>& p1, std::size_t r, RoundInfo* info = nullptr) {
  const std::size_t ell = p1.dim, n = T.num_vars(), L2 = ell * ell;
  const int il = static_cast<int>(ell);
  if (p1.mats.size() != n) throw ShapeError("round_witness: variable count mismatch");
  const KTuple pk = detail::k_tuple(p1);
  std::vector<std::vector<FieldScalar>> lambda(n);
  for (std::size_t k = 0; k < n; ++k) lambda[k] = express_in_basis(pk.mats[k], il);
  const int idx = lcm_index(il, detail::tuple_index(p1));
  std::vector<KMatrix> basis;
  for (int i = 1; i <= il; ++i)
    for (int j = 1; j <= il; ++j) basis.push_back(basis_matrix(i, j, il));

  // Modular state: images of the basis, of the current coordinates and of q.
  const ModProbe* probe = nullptr;
  std::vector<Matrix<u64>> cimg, qimg;
  std::vector<std::vector<u64>> limg;
  std::vector<std::size_t> rows, cols;
  for (int which = 0; which < 4 && !probe; ++which) {
    const ModProbe& pr = ModProbe::get(idx, which);
    cimg.clear();
    limg.assign(n, {});
    qimg.assign(n, Matrix<u64>(ell, ell));
    bool ok = true;
    for (const auto& c : basis) cimg.push_back(*pr.image(c));
    for (std::size_t k = 0; k < n && ok; ++k)
      for (std::size_t c = 0; c < L2 && ok; ++c) {
        auto v = pr.image(lambda[k][c]);
        if (!v) {
          ok = false;
          break;
        }
        limg[k].push_back(*v);
        if (*v == 0) continue;
        for (std::size_t e = 0; e < ell * ell; ++e)
          qimg[k].data()[e] = pr.add(qimg[k].data()[e], pr.mul(*v, cimg[c].data()[e]));
      }
    if (!ok) continue;
    auto M = detail::pencil_eval_mod(T, qimg, ell, pr);
    if (!M) continue;
    auto prof = pr.rank_profile(*M);
    if (prof.rank <= r * ell) continue;
    probe = &pr;
    rows = prof.rows;
    cols = prof.cols;
  }
  if (!probe) {
    auto prof = rank_profile(pencil_eval(T, pk));
    if (prof.rank <= r * ell) throw std::logic_error("round_witness: input rank does not exceed r * dim");
    rows = prof.rows;
    cols = prof.cols;
  }
  const std::size_t size = rows.size();

  std::vector<std::vector<FieldScalar>> coord = lambda;
  auto probe_ok = [&](const std::vector<Matrix<u64>>& q) {
    auto M = detail::pencil_eval_mod(T, q, ell, *probe);
    return M && probe->rank(M->submatrix(rows, cols)) == size;
  };
  auto exact_ok = [&] {
    KTuple q;
    q.dim = ell;
    for (std::size_t k = 0; k < n; ++k) q.mats.push_back(assemble_from_basis(coord[k], il));
    return rank(pencil_eval(T, q).submatrix(rows, cols)) == size;
  };
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t c = 0; c < L2; ++c) {
      if (coord[k][c].is_rational()) continue;
      bool found = false;
      if (probe) {
        for (std::size_t mu = 0; mu <= size && !found; ++mu) {
          u64 mi = mu % probe->prime();
          u64 delta = probe->sub(mi, limg[k][c]);
          std::vector<Matrix<u64>> trial = qimg;
          for (std::size_t e = 0; e < ell * ell; ++e)
            trial[k].data()[e] = probe->add(trial[k].data()[e], probe->mul(delta, cimg[c].data()[e]));
          if (probe_ok(trial)) {
            found = true;
            coord[k][c] = FieldScalar(static_cast<long>(mu));
            qimg = std::move(trial);
            limg[k][c] = mi;
          }
        }
      }
      for (std::size_t mu = 0; mu <= size && !found; ++mu) {
        FieldScalar keep = coord[k][c];
        coord[k][c] = FieldScalar(static_cast<long>(mu));
        if (exact_ok()) {
          found = true;
          if (probe) {
            u64 mi = mu % probe->prime();
            u64 delta = probe->sub(mi, limg[k][c]);
            for (std::size_t e = 0; e < ell * ell; ++e)
              qimg[k].data()[e] = probe->add(qimg[k].data()[e], probe->mul(delta, cimg[c].data()[e]));
            limg[k][c] = mi;
          }
        } else {
          coord[k][c] = keep;
        }
      }
      if (!found) throw std::logic_error("round_witness: no value keeps the minor nonsingular");
    }

  Witness out;
  out.dim = ell;
  out.tuple.dim = ell;
  bool rational = true;
  for (std::size_t k = 0; k < n; ++k) {
    KMatrix q = assemble_from_basis(coord[k], il);
    for (const auto& v : q.data()) rational = rational && v.is_rational();
    out.tuple.mats.push_back(std::move(q));
  }
  if (rational) {
    for (auto& m : out.tuple.mats) m = m.map([](const FieldScalar& v) { return FieldScalar(v.rational_value()); });
    out.cyclo_index = 1;
  } else {
    out.cyclo_index = il;
  }
  KMatrix Tq = pencil_eval(T, out.tuple);
  std::size_t rho = detail::probe_rank(Tq);
  if (rho < (r + 1) * ell) rho = rank(Tq);
  out.r = rho / ell;
  if (out.r < r + 1) throw std::logic_error("round_witness: rounded rank did not increase");
  if (info) {
    info->minor_size = size;
    info->rank_lower = rho;
  }
  return out;
}

enum class ReducePolicy {
  Chop,    // drop the last row and column and re-round until dim <= r + 1
  Shrink,  // first try the smallest leading block that still carries rank r - 1 plus one
};

inline KTuple leading_block(const KTuple& t, std::size_t dt) {
  KTuple out;
  out.dim = dt;
  for (const auto& m : t.mats) out.mats.push_back(m.block(0, 0, dt, dt));
  return out;
}

inline Witness round_dispatch(const Pencil& T, const KTuple& t, std::size_t r) {
  Witness probe_w;
  probe_w.tuple = t;
  if (probe_w.is_rational()) return round_witness(T, detail::rational_tuple(t), r);
  return round_witness(T, t, r);
}

/// Brings a rounded witness (tuple over the division algebra of index dim)
/// down to dimension at most r + 1.
inline Witness reduce_witness(const Pencil& T, Witness w, ReducePolicy policy = ReducePolicy::Chop) {
  if (w.r == 0) {
    if (w.dim > 1) return Witness::initial(T.num_vars());
    return w;
  }
  if (policy == ReducePolicy::Shrink) {
    for (std::size_t dt = 1; dt < w.dim; ++dt) {
      KTuple lead = leading_block(w.tuple, dt);
      if (detail::probe_rank(pencil_eval(T, lead)) > (w.r - 1) * dt) {
        Witness next = round_dispatch(T, lead, w.r - 1);
        if (next.r >= w.r) w = std::move(next);
        break;
      }
    }
  }
  while (w.dim > w.r + 1) {
    Witness next = round_dispatch(T, leading_block(w.tuple, w.dim - 1), w.r - 1);
    if (next.r < w.r) throw std::logic_error("reduce_witness: rank dropped after chop");
    w = std::move(next);
  }
  return w;
}

/// rank T(tuple) >= r * dim, exactly.
inline bool verify_witness(const Pencil& T, const Witness& w) {
  if (w.tuple.mats.size() != T.num_vars() || w.tuple.dim != w.dim) return false;
  for (const auto& m : w.tuple.mats)
    if (m.rows() != w.dim || m.cols() != w.dim) return false;
  if (w.r == 0) return true;
  if (w.r > std::min(T.rows(), T.cols())) return false;
  if (w.is_rational()) return detail::rank_at_least(pencil_eval(T, detail::rational_tuple(w.tuple)), w.r * w.dim);
  return detail::rank_at_least(pencil_eval(T, w.tuple), w.r * w.dim);
}

/// Smallest leading block of the tuple, or of a conjugate S^-1 p S by a
/// seeded random integer S, that is still a witness of rank r.
inline Witness leading_witness(const Pencil& T, const Witness& w, int attempts = 3) {
  std::mt19937_64 rng(w.dim * 1000003 + w.r);
  std::uniform_int_distribution<int> entry(-2, 2);
  std::vector<KTuple> conjugates{w.tuple};
  while (static_cast<int>(conjugates.size()) < attempts) {
    KMatrix S(w.dim, w.dim);
    for (auto& v : S.data()) v = FieldScalar(static_cast<long>(entry(rng)));
    auto inv = inverse(S);
    if (!inv) continue;
    const KMatrix& Si = *inv;
    KTuple c;
    c.dim = w.dim;
    for (const auto& m : w.tuple.mats) c.mats.push_back(Si * m * S);
    conjugates.push_back(std::move(c));
  }
  for (std::size_t dt = 1; dt < w.dim; ++dt)
    for (const auto& c : conjugates) {
      Witness out = w;
      out.dim = dt;
      out.tuple = leading_block(c, dt);
      out.cyclo_index = detail::tuple_index(out.tuple);
      if (verify_witness(T, out)) return out;
    }
  return w;
}

/// Replaces y and w by the first integer pair (a, b), a, b >= 1 ordered by
/// a + b then a, that keeps rank T(p) >= r * d, then keeps the smallest
/// leading block that is still a witness. The result has entries in Q(zeta).
inline Witness specialize_witness(const Pencil& T, const Witness& w) {
  bool constant = true;
  for (const auto& m : w.tuple.mats)
    for (const auto& v : m.data()) constant = constant && v.is_constant();
  if (constant) return leading_witness(T, w);
  for (long sum = 2; sum < 64; ++sum)
    for (long a = 1; a < sum; ++a) {
      Witness out = w;
      try {
        for (auto& m : out.tuple.mats)
          m = m.map([&](const FieldScalar& v) { return specialize_yw(v, Rational(a), Rational(sum - a)); });
      } catch (const DivisionByZero&) {
        continue;
      }
      out.cyclo_index = detail::tuple_index(out.tuple);
      if (verify_witness(T, out)) return leading_witness(T, out);
    }
  throw std::logic_error("specialize_witness: no integer point keeps the rank");
}

struct UpperCertificate {
  std::size_t r = 0;
  std::size_t d = 1;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // zero residual entries, 0-based
  std::string digest;                                      // SHA-256 of the PIT transcript
};

struct RoundTrace {
  std::size_t r = 0;
  std::size_t d = 1;
  std::size_t d_prime = 1;
  long t0 = 0;
  std::size_t ell = 1;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t word_length = 0;
  std::size_t r_after = 0;
  std::size_t d_after = 1;
};

struct AuditReport {
  std::size_t checks = 0;
  std::vector<std::string> failures;
  std::size_t max_coeff_bits = 0;
  bool ok() const { return failures.empty(); }
};

struct NcrankOptions {
  unsigned jobs = 1;
  bool audit = false;
  ReducePolicy policy = ReducePolicy::Shrink;
  bool specialize = true;  // evaluate y, w at integers after each round
};

struct NcrankResult {
  std::size_t r = 0;
  Witness witness;
  UpperCertificate certificate;
  std::vector<RoundTrace> trace;
  AuditReport audit;
};

inline MaxRankScan scan_witness(const Pencil& T, const Witness& w, unsigned jobs = 1, bool audit = false) {
  if (w.is_rational()) return max_rank_scan(T, detail::rational_tuple(w.tuple), w.r, jobs, audit);
  return max_rank_scan(T, w.tuple, w.r, jobs, audit);
}

/// True iff the witness rank is the noncommutative rank.
inline bool max_rank_test(const Pencil& T, const Witness& w, unsigned jobs = 1) { return scan_witness(T, w, jobs).maximal; }

namespace detail {

inline void audit_rounded(const Pencil& T, const Witness& w, std::size_t r_before, AuditReport& rep) {
  auto fail = [&](const std::string& what) { rep.failures.push_back(what); };
  const std::size_t ell = w.dim;
  KMatrix Tq = pencil_eval(T, w.tuple);
  const std::size_t rho = rank(Tq);
  rep.checks += 3;
  if (rho % ell != 0) fail("rounded rank " + std::to_string(rho) + " not divisible by " + std::to_string(ell));
  if (rho < (r_before + 1) * ell) fail("rounded rank below (r+1)*dim");
  try {
    auto dr = d_rank(Tq, static_cast<int>(ell), true);
    if (dr.r * ell != rho) fail("d_rank disagrees with rank/dim");
  } catch (const std::exception& e) {
    fail(std::string("d_rank: ") + e.what());
  }
}

inline void audit_witness(const Pencil& T, const Witness& w, AuditReport& rep) {
  auto fail = [&](const std::string& what) { rep.failures.push_back(what); };
  rep.checks += 3;
  if (w.dim > w.r + 1) fail("witness dimension exceeds r+1");
  if (!verify_witness(T, w)) fail("witness does not verify");
  for (const auto& m : w.tuple.mats)
    for (const auto& v : m.data()) {
      if (v.is_zero()) continue;
      if (!v.den().is_constant() || v.num().deg_y() >= static_cast<int>(w.dim) || v.num().deg_w() > 1) {
        fail("witness entry outside degree bounds: " + to_string(v));
        return;
      }
      rep.max_coeff_bits = std::max({rep.max_coeff_bits, v.num().max_bit_length(), v.den().max_bit_length()});
    }
}

}  // namespace detail

/// The main loop: from (r = 0, d = 1, zero tuple), test maximality, raise
/// the rank, round and reduce, until every residual P~_ij vanishes.
inline NcrankResult ncrank(const Pencil& T, const NcrankOptions& opt = {}) {
  T.validate();
  NcrankResult res;
  Witness w = Witness::initial(T.num_vars());
  const std::size_t smax = std::min(T.rows(), T.cols());
  for (std::size_t round = 0;; ++round) {
    if (round > smax) throw std::logic_error("ncrank: more rounds than the matrix size");
    MaxRankScan scan = scan_witness(T, w, opt.jobs, opt.audit);
    if (scan.maximal) {
      res.certificate.r = w.r;
      res.certificate.d = w.dim;
      res.certificate.pairs = std::move(scan.zero_pairs);
      res.certificate.digest = sha256_hex(scan.transcript);
      break;
    }
    if (opt.audit) {
      ++res.audit.checks;
      if (!scan.automaton_check) res.audit.failures.push_back("Schur ABP word vanishes at its automaton tuple");
    }
    RoundTrace tr;
    tr.r = w.r;
    tr.d = w.dim;
    tr.i = scan.pick->i;
    tr.j = scan.pick->j;
    tr.word_length = scan.pick->word.size();
    Witness next;
    if (w.is_rational()) {
      auto inc = rank_increment_word(T, detail::rational_tuple(w.tuple), w.r, scan.pick->word);
      tr.d_prime = inc.d_prime;
      tr.t0 = inc.t0;
      next = round_witness(T, inc.tuple, w.r);
    } else {
      auto inc = rank_increment_word(T, w.tuple, w.r, scan.pick->word);
      tr.d_prime = inc.d_prime;
      tr.t0 = inc.t0;
      next = round_witness(T, inc.tuple, w.r);
    }
    tr.ell = next.dim;
    if (opt.audit) detail::audit_rounded(T, next, w.r, res.audit);
    next = reduce_witness(T, std::move(next), opt.policy);
    if (opt.audit) detail::audit_witness(T, next, res.audit);
    if (opt.specialize) {
      next = specialize_witness(T, next);
      if (opt.audit) {
        ++res.audit.checks;
        if (!verify_witness(T, next)) res.audit.failures.push_back("specialized witness does not verify");
      }
    }
    tr.r_after = next.r;
    tr.d_after = next.dim;
    res.trace.push_back(tr);
    w = std::move(next);
  }
  res.r = w.r;
  res.witness = std::move(w);
  return res;
}

/// Recomputes the residual zero tests from the witness and compares them
/// with the certificate.
inline bool verify_upper_certificate(const Pencil& T, const Witness& w, const UpperCertificate& cert, unsigned jobs = 1) {
  if (cert.r != w.r || cert.d != w.dim) return false;
  MaxRankScan scan = scan_witness(T, w, jobs);
  return scan.maximal && scan.zero_pairs == cert.pairs && sha256_hex(scan.transcript) == cert.digest;
}

}  // namespace ncrank
