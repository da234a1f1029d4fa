#pragma once

// Noncommutative algebraic branching programs.
//
// Layer t is a w_{t-1} x w_t matrix of affine forms, stored as a constant
// matrix plus one coefficient matrix per variable that occurs; w_0 = w_L = 1.
// The program computes the product of its layers.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncrank/linalg.hpp"
#include "ncrank/modular.hpp"
#include "ncrank/pencil.hpp"

namespace ncrank {

using Word = std::vector<std::size_t>;

template <class F>
struct AffineForm {
  F constant{};
  std::map<std::size_t, F> coeffs;  // variable index -> nonzero coefficient
};

template <class F>
struct AbpLayer {
  Matrix<F> constant;
  std::map<std::size_t, Matrix<F>> coeffs;

  static AbpLayer zero(std::size_t rows, std::size_t cols) { return AbpLayer{Matrix<F>(rows, cols), {}}; }

  std::size_t rows() const { return constant.rows(); }
  std::size_t cols() const { return constant.cols(); }

  AffineForm<F> entry(std::size_t i, std::size_t j) const {
    AffineForm<F> a;
    a.constant = constant(i, j);
    for (const auto& [v, m] : coeffs)
      if (!is_zero(m(i, j))) a.coeffs.emplace(v, m(i, j));
    return a;
  }

  void set_entry(std::size_t i, std::size_t j, const AffineForm<F>& a) {
    constant(i, j) = a.constant;
    for (auto& [v, m] : coeffs) m(i, j) = F{};
    for (const auto& [v, c] : a.coeffs) {
      if (is_zero(c)) continue;
      auto it = coeffs.find(v);
      if (it == coeffs.end()) it = coeffs.emplace(v, Matrix<F>(rows(), cols())).first;
      it->second(i, j) = c;
    }
  }
};

template <class F>
struct Abp {
  std::vector<std::string> vars;
  std::vector<AbpLayer<F>> layers;

  std::size_t num_layers() const { return layers.size(); }
  std::size_t width() const {
    std::size_t w = 0;
    for (const auto& l : layers) w = std::max({w, l.rows(), l.cols()});
    return w;
  }

  void validate() const {
    if (layers.empty()) throw ShapeError("abp: at least one layer required");
    if (layers.front().rows() != 1 || layers.back().cols() != 1) throw ShapeError("abp: must start 1 x w and end w x 1");
    for (std::size_t t = 0; t < layers.size(); ++t) {
      if (t > 0 && layers[t - 1].cols() != layers[t].rows()) throw ShapeError("abp: adjacent layer shapes do not compose");
      for (const auto& [v, m] : layers[t].coeffs) {
        if (v >= vars.size()) throw std::invalid_argument("abp: variable index out of range");
        if (m.rows() != layers[t].rows() || m.cols() != layers[t].cols()) throw ShapeError("abp: coefficient shape mismatch");
      }
    }
  }
};

inline std::string word_to_string(const Word& w, const std::vector<std::string>& vars) {
  std::string out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) out += " ";
    out += vars.at(w[k]);
  }
  return out;
}

/// Product of the evaluated layers, each layer being M0 (x) I + sum_v M_v (x) p_v.
template <class F>
Matrix<F> abp_eval(const Abp<F>& f, const MatTuple<F>& p) {
  f.validate();
  if (p.mats.size() != f.vars.size()) throw ShapeError("abp_eval: variable count mismatch");
  p.validate();
  const std::size_t d = p.dim;
  Matrix<F> acc = Matrix<F>::identity(d);
  for (const auto& layer : f.layers) {
    Matrix<F> e = tensor_with_identity(layer.constant, d);
    for (const auto& [v, m] : layer.coeffs) detail::add_kron(e, m, p.mats[v]);
    acc = acc * e;
  }
  return acc;
}

/// automaton tuple for a word: M_v(t, t+1) = 1 iff word[t] = v, padded with
/// zero rows and columns up to dimension D.
template <class F>
MatTuple<F> automaton_tuple(const Word& word, std::size_t nvars, std::size_t D) {
  if (D < word.size() + 1) throw std::invalid_argument("automaton_tuple: dimension must be at least |word| + 1");
  MatTuple<F> t = MatTuple<F>::zero(nvars, D);
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (word[k] >= nvars) throw std::invalid_argument("automaton_tuple: letter out of range");
    t.mats[word[k]](k, k + 1) = F(1L);
  }
  return t;
}

namespace detail {

template <class F>
struct ExactOps {
  using T = F;
  bool zero(const F& a) const { return is_zero(a); }
  F add(const F& a, const F& b) const { return a + b; }
  F sub(const F& a, const F& b) const { return a - b; }
  F mul(const F& a, const F& b) const { return a * b; }
  F inv(const F& a) const { return F(1L) / a; }
};

struct ModOps {
  using T = u64;
  const ModProbe* probe;
  bool zero(u64 a) const { return a == 0; }
  u64 add(u64 a, u64 b) const { return probe->add(a, b); }
  u64 sub(u64 a, u64 b) const { return probe->sub(a, b); }
  u64 mul(u64 a, u64 b) const { return probe->mul(a, b); }
  u64 inv(u64 a) const { return probe->inv(a); }
};

// Layers flattened for the zero test: per layer a constant block and sparse
// per-variable blocks.
template <class T>
struct FlatLayer {
  std::size_t rows = 0, cols = 0;
  Matrix<T> constant;
  std::vector<std::pair<std::size_t, Matrix<T>>> coeffs;
};

template <class T>
struct RsResult {
  bool zero = true;
  Word word;
  T coeff{};
};

// Raz-Shpilka over graded states. A state holds one row vector per layer
// boundary; for a word u it records the coefficient of u in every prefix
// product. Appending a letter is linear in the state, so spans per word
// length suffice. Candidates are generated in lexicographic order and the
// first independent one with nonzero output is returned.
template <class Ops>
RsResult<typename Ops::T> rs_core(const std::vector<FlatLayer<typename Ops::T>>& layers, std::size_t nvars,
                                  const Ops& ops) {
  using T = typename Ops::T;
  const std::size_t L = layers.size();
  std::vector<std::size_t> off(L + 2, 0);
  off[1] = 1;
  for (std::size_t t = 0; t < L; ++t) off[t + 2] = off[t + 1] + layers[t].cols;
  const std::size_t S = off[L + 1];

  // per variable, the layers where it occurs
  std::vector<std::vector<std::pair<std::size_t, const Matrix<T>*>>> occurs(nvars);
  for (std::size_t t = 0; t < L; ++t)
    for (const auto& [v, m] : layers[t].coeffs) occurs[v].push_back({t, &m});

  auto vec_mat = [&](const std::vector<T>& s, std::size_t from, const Matrix<T>& m, std::vector<T>& out,
                     std::size_t to) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const T& a = s[from + i];
      if (ops.zero(a)) continue;
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!ops.zero(m(i, j))) out[to + j] = ops.add(out[to + j], ops.mul(a, m(i, j)));
    }
  };
  // Propagate constants from boundary t onward: c_{t+1} += c_t * M0^{(t+1)}.
  auto propagate = [&](std::vector<T>& s, std::size_t first) {
    for (std::size_t t = first; t < L; ++t) vec_mat(s, off[t], layers[t].constant, s, off[t + 1]);
  };

  struct Entry {
    Word word;
    std::vector<T> state;
  };
  std::vector<Entry> level;
  {
    std::vector<T> s(S);
    s[0] = T(1);
    propagate(s, 0);
    if (!ops.zero(s[S - 1])) return {false, {}, s[S - 1]};
    level.push_back({{}, std::move(s)});
  }
  for (std::size_t len = 1; len <= L && !level.empty(); ++len) {
    std::vector<Entry> next;
    std::vector<std::vector<T>> echelon;
    std::vector<std::size_t> pivots;
    for (const auto& e : level) {
      for (std::size_t v = 0; v < nvars; ++v) {
        if (occurs[v].empty()) continue;
        std::vector<T> s(S);
        // The new letter is read at some layer t; everything before stays zero.
        std::size_t first = L;
        for (const auto& [t, m] : occurs[v]) {
          vec_mat(e.state, off[t], *m, s, off[t + 1]);
          first = std::min(first, t);
        }
        // Apply constants in order, interleaved with the letter contributions
        // already added above (they only feed forward).
        for (std::size_t t = first + 1; t < L; ++t) vec_mat(s, off[t], layers[t].constant, s, off[t + 1]);
        std::vector<T> red = s;
        for (std::size_t k = 0; k < echelon.size(); ++k) {
          const T f = red[pivots[k]];
          if (ops.zero(f)) continue;
          for (std::size_t j = 0; j < S; ++j)
            if (!ops.zero(echelon[k][j])) red[j] = ops.sub(red[j], ops.mul(f, echelon[k][j]));
        }
        std::size_t piv = S;
        for (std::size_t j = 0; j < S; ++j)
          if (!ops.zero(red[j])) {
            piv = j;
            break;
          }
        if (piv == S) continue;
        Word w = e.word;
        w.push_back(v);
        if (!ops.zero(s[S - 1])) return {false, std::move(w), s[S - 1]};
        T iv = ops.inv(red[piv]);
        for (auto& x : red)
          if (!ops.zero(x)) x = ops.mul(x, iv);
        echelon.push_back(std::move(red));
        pivots.push_back(piv);
        next.push_back({std::move(w), std::move(s)});
      }
    }
    level = std::move(next);
  }
  return {};
}

template <class F>
std::vector<FlatLayer<F>> flatten(const Abp<F>& f) {
  std::vector<FlatLayer<F>> out;
  for (const auto& l : f.layers) {
    FlatLayer<F> fl;
    fl.rows = l.rows();
    fl.cols = l.cols();
    fl.constant = l.constant;
    for (const auto& [v, m] : l.coeffs)
      if (!m.is_zero()) fl.coeffs.push_back({v, m});
    out.push_back(std::move(fl));
  }
  return out;
}

template <class F>
std::optional<std::vector<FlatLayer<u64>>> flatten_mod(const Abp<F>& f, const ModProbe& probe) {
  std::vector<FlatLayer<u64>> out;
  for (const auto& l : f.layers) {
    FlatLayer<u64> fl;
    fl.rows = l.rows();
    fl.cols = l.cols();
    auto c = probe.image(l.constant);
    if (!c) return std::nullopt;
    fl.constant = std::move(*c);
    for (const auto& [v, m] : l.coeffs) {
      if (m.is_zero()) continue;
      auto im = probe.image(m);
      if (!im) return std::nullopt;
      fl.coeffs.push_back({v, std::move(*im)});
    }
    out.push_back(std::move(fl));
  }
  return out;
}

}  // namespace detail

/// Exact zero test of the formal noncommutative polynomial computed by f.
template <class F>
bool rs_zero_test(const Abp<F>& f) {
  f.validate();
  return detail::rs_core(detail::flatten(f), f.vars.size(), detail::ExactOps<F>{}).zero;
}

/// A word with nonzero coefficient in f, and that coefficient. Among the
/// shortest such candidates the lexicographically first one is chosen.
template <class F>
std::pair<Word, F> extract_monomial_with_coeff(const Abp<F>& f) {
  f.validate();
  auto res = detail::rs_core(detail::flatten(f), f.vars.size(), detail::ExactOps<F>{});
  if (res.zero) throw std::domain_error("extract_monomial: polynomial is identically zero");
  return {std::move(res.word), std::move(res.coeff)};
}

template <class F>
Word extract_monomial(const Abp<F>& f) {
  return extract_monomial_with_coeff(f).first;
}

/// Zero test in a homomorphic image. A word returned here has a coefficient
/// whose image is nonzero, so it is certified nonzero over K as well;
/// nullopt means the image vanished (inconclusive) or was undefined.
template <class F>
std::optional<Word> rs_nonzero_word_mod(const Abp<F>& f, const ModProbe& probe) {
  auto flat = detail::flatten_mod(f, probe);
  if (!flat) return std::nullopt;
  auto res = detail::rs_core(*flat, f.vars.size(), detail::ModOps{&probe});
  if (res.zero) return std::nullopt;
  return res.word;
}

}  // namespace ncrank
