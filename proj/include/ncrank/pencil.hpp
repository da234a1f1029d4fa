#pragma once

#include <set>
#include <string>
#include <vector>

#include "ncrank/field_scalar.hpp"
#include "ncrank/matrix.hpp"

namespace ncrank {

/// T = A0 + sum_i A[i] * x_i with coefficient matrices over F.
///
/// The coefficient matrices need not be square: blocks of a decomposed
/// pencil are rectangular pencils over the same variables.
template <class F>
struct LinearPencil {
  std::vector<std::string> vars;
  Matrix<F> A0;
  std::vector<Matrix<F>> A;

  std::size_t rows() const { return A0.rows(); }
  std::size_t cols() const { return A0.cols(); }
  std::size_t num_vars() const { return vars.size(); }

  void validate() const {
    if (A.size() != vars.size()) throw ShapeError("pencil: one coefficient matrix per variable expected");
    std::set<std::string> seen(vars.begin(), vars.end());
    if (seen.size() != vars.size()) throw std::invalid_argument("pencil: duplicate variable name");
    for (const auto& m : A)
      if (m.rows() != rows() || m.cols() != cols()) throw ShapeError("pencil: coefficient shape mismatch");
  }

  bool is_zero() const {
    if (!A0.is_zero()) return false;
    for (const auto& m : A)
      if (!m.is_zero()) return false;
    return true;
  }
};

using Pencil = LinearPencil<Rational>;
using KPencil = LinearPencil<FieldScalar>;

/// One d x d matrix per variable.
template <class F>
struct MatTuple {
  std::size_t dim = 0;
  std::vector<Matrix<F>> mats;

  static MatTuple zero(std::size_t nvars, std::size_t d) {
    MatTuple t;
    t.dim = d;
    t.mats.assign(nvars, Matrix<F>(d, d));
    return t;
  }

  void validate() const {
    for (const auto& m : mats)
      if (m.rows() != dim || m.cols() != dim) throw ShapeError("tuple: matrices must be dim x dim");
  }
};

namespace detail {

template <class F, class G>
F lift(const G& g) {
  if constexpr (std::is_same_v<F, G>) {
    return g;
  } else {
    return F(g);
  }
}

// out += kron(a, p) where p is square of size d.
template <class F, class G>
void add_kron(Matrix<F>& out, const Matrix<G>& a, const Matrix<F>& p) {
  const std::size_t d = p.rows();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (is_zero(a(i, j))) continue;
      F c = lift<F>(a(i, j));
      bool unit = c == F(1L);
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l) {
          const F& v = p(k, l);
          if (is_zero(v)) continue;
          F& dst = out(i * d + k, j * d + l);
          dst = dst + (unit ? v : c * v);
        }
    }
}

}  // namespace detail

/// A0 (x) I_d + sum_i A_i (x) p_i.
template <class F, class G>
Matrix<F> pencil_eval(const LinearPencil<G>& T, const MatTuple<F>& p) {
  if (p.mats.size() != T.num_vars()) throw ShapeError("pencil_eval: variable count mismatch");
  p.validate();
  const std::size_t d = p.dim;
  Matrix<F> out(T.rows() * d, T.cols() * d);
  for (std::size_t i = 0; i < T.rows(); ++i)
    for (std::size_t j = 0; j < T.cols(); ++j) {
      if (is_zero(T.A0(i, j))) continue;
      F c = detail::lift<F>(T.A0(i, j));
      for (std::size_t k = 0; k < d; ++k) out(i * d + k, j * d + k) = c;
    }
  for (std::size_t v = 0; v < T.num_vars(); ++v) detail::add_kron(out, T.A[v], p.mats[v]);
  return out;
}

/// Names of the n*d*d fresh variables z^(i)_{jk}, in (i, j, k) lexicographic order.
inline std::vector<std::string> blowup_var_names(std::size_t n, std::size_t d) {
  std::vector<std::string> out;
  out.reserve(n * d * d);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= d; ++j)
      for (std::size_t k = 1; k <= d; ++k)
        out.push_back("z" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(k));
  return out;
}

/// T_d(Z + p) as a pencil over z^(i)_{jk}: constant part T(p), and the
/// coefficient of z^(i)_{jk} is A_i (x) E_jk.
template <class F, class G>
LinearPencil<F> blowup_shift(const LinearPencil<G>& T, std::size_t d, const MatTuple<F>& p) {
  if (p.dim != d) throw ShapeError("blowup_shift: tuple dimension differs from d");
  LinearPencil<F> out;
  out.vars = blowup_var_names(T.num_vars(), d);
  out.A0 = pencil_eval(T, p);
  for (std::size_t v = 0; v < T.num_vars(); ++v)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        Matrix<F> m(T.rows() * d, T.cols() * d);
        for (std::size_t a = 0; a < T.rows(); ++a)
          for (std::size_t b = 0; b < T.cols(); ++b)
            if (!is_zero(T.A[v](a, b))) m(a * d + j, b * d + k) = detail::lift<F>(T.A[v](a, b));
        out.A.push_back(std::move(m));
      }
  return out;
}

/// Evaluates a pencil with F coefficients at scalars (1x1 tuple shortcut).
template <class F>
Matrix<F> pencil_at_scalars(const LinearPencil<F>& T, const std::vector<F>& x) {
  MatTuple<F> p;
  p.dim = 1;
  for (const auto& v : x) p.mats.push_back(Matrix<F>(1, 1, {v}));
  return pencil_eval(T, p);
}

/// Converts a rational pencil to one with F coefficients.
template <class F>
LinearPencil<F> lift_pencil(const Pencil& T) {
  LinearPencil<F> out;
  out.vars = T.vars;
  auto conv = [](const Rational& q) { return detail::lift<F>(q); };
  out.A0 = T.A0.map(conv);
  for (const auto& m : T.A) out.A.push_back(m.map(conv));
  return out;
}

}  // namespace ncrank
