#pragma once

// JSON files (all carry "format": 1):
//   pencil       {"s", "vars", "A0", "A": {var: matrix}, "meta"?}
//   witness      {"kind": "witness", "s", "n", "r", "d", "cycloIndex", "vars", "matrices": {var: matrix}}
//   certificate  {"kind": "upper", "s", "r", "d", "pairs": [[i, j], ...], "digest"}
//   abp          {"vars", "cycloIndex"?, "layers": [matrix of entries]}
// Matrices are row lists of strings: rationals "p/q" for pencils, the scalar
// grammar for witnesses and ABPs. An ABP entry is either a scalar string or
// {"const": scalar, "coeffs": {var: scalar}}.

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "ncrank/abp.hpp"
#include "ncrank/rank_core.hpp"
#include "ncrank/scalar_format.hpp"

namespace ncrank {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

namespace detail {

inline void check_format(const json& j) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  if (!j.contains("format") || !j["format"].is_number_integer() || j["format"].get<int>() != kFormatVersion)
    throw ParseError("missing or unsupported \"format\" (expected 1)");
}

inline const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

inline std::size_t size_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ParseError(std::string("field \"") + key + "\" must be a non-negative integer");
  return v.get<std::size_t>();
}

inline std::vector<std::string> var_list(const json& j) {
  const json& v = field(j, "vars");
  if (!v.is_array()) throw ParseError("\"vars\" must be an array of names");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) throw ParseError("\"vars\" must be an array of names");
    out.push_back(x.get<std::string>());
  }
  if (std::set<std::string>(out.begin(), out.end()).size() != out.size()) throw ParseError("duplicate variable name");
  return out;
}

inline std::string scalar_text(const json& x) {
  if (x.is_string()) return x.get<std::string>();
  if (x.is_number_integer()) return std::to_string(x.get<long long>());
  throw ParseError("matrix entry must be a string or an integer");
}

template <class F, class Parse>
Matrix<F> matrix_from_json(const json& m, std::size_t rows, std::size_t cols, Parse parse) {
  if (!m.is_array() || m.size() != rows) throw ParseError("matrix must have " + std::to_string(rows) + " rows");
  Matrix<F> out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!m[i].is_array() || m[i].size() != cols) throw ParseError("matrix row must have " + std::to_string(cols) + " entries");
    for (std::size_t k = 0; k < cols; ++k) out(i, k) = parse(scalar_text(m[i][k]));
  }
  return out;
}

template <class F>
json matrix_to_json(const Matrix<F>& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(to_string(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline Pencil pencil_from_json(const json& j) {
  detail::check_format(j);
  const std::size_t s = detail::size_field(j, "s");
  Pencil T;
  T.vars = detail::var_list(j);
  T.A0 = detail::matrix_from_json<Rational>(detail::field(j, "A0"), s, s, [](const std::string& t) { return parse_rational(t); });
  const json& A = detail::field(j, "A");
  if (!A.is_object() || A.size() != T.vars.size()) throw ParseError("\"A\" must map every variable to a matrix");
  for (const auto& v : T.vars) {
    auto it = A.find(v);
    if (it == A.end()) throw ParseError("no coefficient matrix for variable '" + v + "'");
    T.A.push_back(detail::matrix_from_json<Rational>(*it, s, s, [](const std::string& t) { return parse_rational(t); }));
  }
  return T;
}

inline json pencil_to_json(const Pencil& T, const json& meta = nullptr) {
  json j;
  j["format"] = kFormatVersion;
  j["s"] = T.rows();
  j["vars"] = T.vars;
  j["A0"] = detail::matrix_to_json(T.A0);
  json A = json::object();
  for (std::size_t v = 0; v < T.num_vars(); ++v) A[T.vars[v]] = detail::matrix_to_json(T.A[v]);
  j["A"] = std::move(A);
  if (!meta.is_null()) j["meta"] = meta;
  return j;
}

inline json witness_to_json(const Pencil& T, const Witness& w) {
  json j;
  j["format"] = kFormatVersion;
  j["kind"] = "witness";
  j["s"] = T.rows();
  j["n"] = T.num_vars();
  j["r"] = w.r;
  j["d"] = w.dim;
  j["cycloIndex"] = w.cyclo_index;
  j["vars"] = T.vars;
  json m = json::object();
  for (std::size_t v = 0; v < T.num_vars(); ++v) m[T.vars[v]] = detail::matrix_to_json(w.tuple.mats[v]);
  j["matrices"] = std::move(m);
  return j;
}

/// Reads a witness for T; shape or variable mismatches are parse errors.
inline Witness witness_from_json(const json& j, const Pencil& T) {
  detail::check_format(j);
  if (!j.contains("kind") || j["kind"] != "witness") throw ParseError("not a witness file");
  if (detail::size_field(j, "s") != T.rows()) throw ParseError("witness size differs from the pencil");
  if (detail::size_field(j, "n") != T.num_vars()) throw ParseError("witness variable count differs from the pencil");
  if (detail::var_list(j) != T.vars) throw ParseError("witness variables differ from the pencil");
  Witness w;
  w.r = detail::size_field(j, "r");
  w.dim = detail::size_field(j, "d");
  if (w.dim == 0) throw ParseError("witness dimension must be positive");
  const std::size_t idx = detail::size_field(j, "cycloIndex");
  if (idx == 0) throw ParseError("cycloIndex must be positive");
  w.cyclo_index = static_cast<int>(idx);
  const json& m = detail::field(j, "matrices");
  if (!m.is_object() || m.size() != T.num_vars()) throw ParseError("\"matrices\" must map every variable to a matrix");
  w.tuple.dim = w.dim;
  for (const auto& v : T.vars) {
    auto it = m.find(v);
    if (it == m.end()) throw ParseError("no matrix for variable '" + v + "'");
    w.tuple.mats.push_back(detail::matrix_from_json<FieldScalar>(
        *it, w.dim, w.dim, [&](const std::string& t) { return parse_scalar(t, w.cyclo_index); }));
  }
  return w;
}

inline json certificate_to_json(const Pencil& T, const UpperCertificate& c) {
  json j;
  j["format"] = kFormatVersion;
  j["kind"] = "upper";
  j["s"] = T.rows();
  j["r"] = c.r;
  j["d"] = c.d;
  json pairs = json::array();
  for (const auto& [a, b] : c.pairs) pairs.push_back({a + 1, b + 1});
  j["pairs"] = std::move(pairs);
  j["digest"] = c.digest;
  return j;
}

inline UpperCertificate certificate_from_json(const json& j) {
  detail::check_format(j);
  if (!j.contains("kind") || j["kind"] != "upper") throw ParseError("not an upper-bound certificate");
  UpperCertificate c;
  c.r = detail::size_field(j, "r");
  c.d = detail::size_field(j, "d");
  const json& pairs = detail::field(j, "pairs");
  if (!pairs.is_array()) throw ParseError("\"pairs\" must be an array");
  for (const auto& p : pairs) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer() || p[0].get<long long>() < 1 ||
        p[1].get<long long>() < 1)
      throw ParseError("pair must be [i, j] with 1-based indices");
    c.pairs.emplace_back(p[0].get<std::size_t>() - 1, p[1].get<std::size_t>() - 1);
  }
  const json& d = detail::field(j, "digest");
  if (!d.is_string()) throw ParseError("\"digest\" must be a string");
  c.digest = d.get<std::string>();
  return c;
}

inline Abp<FieldScalar> abp_from_json(const json& j) {
  detail::check_format(j);
  Abp<FieldScalar> f;
  f.vars = detail::var_list(j);
  int idx = 1;
  if (j.contains("cycloIndex")) {
    const std::size_t v = detail::size_field(j, "cycloIndex");
    if (v == 0) throw ParseError("cycloIndex must be positive");
    idx = static_cast<int>(v);
  }
  std::map<std::string, std::size_t> pos;
  for (std::size_t v = 0; v < f.vars.size(); ++v) pos[f.vars[v]] = v;
  const json& layers = detail::field(j, "layers");
  if (!layers.is_array() || layers.empty()) throw ParseError("\"layers\" must be a non-empty array");
  for (const auto& L : layers) {
    if (!L.is_array() || L.empty() || !L[0].is_array()) throw ParseError("layer must be a non-empty matrix");
    const std::size_t rows = L.size(), cols = L[0].size();
    AbpLayer<FieldScalar> layer = AbpLayer<FieldScalar>::zero(rows, cols);
    for (std::size_t a = 0; a < rows; ++a) {
      if (!L[a].is_array() || L[a].size() != cols) throw ParseError("layer rows must have equal length");
      for (std::size_t b = 0; b < cols; ++b) {
        const json& e = L[a][b];
        AffineForm<FieldScalar> form;
        if (e.is_object()) {
          if (e.contains("const")) form.constant = parse_scalar(detail::scalar_text(e["const"]), idx);
          if (e.contains("coeffs")) {
            if (!e["coeffs"].is_object()) throw ParseError("\"coeffs\" must be an object");
            for (const auto& [name, c] : e["coeffs"].items()) {
              auto it = pos.find(name);
              if (it == pos.end()) throw ParseError("unknown variable '" + name + "' in ABP entry");
              form.coeffs[it->second] = parse_scalar(detail::scalar_text(c), idx);
            }
          }
        } else {
          form.constant = parse_scalar(detail::scalar_text(e), idx);
        }
        layer.set_entry(a, b, form);
      }
    }
    f.layers.push_back(std::move(layer));
  }
  try {
    f.validate();
  } catch (const std::exception& e) {
    throw ParseError(e.what());
  }
  return f;
}

template <class F>
json abp_to_json(const Abp<F>& f, int cyclo_index = 1) {
  json j;
  j["format"] = kFormatVersion;
  j["vars"] = f.vars;
  if (cyclo_index != 1) j["cycloIndex"] = cyclo_index;
  json layers = json::array();
  for (const auto& L : f.layers) {
    json rows = json::array();
    for (std::size_t a = 0; a < L.rows(); ++a) {
      json row = json::array();
      for (std::size_t b = 0; b < L.cols(); ++b) {
        AffineForm<F> form = L.entry(a, b);
        if (form.coeffs.empty()) {
          row.push_back(to_string(form.constant));
          continue;
        }
        json e;
        e["const"] = to_string(form.constant);
        json c = json::object();
        for (const auto& [v, x] : form.coeffs) c[f.vars[v]] = to_string(x);
        e["coeffs"] = std::move(c);
        row.push_back(std::move(e));
      }
      rows.push_back(std::move(row));
    }
    layers.push_back(std::move(rows));
  }
  j["layers"] = std::move(layers);
  return j;
}

/// The rational form of an ABP whose coefficients are all rational.
inline std::optional<Abp<Rational>> rational_abp(const Abp<FieldScalar>& f) {
  auto conv = [](const Matrix<FieldScalar>& m) -> std::optional<Matrix<Rational>> {
    for (const auto& v : m.data())
      if (!v.is_rational()) return std::nullopt;
    return m.map([](const FieldScalar& v) { return v.rational_value(); });
  };
  Abp<Rational> out;
  out.vars = f.vars;
  for (const auto& L : f.layers) {
    AbpLayer<Rational> R;
    auto c = conv(L.constant);
    if (!c) return std::nullopt;
    R.constant = std::move(*c);
    for (const auto& [v, m] : L.coeffs) {
      auto cm = conv(m);
      if (!cm) return std::nullopt;
      R.coeffs.emplace(v, std::move(*cm));
    }
    out.layers.push_back(std::move(R));
  }
  return out;
}

}  // namespace ncrank
