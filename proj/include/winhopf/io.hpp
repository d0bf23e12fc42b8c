#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "winhopf/harness.hpp"

namespace winhopf {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void schema_error(const std::string& what) { throw Error(ErrorCode::schema, what); }

inline Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  schema_error(where + ": expected a number or [re, im]");
}

inline std::vector<Complex> complex_list(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where + ": expected a list of [re, im]");
  std::vector<Complex> out;
  for (const json& v : j) out.push_back(complex_from_json(v, where));
  return out;
}

inline json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline json complex_list_to_json(const std::vector<Complex>& zs) {
  json out = json::array();
  for (const Complex& z : zs) out.push_back(complex_to_json(z));
  return out;
}

}  // namespace detail

/// Accepts {"delta", "num", "den"} (ascending coefficients) or
/// {"delta", "zeros", "poles", "gain"}; "delta" defaults to 0.
inline Symbol symbol_from_json(const json& j) {
  if (!j.is_object()) detail::schema_error("symbol must be a JSON object");
  double delta = 0.0;
  if (j.contains("delta")) {
    if (!j["delta"].is_number()) detail::schema_error("symbol.delta must be a number");
    delta = j["delta"].get<double>();
  }
  if (j.contains("num") || j.contains("den")) {
    if (!j.contains("num") || !j.contains("den")) detail::schema_error("symbol needs both num and den");
    const ComplexPoly num(detail::complex_list(j["num"], "symbol.num"));
    const ComplexPoly den(detail::complex_list(j["den"], "symbol.den"));
    if (den.is_zero()) detail::schema_error("symbol.den is identically zero");
    return Symbol(Rational::from_polys(num, den), delta);
  }
  if (j.contains("zeros") || j.contains("poles") || j.contains("gain")) {
    const auto zeros = j.contains("zeros") ? detail::complex_list(j["zeros"], "symbol.zeros") : std::vector<Complex>{};
    const auto poles = j.contains("poles") ? detail::complex_list(j["poles"], "symbol.poles") : std::vector<Complex>{};
    const Complex gain = j.contains("gain") ? detail::complex_from_json(j["gain"], "symbol.gain") : Complex(1.0);
    return Symbol(Rational::from_zpk(gain, zeros, poles), delta);
  }
  if (j.contains("delta")) return Symbol::exponential(delta);
  detail::schema_error("symbol needs num/den or zeros/poles/gain");
}

/// Canonical output in the zeros/poles form.
inline json to_json(const Symbol& g) {
  return {{"delta", g.delta()},
          {"zeros", detail::complex_list_to_json(g.rat().zeros())},
          {"poles", detail::complex_list_to_json(g.rat().poles())},
          {"gain", detail::complex_to_json(g.rat().gain())}};
}

/// Pair files hold {"a": symbol, "b": symbol}.
inline MatchingPair pair_from_json(const json& j) {
  if (!j.is_object() || !j.contains("a") || !j.contains("b"))
    detail::schema_error("pair file needs objects \"a\" and \"b\"");
  return make_matching_pair(symbol_from_json(j["a"]), symbol_from_json(j["b"]));
}

inline json to_json(const MatchingPair& p) {
  return {{"a", to_json(p.a)},    {"b", to_json(p.b)},   {"c", to_json(p.c)},
          {"d", to_json(p.d)},    {"nu1", p.nu1},        {"nu2", p.nu2},
          {"n1", p.n1},           {"n2", p.n2},          {"sigma_c", p.sigma_c},
          {"sigma_d", p.sigma_d}};
}

inline json to_json(const Factorization& f) {
  return {{"g_minus", to_json(f.g_minus)},
          {"nu", f.nu},
          {"n", f.n},
          {"g_plus", to_json(f.g_plus)},
          {"sigma", f.sigma ? json(*f.sigma) : json(nullptr)}};
}

inline Factorization factorization_from_json(const json& j) {
  if (!j.is_object() || !j.contains("g_minus") || !j.contains("g_plus") || !j.contains("n"))
    detail::schema_error("factorization needs g_minus, g_plus, nu, n");
  Factorization f;
  f.g_minus = symbol_from_json(j["g_minus"]);
  f.g_plus = symbol_from_json(j["g_plus"]);
  f.nu = j.value("nu", 0.0);
  f.n = j["n"].get<int>();
  if (j.contains("sigma") && !j["sigma"].is_null()) f.sigma = j["sigma"].get<int>();
  return f;
}

/// The symbol a factorization multiplies back to.
inline Symbol reassemble(const Factorization& f) {
  return f.g_minus * Symbol::exponential(f.nu) * Symbol::zeta(f.n) * f.g_plus;
}

inline json to_json(const FactorizationReport& r) {
  return {{"max_relative_error", r.max_relative_error},
          {"plus_margin", r.plus_margin},
          {"minus_margin", r.minus_margin},
          {"plus_certified", r.plus_certified},
          {"minus_certified", r.minus_certified}};
}

inline json to_json(const Rule& r) { return {{"rule", r.id}, {"condition", r.condition}}; }

inline json dim_to_json(const Dim& d) { return d.is_finite() ? json(d.value) : json(d.str()); }

inline json to_json(const ClassificationReport& r) {
  json rules = json::array();
  for (const Rule& rule : r.fired_rules) rules.push_back(to_json(rule));
  json out = {{"verdict", verdict_name(r.verdict)},
              {"fired_rules", rules},
              {"predicted_dims", {{"ker", dim_to_json(r.ker)}, {"coker", dim_to_json(r.coker)}}},
              {"indices", {{"nu1", r.nu1}, {"n1", r.n1}, {"nu2", r.nu2}, {"n2", r.n2}, {"sigma", r.sigma}}}};
  if (r.pointer) out["note"] = *r.pointer;
  return out;
}

inline json to_json(const ShiftKernelReport& r) {
  return {{"verdict", shift_kernel_verdict_name(r.verdict)},
          {"smallest_angle", r.smallest_angle},
          {"subspace_dim", r.subspace_dim},
          {"note", "necessary condition only; plausible does not imply invertibility"}};
}

/// Recipe summary: formula, factor symbols, diagnostics and a residual table.
inline json to_json(const InverseRecipe& r, const std::vector<std::pair<std::string, double>>& residuals = {}) {
  json factors = json::object();
  for (const auto& [label, f] : r.factors) factors[label] = to_json(f);
  json symbols = json::object();
  for (const auto& [label, g] : r.symbols) symbols[label] = to_json(g);
  json table = json::array();
  for (const auto& [name, value] : residuals) table.push_back({{"check", name}, {"residual", value}});
  return {{"kind", kind_name(r.kind)},
          {"formula_id", r.formula_id},
          {"recipe", r.assembled.recipe()},
          {"factors", factors},
          {"symbols", symbols},
          {"diagnostics", r.diagnostics},
          {"notes", r.notes},
          {"residuals", table}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::schema_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    detail::schema_error(path + ": " + e.what());
  }
}

/// Matrix export: CSV rows "re+imj" pairs, or binary with the 8-byte magic
/// "WHOPMTX1" followed by row-major complex128 entries. Dimensions and the
/// build recipe go to a JSON sidecar "<path>.json".
inline void write_matrix_csv(const CMatrix& m, std::ostream& out) {
  out.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j).real() << ',' << m(i, j).imag();
    }
    out << '\n';
  }
}

inline void write_matrix_binary(const CMatrix& m, std::ostream& out) {
  out.write("WHOPMTX1", 8);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      const double parts[2] = {m(i, j).real(), m(i, j).imag()};
      out.write(reinterpret_cast<const char*>(parts), sizeof parts);
    }
}

inline CMatrix read_matrix_binary(std::istream& in, Index rows, Index cols) {
  char magic[8];
  if (!in.read(magic, 8) || std::string(magic, 8) != "WHOPMTX1") detail::schema_error("bad matrix magic");
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      double parts[2];
      if (!in.read(reinterpret_cast<char*>(parts), sizeof parts)) detail::schema_error("truncated matrix file");
      m(i, j) = {parts[0], parts[1]};
    }
  return m;
}

inline void export_operator(const DiscreteOperator& op, const std::string& path, const std::string& format) {
  const CMatrix m = op.matrix();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::schema, "cannot write " + path);
  if (format == "csv")
    write_matrix_csv(m, out);
  else
    write_matrix_binary(m, out);
  std::ofstream side(path + ".json");
  side << json{{"rows", m.rows()},
               {"cols", m.cols()},
               {"backend", backend_name(op.backend())},
               {"format", format == "csv" ? "csv re,im pairs" : "WHOPMTX1 row-major complex128"},
               {"recipe", op.recipe()}}
              .dump(2)
       << '\n';
}

/// Right-hand side samples "t,value_re,value_im" (an optional header line is
/// skipped), linearly interpolated onto grid nodes and zero outside the
/// sampled range; projected onto the modes for the Laguerre backend.
struct SampledFunction {
  std::vector<double> t;
  std::vector<Complex> v;

  Complex operator()(double x) const {
    if (t.empty() || x < t.front() || x > t.back()) return 0.0;
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.end()) return v.back();
    const std::size_t k = std::size_t(it - t.begin());
    if (k == 0) return v.front();
    const double w = (x - t[k - 1]) / (t[k] - t[k - 1]);
    return (1.0 - w) * v[k - 1] + w * v[k];
  }

  CVector sample(const RVector& x) const {
    CVector out(x.size());
    for (Index i = 0; i < x.size(); ++i) out[i] = (*this)(x[i]);
    return out;
  }

  CVector discretize(const Discretization& disc) const {
    if (const Grid* g = std::get_if<Grid>(&disc)) return sample(g->nodes());
    const TestFunction dummy;
    return dummy.project_onto_laguerre(sample(TestFunction::reference_nodes()), size_of(disc));
  }
};

inline SampledFunction read_rhs_csv(std::istream& in) {
  SampledFunction f;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> cells;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      // strtod, unlike stod, accepts subnormal values.
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      while (end && (*end == ' ' || *end == '\r')) ++end;
      if (end == cell.c_str() || *end != '\0') numeric = false;
      cells.push_back(v);
    }
    if (!numeric && lineno == 1 && f.t.empty()) continue;
    if (!numeric || cells.size() < 2 || cells.size() > 3)
      detail::schema_error("rhs line " + std::to_string(lineno) + ": expected t,value_re[,value_im]");
    if (!f.t.empty() && cells[0] <= f.t.back()) detail::schema_error("rhs abscissae must increase");
    f.t.push_back(cells[0]);
    f.v.push_back({cells[1], cells.size() == 3 ? cells[2] : 0.0});
  }
  if (f.t.size() < 2) detail::schema_error("rhs file needs at least two samples");
  return f;
}

}  // namespace winhopf
