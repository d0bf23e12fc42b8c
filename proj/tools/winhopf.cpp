// winhopf: batch front end for Wiener-Hopf plus Hankel operators.
//
// Exit codes: 0 success, 1 mathematical precondition failure (E_* errors and
// failed verification checks), 2 input or schema failure.

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "winhopf/io.hpp"
#include "winhopf/suites.hpp"

namespace {

using namespace winhopf;

struct Config {
  double T = 40.0;
  int N = 2560;
  int modes = 200;
  double tol = 1e-8;
  std::uint64_t seed = 20240611;
  std::string backend = "grid";
  std::string format = "json";
  std::string out;
  int jobs = 1;
};

/// Defaults from the JSON file named by WINHOPF_CONFIG; flags override them.
Config config_from_env() {
  Config c;
  const char* path = std::getenv("WINHOPF_CONFIG");
  if (!path || !*path) return c;
  const json j = read_json_file(path);
  if (!j.is_object()) throw Error(ErrorCode::schema, std::string(path) + ": config must be a JSON object");
  try {
    c.T = j.value("T", c.T);
    c.N = j.value("N", c.N);
    c.modes = j.value("modes", c.modes);
    c.tol = j.value("tol", c.tol);
    c.seed = j.value("seed", c.seed);
    c.backend = j.value("backend", c.backend);
    c.format = j.value("format", c.format);
    c.jobs = j.value("jobs", c.jobs);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema, std::string(path) + ": " + e.what());
  }
  return c;
}

void validate(const Config& c) {
  if (!(c.T > 0) || c.N < 16 || c.N % Grid::order != 0)
    throw Error(ErrorCode::schema, "--T must be positive and --N a multiple of 8, at least 16");
  if (c.modes < 1) throw Error(ErrorCode::schema, "--modes must be positive");
  if (!(c.tol > 0 && c.tol < 1)) throw Error(ErrorCode::schema, "--tol must lie in (0, 1)");
  if (c.jobs < 1) throw Error(ErrorCode::schema, "--jobs must be positive");
}

struct Backends {
  std::vector<std::pair<std::string, Discretization>> list;
  std::vector<std::string> skipped;
};

/// Discretizations for --backend; with "both" the Laguerre backend is skipped
/// for symbols that carry an exponential factor.
Backends backends_for(const Config& c, bool rational) {
  Backends b;
  if (c.backend == "grid" || c.backend == "both") b.list.emplace_back("grid", Grid(c.T, c.N));
  if (c.backend == "laguerre" || (c.backend == "both" && rational))
    b.list.emplace_back("laguerre", LaguerreBasis(c.modes));
  else if (c.backend == "both")
    b.skipped.push_back("laguerre: the pair has an exponential factor");
  return b;
}

bool pair_is_rational(const MatchingPair& p) { return p.a.is_rational() && p.b.is_rational(); }

void emit(const Config& c, const json& j, const std::string& csv = {}) {
  const std::string text = c.format == "csv" && !csv.empty() ? csv : j.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw Error(ErrorCode::schema, "cannot write " + c.out);
  f << text;
}

int cmd_analyze(const Config& c, const std::string& pair_file, bool nullity) {
  const MatchingPair p = pair_from_json(read_json_file(pair_file));
  const ClassificationReport rep = classify(p);
  json out = to_json(rep);
  out["pair"] = to_json(p);
  if (rep.verdict == Verdict::undetermined && p.nu1 > 0 && p.nu2 <= 0 && p.n1 == 0 && p.n2 == 0) {
    try {
      out["shift_kernel_check"] = to_json(check_shift_kernel_condition(p, Grid(c.T, c.N)));
    } catch (const Error& e) {
      out["shift_kernel_check"] = {{"error", e.what()}};
    }
  }
  if (nullity) {
    json num = json::object();
    const Backends bs = backends_for(c, pair_is_rational(p));
    for (const auto& [name, disc] : bs.list) {
      const RankGap ker = rank_gap(whh_tall_section(p, disc), c.tol);
      const RankGap coker = rank_gap(whh_tall_section(adjoint_pair(p), disc), c.tol);
      num[name] = {{"ker", ker.nullity},
                   {"ker_gap_ratio", ker.gap_ratio},
                   {"coker", coker.nullity},
                   {"coker_gap_ratio", coker.gap_ratio}};
    }
    for (const std::string& s : bs.skipped) num["skipped"].push_back(s);
    out["numerical_dims"] = num;
  }
  std::ostringstream csv;
  csv << "verdict,ker,coker,nu1,n1,nu2,n2,sigma\n"
      << verdict_name(rep.verdict) << ',' << rep.ker.str() << ',' << rep.coker.str() << ',' << rep.nu1 << ','
      << rep.n1 << ',' << rep.nu2 << ',' << rep.n2 << ',' << rep.sigma << '\n';
  emit(c, out, csv.str());
  return 0;
}

int cmd_factor(const Config& c, const std::string& symbol_file, bool matching) {
  const Symbol g = symbol_from_json(read_json_file(symbol_file));
  const Factorization f = matching ? matching_factor(g) : wiener_hopf_factor(g);
  const FactorizationReport rep = verify_factorization(f, g);
  json out = {{"symbol", to_json(g)}, {"factorization", to_json(f)}, {"report", to_json(rep)}};
  std::ostringstream csv;
  csv << "nu,n,sigma,max_relative_error,plus_certified,minus_certified\n"
      << f.nu << ',' << f.n << ',' << (f.sigma ? std::to_string(*f.sigma) : std::string()) << ','
      << rep.max_relative_error << ',' << rep.plus_certified << ',' << rep.minus_certified << '\n';
  emit(c, out, csv.str());
  return 0;
}

InverseRecipe inverse_of_kind(const MatchingPair& p, const Discretization& disc, const std::string& kind) {
  if (kind == "right") return whh_right_inverse(p, disc);
  if (kind == "left") return whh_left_inverse(p, disc);
  if (kind == "two_sided") return whh_two_sided_inverse(p, disc);
  if (kind == "generalized") return whh_generalized_inverse(p, disc);
  return inverse_for(p, disc, classify(p).verdict);
}

/// Residuals of the identities the inverse kind promises.
std::vector<std::pair<std::string, double>> residual_table(const InverseRecipe& r, const Discretization& disc,
                                                           const CMatrix& v) {
  std::vector<std::pair<std::string, double>> t;
  const DiscreteOperator& A = r.target;
  const DiscreteOperator& X = r.assembled;
  if (r.kind == InverseKind::right || r.kind == InverseKind::two_sided)
    t.emplace_back("(W+H) X = I", residual_to_identity(compose(A, X), v, disc));
  if (r.kind == InverseKind::left || r.kind == InverseKind::two_sided)
    t.emplace_back("X (W+H) = I", residual_to_identity(compose(X, A), v, disc));
  if (r.kind == InverseKind::generalized) {
    t.emplace_back("A G A = A", residual(compose({A, X, A}), &A, v, disc));
    t.emplace_back("G A G = G", residual(compose({X, A, X}), &X, v, disc));
  }
  return t;
}

int cmd_invert(const Config& c, const std::string& pair_file, const std::string& kind, const std::string& export_path,
               const std::string& matrix_format) {
  const MatchingPair p = pair_from_json(read_json_file(pair_file));
  const ClassificationReport cls = classify(p);
  json out = {{"verdict", verdict_name(cls.verdict)}, {"requested_kind", kind}, {"backends", json::object()}};
  std::ostringstream csv;
  csv << "backend,formula_id,check,residual\n";
  const Backends bs = backends_for(c, pair_is_rational(p));
  for (const auto& [name, disc] : bs.list) {
    const InverseRecipe r = inverse_of_kind(p, disc, kind);
    const CMatrix v = TestVectorSet(c.seed, 20).matrix(disc);
    const auto table = residual_table(r, disc, v);
    out["backends"][name] = to_json(r, table);
    for (const auto& [check, value] : table) csv << name << ',' << r.formula_id << ',' << check << ',' << value << '\n';
    if (!export_path.empty()) {
      const std::string path = bs.list.size() > 1 ? export_path + "." + name : export_path;
      export_operator(r.assembled, path, matrix_format);
      out["backends"][name]["exported"] = path;
    }
  }
  for (const std::string& s : bs.skipped) out["skipped"].push_back(s);
  emit(c, out, csv.str());
  return 0;
}

int cmd_solve(const Config& c, const std::string& pair_file, const std::string& rhs) {
  const MatchingPair p = pair_from_json(read_json_file(pair_file));
  std::optional<TestFunction> named;
  std::optional<SampledFunction> sampled;
  if (rhs.rfind("psi", 0) == 0 || rhs.rfind("gauss:", 0) == 0) {
    named = named_function(rhs);
  } else {
    std::ifstream in(rhs);
    if (!in) throw Error(ErrorCode::schema, "cannot open " + rhs);
    sampled = read_rhs_csv(in);
  }
  json out = {{"rhs", rhs}, {"backends", json::object()}};
  std::ostringstream csv;
  csv << "backend,abscissa,x_re,x_im\n";
  const Backends bs = backends_for(c, pair_is_rational(p));
  for (const auto& [name, disc] : bs.list) {
    const CVector f = named ? named->discretize(disc) : sampled->discretize(disc);
    const SolveReport rep = solve(p, f, disc);
    json sol = json::array();
    // Grid solutions are node values; Laguerre solutions are mode coefficients.
    const Grid* grid = std::get_if<Grid>(&disc);
    for (Index k = 0; k < rep.x.size(); ++k) {
      const double abscissa = grid ? grid->nodes()[k] : double(k);
      sol.push_back({abscissa, rep.x[k].real(), rep.x[k].imag()});
      csv << name << ',' << abscissa << ',' << rep.x[k].real() << ',' << rep.x[k].imag() << '\n';
    }
    out["backends"][name] = {{"verdict", verdict_name(rep.verdict)},
                             {"formula_id", rep.formula_id},
                             {"equation_residual", rep.equation_residual},
                             {"range_residual", rep.range_residual},
                             {"dense_difference", rep.dense_difference},
                             {"kernel_dim", dim_to_json(rep.kernel_dim)},
                             {"abscissa", grid ? "grid node t" : "Laguerre mode index"},
                             {"solution", sol}};
  }
  for (const std::string& s : bs.skipped) out["skipped"].push_back(s);
  emit(c, out, csv.str());
  return 0;
}

json to_json(const SuiteResult& r) {
  json checks = json::array();
  for (const Check& ch : r.checks)
    checks.push_back(
        {{"name", ch.name}, {"value", ch.value}, {"limit", ch.tolerance}, {"passed", ch.passed}, {"note", ch.note}});
  return {{"id", r.id}, {"title", r.title}, {"passed", r.passed()}, {"seconds", r.seconds}, {"checks", checks}};
}

int cmd_verify(const Config& c, const std::string& suite) {
  const std::vector<suites::SuiteEntry> entries = suites::suite_group(suite);
  if (entries.empty()) throw Error(ErrorCode::schema, "unknown suite '" + suite + "'");
  SuiteConfig sc;
  sc.T = c.T;
  sc.N = c.N;
  sc.modes = c.modes;
  sc.seed = c.seed;
  std::vector<SuiteResult> results(entries.size());
  for (std::size_t start = 0; start < entries.size(); start += std::size_t(c.jobs)) {
    std::vector<std::future<SuiteResult>> batch;
    const std::size_t stop = std::min(entries.size(), start + std::size_t(c.jobs));
    for (std::size_t k = start; k < stop; ++k)
      batch.push_back(std::async(c.jobs > 1 ? std::launch::async : std::launch::deferred,
                                 [&, k] { return suites::run_timed(entries[k], sc); }));
    for (std::size_t k = start; k < stop; ++k) {
      results[k] = batch[k - start].get();
      suites::print_result(results[k], std::cerr);
    }
  }
  json out = {{"suite", suite}, {"results", json::array()}};
  bool ok = true;
  std::ostringstream csv;
  csv << "suite,check,value,limit,passed\n";
  for (const SuiteResult& r : results) {
    ok = ok && r.passed();
    out["results"].push_back(to_json(r));
    for (const Check& ch : r.checks)
      csv << r.id << ",\"" << ch.name << "\"," << ch.value << ',' << ch.tolerance << ',' << ch.passed << '\n';
  }
  out["passed"] = ok;
  emit(c, out, csv.str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  try {
    cfg = config_from_env();
  } catch (const Error& e) {
    std::cerr << "winhopf: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Wiener-Hopf plus Hankel operators W(a) + H(b) for matching symbol pairs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--T", cfg.T, "grid length of [0, T]");
  app.add_option("--N", cfg.N, "grid nodes (multiple of 8)");
  app.add_option("--modes", cfg.modes, "Laguerre modes");
  app.add_option("--tol", cfg.tol, "relative singular value threshold for numerical nullity");
  app.add_option("--seed", cfg.seed, "seed for test vectors and random corpora");
  app.add_option("--backend", cfg.backend, "discretization")->check(CLI::IsMember({"grid", "laguerre", "both"}));
  app.add_option("--out", cfg.out, "write the report here instead of stdout");
  app.add_option("--format", cfg.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--jobs", cfg.jobs, "suites run concurrently by verify");

  std::string pair_file, symbol_file, rhs, kind = "auto", export_path, matrix_format = "binary",
                                          suite = "acceptance";
  bool nullity = false, matching = false;

  CLI::App* analyze = app.add_subcommand("analyze", "classify the pair and predict kernel/cokernel dimensions");
  analyze->add_option("pair_file", pair_file, "pair JSON {\"a\": symbol, \"b\": symbol}")->required();
  analyze->add_flag("--nullity", nullity, "also measure the nullities numerically");

  CLI::App* factor = app.add_subcommand("factor", "Wiener-Hopf factorization of a symbol");
  factor->add_option("symbol_file", symbol_file, "symbol JSON")->required();
  factor->add_flag("--matching", matching, "normalized form for a matching function g g~ = 1");

  CLI::App* invert = app.add_subcommand("invert", "assemble an inverse and report its residuals");
  invert->add_option("pair_file", pair_file)->required();
  invert->add_option("--kind", kind)->check(CLI::IsMember({"auto", "left", "right", "two_sided", "generalized"}));
  invert->add_option("--export", export_path, "write the assembled matrix (and a .json sidecar)");
  invert->add_option("--matrix-format", matrix_format)->check(CLI::IsMember({"binary", "csv"}));

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve (W(a) + H(b)) x = f");
  solve_cmd->add_option("pair_file", pair_file)->required();
  solve_cmd->add_option("rhs", rhs, "CSV file t,re[,im] or a family psi<k> / gauss:center,width")->required();

  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--suite", suite, "acceptance, closed-form-examples or a single suite id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    validate(cfg);
    if (*analyze) return cmd_analyze(cfg, pair_file, nullity);
    if (*factor) return cmd_factor(cfg, symbol_file, matching);
    if (*invert) return cmd_invert(cfg, pair_file, kind, export_path, matrix_format);
    if (*solve_cmd) return cmd_solve(cfg, pair_file, rhs);
    if (*verify) return cmd_verify(cfg, suite);
  } catch (const Error& e) {
    std::cerr << "winhopf: " << e.what() << '\n';
    return e.code() == ErrorCode::schema ? 2 : 1;
  } catch (const json::exception& e) {
    std::cerr << "winhopf: E_SCHEMA: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
