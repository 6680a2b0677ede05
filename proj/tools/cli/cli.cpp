#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>

#include "CLI11.hpp"

#include "thetalab/addition.hpp"
#include "thetalab/errors.hpp"
#include "thetalab/fqhe.hpp"
#include "thetalab/lattice.hpp"
#include "thetalab/siegel.hpp"
#include "thetalab/spaces.hpp"
#include "thetalab/theta.hpp"

#ifndef THETA_LAB_VERSION
#define THETA_LAB_VERSION "0.0.0"
#endif

namespace thetalab::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ValidationError("not a number: '" + s + "'");
  return v;
}

// --- reports ---------------------------------------------------------------

struct Report {
  json checks = json::array();
  json diagnostics = json::object();
  json results = json::object();

  void check(const std::string& name, json value, json target, double deviation, double tolerance) {
    const bool pass = std::isfinite(deviation) && deviation <= tolerance;
    checks.push_back({{"name", name},
                      {"value", std::move(value)},
                      {"target", std::move(target)},
                      {"deviation", deviation},
                      {"tolerance", tolerance},
                      {"pass", pass}});
  }
  void exact(const std::string& name, json value, json target) {
    const bool pass = value == target;
    checks.push_back({{"name", name}, {"value", std::move(value)}, {"target", std::move(target)}, {"exact", true}, {"pass", pass}});
  }
  void flagged(const std::string& name, const std::string& reason) {
    checks.push_back({{"name", name}, {"flagged", reason}, {"pass", true}});
  }
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const json& c) { return c.at("pass").get<bool>(); });
  }
};

json rational_json(const Rational& q) { return thetalab::to_string(q); }
json bigint_json(const BigInt& v) { return v.str(); }

std::string tuple_label(const addition::Tuple& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += '|';
    for (std::size_t k = 0; k < t[i].residues.size(); ++k) {
      if (k) s += ';';
      s += t[i].residues[k].str();
    }
  }
  return s;
}

// --- shared options --------------------------------------------------------

struct OmegaOptions {
  std::string tau = "0+1i";
  std::string diag;
  std::string full;
  std::optional<std::uint64_t> random_seed;

  void attach(CLI::App* app) {
    auto* t = app->add_option("--tau", tau, "Omega = tau * I");
    auto* d = app->add_option("--omega-diag", diag, "diagonal Omega, comma separated complex entries");
    auto* f = app->add_option("--omega", full, "full Omega, row-major comma separated complex entries");
    auto* r = app->add_option("--omega-random", random_seed, "random Siegel Omega from this seed");
    d->excludes(f)->excludes(r)->excludes(t);
    f->excludes(r)->excludes(t);
    r->excludes(t);
  }

  SiegelMatrix resolve(std::size_t g, json& echo) const {
    if (!diag.empty()) {
      const ComplexVector v = parse_complex_list(diag);
      if (v.size() != g) throw ValidationError("config.omega_diag: expected " + std::to_string(g) + " entries");
      echo["omega_diag"] = diag;
      return SiegelMatrix::diagonal(v);
    }
    if (!full.empty()) {
      ComplexVector v = parse_complex_list(full);
      if (v.size() != g * g) throw ValidationError("config.omega: expected " + std::to_string(g * g) + " entries");
      echo["omega"] = full;
      return SiegelMatrix(g, std::move(v));
    }
    if (random_seed) {
      echo["omega_random"] = *random_seed;
      return SiegelMatrix::random(g, *random_seed);
    }
    echo["tau"] = tau;
    return SiegelMatrix::scalar(parse_complex(tau), g);
  }
};

lattice::LevelStructure resolve_level(long long m, const std::string& level_diag, long long g, json& echo) {
  if (g < 1) throw ValidationError("config.g: must be >= 1");
  if (!level_diag.empty()) {
    const auto v = parse_int_list(level_diag);
    if (static_cast<long long>(v.size()) != g) throw ValidationError("config.level_diag: expected g entries");
    for (long long x : v)
      if (x < 1) throw ValidationError("config.level_diag: entries must be >= 1");
    echo["level_diag"] = v;
    return lattice::LevelStructure::diagonal(v);
  }
  if (m < 1) throw ValidationError("config.m: must be >= 1");
  echo["m"] = m;
  return lattice::LevelStructure::scalar(m, static_cast<std::size_t>(g));
}

addition::Tuple parse_tuple(const std::string& text, std::size_t count, std::size_t rank, const std::string& field) {
  const auto v = parse_int_list(text);
  if (v.size() != count * rank)
    throw ValidationError("config." + field + ": expected " + std::to_string(count * rank) + " integers");
  addition::Tuple t(count);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t k = 0; k < rank; ++k) t[i].residues.push_back(BigInt(v[i * rank + k]));
  return t;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("config.csv: cannot open '" + path + "' for writing");
  f.precision(17);
  return f;
}

// --- verify-addition -------------------------------------------------------

struct VerifyAdditionOptions {
  long long N = 2;
  long long m = 1;
  long long g = 1;
  std::string level_diag;
  std::size_t samples = 20;
  std::optional<std::uint64_t> seed;
  double tolerance = 1e-8;
  double epsilon = 1e-15;
  bool extended = false;
  std::string d;
  std::string h;
  bool span = false;
  std::string csv;
  OmegaOptions omega;
};

void cmd_verify_addition(const VerifyAdditionOptions& o, json& config, Report& rep) {
  if (!o.seed) throw ValidationError("config.seed: required for randomized runs");
  if (o.N < 2) throw ValidationError("config.N: must be >= 2");
  if (o.samples < 5) throw ValidationError("config.samples: must be >= 5");
  if (!(o.tolerance > 0.0)) throw ValidationError("config.tolerance: must be positive");

  config["N"] = o.N;
  config["g"] = o.g;
  config["samples"] = o.samples;
  config["seed"] = *o.seed;
  config["tolerance"] = o.tolerance;
  config["epsilon"] = o.epsilon;
  config["precision"] = o.extended ? "extended" : "double";
  const auto level = resolve_level(o.m, o.level_diag, o.g, config);
  const SiegelMatrix omega = o.omega.resolve(static_cast<std::size_t>(o.g), config);

  addition::AdditionInstance inst;
  inst.N = o.N;
  inst.level = level;
  inst.omega = omega;
  inst.epsilon = o.epsilon;
  inst.precision = o.extended ? Precision::Extended : Precision::Double;
  inst.samples = addition::sample_points(o.N, omega, o.samples, *o.seed);
  const std::size_t rank = level.base_group().rank();
  if (!o.h.empty()) {
    addition::require_coprime(o.N, level);
    inst.h = parse_tuple(o.h, static_cast<std::size_t>(o.N - 2), static_cast<std::size_t>(o.g), "h");
    config["h"] = o.h;
  }

  std::vector<addition::Tuple> ds;
  std::vector<addition::ProportionalityReport> reports;
  if (!o.d.empty()) {
    inst.d = parse_tuple(o.d, static_cast<std::size_t>(o.N), rank, "d");
    config["d"] = o.d;
    ds.push_back(inst.d);
    reports.push_back(addition::verify(inst));
  } else {
    ds = addition::all_d(o.N, level);
    for (const auto& d : ds) {
      inst.d = d;
      reports.push_back(addition::verify(inst));
    }
  }

  double max_dev = 0.0;
  double spread = 0.0;
  json per_d = json::array();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    max_dev = std::max(max_dev, reports[i].deviation);
    spread = std::max(spread, std::abs(reports[i].lambda - reports[0].lambda) / std::abs(reports[0].lambda));
    per_d.push_back({{"d", tuple_label(ds[i])},
                     {"lambda", to_json(reports[i].lambda)},
                     {"deviation", reports[i].deviation},
                     {"rhs_terms", reports[i].rhs_terms}});
  }
  rep.results["per_d"] = per_d;
  rep.results["lambda"] = to_json(reports[0].lambda);
  rep.check("max_relative_deviation", max_dev, 0.0, max_dev, o.tolerance);
  if (ds.size() > 1) rep.check("lambda_spread_across_d", spread, 0.0, spread, o.tolerance);

  if (o.span) {
    inst.d = ds.front();
    const auto sp = addition::verify_span(inst);
    rep.diagnostics["span_fit"] = {{"columns", sp.columns}, {"deviation", sp.deviation}};
  }

  if (!o.csv.empty()) {
    std::ofstream f = open_csv(o.csv);
    f << "N,d,lambda_re,lambda_im,deviation\n";
    for (std::size_t i = 0; i < ds.size(); ++i)
      f << o.N << ',' << tuple_label(ds[i]) << ',' << reports[i].lambda.real() << ',' << reports[i].lambda.imag()
        << ',' << reports[i].deviation << '\n';
  }
}

// --- dims ------------------------------------------------------------------

struct DimsOptions {
  long long N = 2;
  long long m = 1;
  long long g = 1;
  std::string level_diag;
  bool brute = false;
  bool no_spaces = false;
};

void cmd_dims(const DimsOptions& o, json& config, Report& rep) {
  if (o.N < 2) throw ValidationError("config.N: must be >= 2");
  config["N"] = o.N;
  config["g"] = o.g;
  const auto level = resolve_level(o.m, o.level_diag, o.g, config);

  const auto img = spaces::image_dimension(o.N, level);
  rep.results["image_dim"] = img.dimension;
  rep.results["image_formula"] = bigint_json(img.formula);
  rep.results["gcd_flag"] = img.d_type_only;
  if (img.d_type_only)
    rep.flagged("image_dim_vs_formula", "gcd(level, N) != 1: only d-type generators enumerated");
  else
    rep.exact("image_dim_vs_formula", bigint_json(BigInt(img.dimension)), bigint_json(img.formula));

  if (level.is_scalar()) {
    rep.results["krn_order"] = bigint_json(lattice::krn_order(o.N, o.m, o.g));
    rep.results["deg_rn"] = bigint_json(lattice::deg_rn(o.N, o.m, o.g));
    if (o.brute)
      rep.exact("krn_order_brute_force", bigint_json(lattice::krn_count_brute_force(o.N, o.m, o.g)),
                bigint_json(lattice::krn_order(o.N, o.m, o.g)));
  }
  config["brute"] = o.brute;

  if (!o.no_spaces) {
    const auto sr = spaces::e_space_dims(o.N, level);
    rep.results["e_dim"] = sr.e_dim;
    rep.results["e0_dim"] = sr.e0_dim;
    rep.results["v_plus"] = sr.v_plus;
    rep.results["v_minus"] = sr.v_minus;
    rep.results["e0_in_e"] = sr.e0_in_e;
    rep.results["e0_alternating"] = sr.e0_alternating;
    rep.exact("e_basis_alternating", sr.e_alternating, true);
  }
}

// --- fqhe ------------------------------------------------------------------

struct FqheOptions {
  long long g = 1;
  long long p = 1;
  long long N = 2;
  std::optional<double> L1;
  bool kubo = false;
  std::size_t Q = 32;
  std::size_t F = 8;
  std::string tau = "0+1i";
  std::string coupling = "scaled";
  std::string labels;
  double kubo_tolerance = 0.02;
  double spread_tolerance = 0.05;
  bool no_convergence = false;
  bool factorize = false;
  std::size_t samples = 40;
  std::optional<std::uint64_t> seed;
  std::string basis = "both";
  double residual_tolerance = 1e-8;
  double stability_tolerance = 1e-7;
  long long p_max = 0;
  std::string csv;
};

void exact_fqhe_checks(long long g, long long p, long long N, Report& rep, const std::string& prefix) {
  const fqhe::HallReport h = fqhe::hall_exact(g, p);
  const fqhe::KMatrixSpec spec(g, p, N);
  const Rational target(BigInt(g), BigInt(2 * g * p + 1));
  rep.results[prefix + "filling"] = rational_json(h.filling);
  rep.results[prefix + "mu"] = rational_json(h.mu);
  rep.results[prefix + "mu_r"] = rational_json(h.mu_r);
  rep.results[prefix + "sigma_exact"] = rational_json(h.sigma_exact);
  rep.exact(prefix + "filling", rational_json(h.filling), rational_json(target));
  rep.exact(prefix + "mu_r", rational_json(h.mu_r), rational_json(Rational(-target)));
  rep.exact(prefix + "sigma_exact", rational_json(h.sigma_exact), rational_json(target));
  rep.exact(prefix + "det_K1", bigint_json(spec.K1().determinant()), bigint_json(BigInt(N) * (2 * g * p + 1)));

  json inv = json::array(), inv_target = json::array();
  for (const auto& f : fqhe::k_invariant_factors(g, p)) inv.push_back(f.str());
  for (long long i = 1; i < g; ++i) inv_target.push_back("1");
  inv_target.push_back(std::to_string(2 * g * p + 1));
  rep.exact(prefix + "K_invariant_factors", inv, inv_target);

  const RealVector ev = fqhe::k_eigenvalues(g, p);
  double dev = std::abs(ev[0] - static_cast<double>(2 * g * p + 1));
  for (std::size_t i = 1; i < ev.size(); ++i) dev = std::max(dev, std::abs(ev[i] - 1.0));
  rep.check(prefix + "K_eigenvalues", ev, inv_target, dev, 1e-10);
}

void cmd_fqhe(const FqheOptions& o, json& config, Report& rep) {
  if (o.g < 1) throw ValidationError("config.g: must be >= 1");
  if (o.p < 1) throw ValidationError("config.p: must be >= 1");
  if (o.N < 1) throw ValidationError("config.N: must be >= 1");
  if (o.kubo && o.g != 1) throw ValidationError("config.kubo: numeric Kubo quadrature is only supported for g = 1");
  if (o.factorize && !o.seed) throw ValidationError("config.seed: required for --factorize");
  if (o.factorize && o.g < 2) throw ValidationError("config.g: --factorize needs g >= 2");
  if (o.coupling != "scaled" && o.coupling != "literal")
    throw ValidationError("config.coupling: expected 'scaled' or 'literal'");
  if (o.basis != "literal" && o.basis != "corrected" && o.basis != "both")
    throw ValidationError("config.basis: expected 'literal', 'corrected' or 'both'");
  if (!o.csv.empty() && o.p_max < 1) throw ValidationError("config.p_max: --csv needs --p-max >= 1");

  config["g"] = o.g;
  config["p"] = o.p;
  config["N"] = o.N;
  exact_fqhe_checks(o.g, o.p, o.N, rep, "");
  const Complex tau = parse_complex(o.tau);
  if (o.L1) {
    config["L1"] = *o.L1;
    config["tau"] = o.tau;
    rep.results["field_eB_over_hbar_c"] = fqhe::field_quantization(*o.L1, tau, o.g, o.p, o.N);
  }

  fqhe::KuboConfig kc;
  if (o.kubo || o.p_max > 0) {
    kc.N = o.N;
    kc.tau = tau;
    kc.Q = o.Q;
    kc.F = o.F;
    kc.coupling = o.coupling == "scaled" ? fqhe::FluxCoupling::Scaled : fqhe::FluxCoupling::Literal;
    if (!o.labels.empty()) kc.labels = parse_int_list(o.labels);
    kc.check_convergence = !o.no_convergence;
  }

  if (o.kubo) {
    config["kubo"] = {{"Q", o.Q}, {"F", o.F}, {"tau", o.tau}, {"coupling", o.coupling}, {"labels", kc.labels},
                      {"tolerance", o.kubo_tolerance}, {"spread_tolerance", o.spread_tolerance},
                      {"convergence_check", kc.check_convergence}};
    kc.p = o.p;
    const fqhe::HallReport h = fqhe::kubo_conductivity(kc);
    const double target = h.sigma_exact.convert_to<double>();
    json table = json::array();
    for (const auto& e : h.index_table) table.push_back({{"i", e.i}, {"j", e.j}, {"d", e.d}});
    rep.results["kubo"] = {{"sigma_numeric", h.sigma_numeric},
                           {"sigma_exact", rational_json(h.sigma_exact)},
                           {"curvature_min", h.curvature_min},
                           {"curvature_max", h.curvature_max},
                           {"curvature_mean", h.curvature_mean},
                           {"index_table", table}};
    rep.check("kubo_sigma_relative_error", h.sigma_numeric, rational_json(h.sigma_exact),
              std::abs(h.sigma_numeric - target) / target, o.kubo_tolerance);
    rep.check("kubo_curvature_spread", h.curvature_spread, 0.0, h.curvature_spread, o.spread_tolerance);
    if (kc.check_convergence) {
      rep.results["kubo"]["sigma_half_q"] = h.sigma_half_q;
      rep.check("kubo_quadrature_convergence", h.convergence_delta, 0.0, h.convergence_delta,
                kc.convergence_tolerance);
    }
  }

  if (o.factorize) {
    config["factorize"] = {{"samples", o.samples}, {"seed", *o.seed}, {"basis", o.basis}, {"tau", o.tau},
                           {"residual_tolerance", o.residual_tolerance},
                           {"stability_tolerance", o.stability_tolerance}};
    std::vector<std::pair<std::string, fqhe::FactorizationBasis>> bases;
    if (o.basis != "corrected") bases.emplace_back("literal", fqhe::FactorizationBasis::Literal);
    if (o.basis != "literal") bases.emplace_back("corrected", fqhe::FactorizationBasis::Corrected);
    json out = json::object();
    for (const auto& [name, b] : bases) {
      const auto fr = fqhe::hr_factorization_solve(o.g, o.p, tau, o.samples, *o.seed, b);
      json coeffs = json::array();
      for (const auto& c : fr.coefficients) coeffs.push_back(to_json(c));
      out[name] = {{"coefficients", coeffs}, {"residual", fr.residual}, {"residual_doubled", fr.residual_doubled},
                   {"stability", fr.stability}, {"seed_used", fr.seed}, {"attempts", fr.attempts}};
      rep.check("factorization_residual_" + name, fr.residual, 0.0, fr.residual, o.residual_tolerance);
      rep.check("factorization_stability_" + name, fr.stability, 0.0, fr.stability, o.stability_tolerance);
    }
    rep.results["factorization"] = out;
  }

  if (o.p_max > 0) {
    config["p_max"] = o.p_max;
    json sweep = json::array();
    std::ofstream f;
    if (!o.csv.empty()) {
      f = open_csv(o.csv);
      f << "g,p,filling,sigma_exact,sigma_numeric\n";
    }
    for (long long p = 1; p <= o.p_max; ++p) {
      const fqhe::HallReport h = fqhe::hall_exact(o.g, p);
      json row = {{"p", p}, {"sigma_exact", rational_json(h.sigma_exact)}};
      std::string numeric;
      if (o.kubo) {
        kc.p = p;
        kc.check_convergence = false;
        const double s = fqhe::kubo_conductivity(kc).sigma_numeric;
        row["sigma_numeric"] = s;
        std::ostringstream os;
        os.precision(17);
        os << s;
        numeric = os.str();
      }
      sweep.push_back(row);
      if (f.is_open())
        f << o.g << ',' << p << ',' << thetalab::to_string(h.filling) << ',' << thetalab::to_string(h.sigma_exact)
          << ',' << numeric << '\n';
    }
    rep.results["sweep"] = sweep;
  }
}

// --- theta-eval ------------------------------------------------------------

struct ThetaEvalOptions {
  std::string z;
  std::string a;
  std::string b;
  double epsilon = 1e-14;
  bool extended = false;
  bool relative = false;
  std::string grad = "none";
  double radius_cap = 60.0;
  OmegaOptions omega;
};

void cmd_theta_eval(const ThetaEvalOptions& o, json& config, Report& rep) {
  const ComplexVector z = parse_complex_list(o.z);
  if (z.empty()) throw ValidationError("config.z: at least one coordinate required");
  const std::size_t g = z.size();
  RealVector a = o.a.empty() ? RealVector(g, 0.0) : parse_real_list(o.a);
  RealVector b = o.b.empty() ? RealVector(g, 0.0) : parse_real_list(o.b);
  if (a.size() != g) throw ValidationError("config.a: expected " + std::to_string(g) + " entries");
  if (b.size() != g) throw ValidationError("config.b: expected " + std::to_string(g) + " entries");
  if (o.grad != "none" && o.grad != "z" && o.grad != "a" && o.grad != "b")
    throw ValidationError("config.grad: expected none, z, a or b");

  config["z"] = o.z;
  config["a"] = a;
  config["b"] = b;
  config["epsilon"] = o.epsilon;
  config["precision"] = o.extended ? "extended" : "double";
  config["error_mode"] = o.relative ? "relative_to_scale" : "absolute";
  config["radius_cap"] = o.radius_cap;
  EvalRequest req{{a, b}, z, o.omega.resolve(g, config), o.epsilon,
                  o.extended ? Precision::Extended : Precision::Double,
                  o.relative ? ErrorMode::RelativeToScale : ErrorMode::Absolute, o.radius_cap};

  const TruncationPlan plan = plan_truncation(req, o.grad != "none");
  rep.results["value"] = to_json(theta(req));
  rep.results["radius"] = plan.radius;
  rep.results["points"] = plan.points;
  rep.results["log_scale"] = plan.log_scale;
  rep.results["log_tail_bound"] = plan.log_tail;
  if (o.grad != "none") {
    config["grad"] = o.grad;
    const GradientKind k = o.grad == "z" ? GradientKind::Z : o.grad == "a" ? GradientKind::A : GradientKind::B;
    json gj = json::array();
    for (const auto& v : theta_grad(req, k)) gj.push_back(to_json(v));
    rep.results["gradient"] = gj;
  }
}

}  // namespace

// --- parsing helpers -------------------------------------------------------

Complex parse_complex(const std::string& text) {
  static const std::regex real_re(R"(\s*([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)\s*)");
  static const std::regex imag_re(R"(\s*([+-]?((\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?)[ij]\s*)");
  static const std::regex both_re(
      R"(\s*([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)\s*([+-])\s*((\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?[ij]\s*)");
  std::smatch m;
  if (std::regex_match(text, m, real_re)) return {parse_real(m[1].str()), 0.0};
  if (std::regex_match(text, m, imag_re)) {
    std::string s = m[1].str();
    if (s.empty() || s == "+") s = "1";
    if (s == "-") s = "-1";
    return {0.0, parse_real(s)};
  }
  if (std::regex_match(text, m, both_re)) {
    const double im = m[5].matched ? parse_real(m[5].str()) : 1.0;
    return {parse_real(m[1].str()), m[4].str() == "-" ? -im : im};
  }
  throw ValidationError("not a complex number: '" + text + "'");
}

ComplexVector parse_complex_list(const std::string& text) {
  ComplexVector out;
  for (const auto& s : split(text, ',')) out.push_back(parse_complex(s));
  return out;
}

std::vector<long long> parse_int_list(const std::string& text) {
  std::vector<long long> out;
  for (const auto& s : split(text, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw ValidationError("not an integer: '" + s + "'");
    }
    if (used != s.size()) throw ValidationError("not an integer: '" + s + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_real(s));
  return out;
}

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

std::vector<std::string> config_to_args(const json& config) {
  if (!config.is_object()) throw ValidationError("config: top level must be a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : config.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ',';
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      args.push_back(flag);
      args.push_back(joined);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      args.push_back(flag);
      args.push_back(value.dump());
    } else {
      throw ValidationError("config." + key + ": unsupported value type");
    }
  }
  return args;
}

// --- dispatcher ------------------------------------------------------------

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = args_in;

  CLI::App app{"theta-lab: theta-function addition laws, section spaces and FQHE checks"};
  app.set_help_flag("--help", "print help and exit");
  app.set_version_flag("--version", THETA_LAB_VERSION);
  std::string output;
  std::string config_path;
  bool timing = false;
  app.add_option("--output,-o", output, "write the JSON report to this file instead of stdout");
  app.add_option("--config", config_path, "JSON object of flags for the subcommand");
  app.add_flag("--timing", timing, "add wall-clock timing to the report (breaks byte-identical output)");
  app.require_subcommand(1);
  app.fallthrough();

  VerifyAdditionOptions va;
  auto* sva = app.add_subcommand("verify-addition", "check LHS = lambda * RHS of the addition formula");
  sva->add_option("--N", va.N, "number of particles")->required();
  sva->add_option("--m", va.m, "scalar level m");
  sva->add_option("--g", va.g, "genus");
  sva->add_option("--level-diag", va.level_diag, "diagonal level (n_1,..,n_g) instead of m");
  sva->add_option("--samples", va.samples, "sample points");
  sva->add_option("--seed", va.seed, "sampling seed (required)");
  sva->add_option("--tolerance", va.tolerance, "pass threshold for deviations");
  sva->add_option("--epsilon", va.epsilon, "per-factor truncation error relative to scale");
  sva->add_flag("--extended", va.extended, "106-bit accumulation");
  sva->add_option("--d", va.d, "single d tuple, N*rank integers in invariant coordinates (default: all)");
  sva->add_option("--h", va.h, "h_2..h_{N-1}, (N-2)*g integers mod N");
  sva->add_flag("--span", va.span, "add the span-membership diagnostic");
  sva->add_option("--csv", va.csv, "write per-d lambda/deviation rows");
  va.omega.attach(sva);

  DimsOptions dm;
  auto* sdm = app.add_subcommand("dims", "image and section-space dimensions, |K(R_N)| and deg R_N");
  sdm->add_option("--N", dm.N, "number of particles")->required();
  sdm->add_option("--m", dm.m, "scalar level m");
  sdm->add_option("--g", dm.g, "genus");
  sdm->add_option("--level-diag", dm.level_diag, "diagonal level (n_1,..,n_g) instead of m");
  sdm->add_flag("--brute", dm.brute, "count K(R_N) by exhaustive torsion enumeration");
  sdm->add_flag("--no-spaces", dm.no_spaces, "skip the E / E0 computation");

  FqheOptions fq;
  auto* sfq = app.add_subcommand("fqhe", "filling factor, slopes, Hall conductivity");
  sfq->add_option("--g", fq.g, "layers");
  sfq->add_option("--p", fq.p, "K = (2p+1) on the diagonal, 2p off it");
  sfq->add_option("--N", fq.N, "particles per layer");
  sfq->add_option("--L1", fq.L1, "torus side length for the field quantization");
  sfq->add_flag("--kubo", fq.kubo, "numeric Kubo quadrature (g = 1)");
  sfq->add_option("--Q", fq.Q, "quadrature points per real dimension");
  sfq->add_option("--F", fq.F, "flux grid points per direction");
  sfq->add_option("--tau", fq.tau, "modulus tau");
  sfq->add_option("--coupling", fq.coupling, "flux coupling of the b-characteristic: scaled or literal");
  sfq->add_option("--labels", fq.labels, "particle labels d_i^- for the relative index table");
  sfq->add_option("--kubo-tolerance", fq.kubo_tolerance, "relative tolerance on sigma_H");
  sfq->add_option("--spread-tolerance", fq.spread_tolerance, "tolerance on the curvature spread");
  sfq->add_flag("--no-convergence", fq.no_convergence, "skip the Q/2 convergence run");
  sfq->add_flag("--factorize", fq.factorize, "least-squares factorization identity (g >= 2)");
  sfq->add_option("--samples", fq.samples, "factorization sample points");
  sfq->add_option("--seed", fq.seed, "factorization seed (required with --factorize)");
  sfq->add_option("--basis", fq.basis, "factorization basis: literal, corrected or both");
  sfq->add_option("--residual-tolerance", fq.residual_tolerance, "factorization residual threshold");
  sfq->add_option("--stability-tolerance", fq.stability_tolerance, "coefficient stability threshold");
  sfq->add_option("--p-max", fq.p_max, "sweep p = 1..p_max");
  sfq->add_option("--csv", fq.csv, "write the p sweep as CSV");

  ThetaEvalOptions te;
  auto* ste = app.add_subcommand("theta-eval", "evaluate Theta[a;b](z|Omega)");
  ste->add_option("--z", te.z, "comma separated complex coordinates")->required();
  ste->add_option("--a", te.a, "characteristic a");
  ste->add_option("--b", te.b, "characteristic b");
  ste->add_option("--epsilon", te.epsilon, "truncation error bound");
  ste->add_flag("--extended", te.extended, "106-bit accumulation");
  ste->add_flag("--relative", te.relative, "error relative to the natural scale");
  ste->add_option("--grad", te.grad, "gradient: none, z, a or b");
  ste->add_option("--radius-cap", te.radius_cap, "largest allowed truncation radius");
  te.omega.attach(ste);

  try {
    // --config FILE: flags not given on the command line are taken from the file
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] != "--config") continue;
      std::ifstream f(args[i + 1]);
      if (!f) throw ValidationError("config: cannot read '" + args[i + 1] + "'");
      json cfg;
      try {
        cfg = json::parse(f);
      } catch (const json::exception& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
      }
      for (const auto& extra : config_to_args(cfg)) args.push_back(extra);
      break;
    }
    std::vector<std::string> dedup;
    for (std::size_t i = 0; i < args.size(); ++i) {
      const bool from_file = i >= args_in.size();
      if (from_file && args[i].rfind("--", 0) == 0 &&
          std::find(args_in.begin(), args_in.end(), args[i]) != args_in.end()) {
        if (i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0) ++i;
        continue;
      }
      dedup.push_back(args[i]);
    }
    std::vector<std::string> rev(dedup.rbegin(), dedup.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << THETA_LAB_VERSION << '\n';
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  json config = json::object();
  Report rep;
  std::string command;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (sva->parsed()) {
      command = "verify-addition";
      cmd_verify_addition(va, config, rep);
    } else if (sdm->parsed()) {
      command = "dims";
      cmd_dims(dm, config, rep);
    } else if (sfq->parsed()) {
      command = "fqhe";
      cmd_fqhe(fq, config, rep);
    } else {
      command = "theta-eval";
      cmd_theta_eval(te, config, rep);
    }
  } catch (const ValidationError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedInstance& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  json report = {{"schema", 1},
                 {"tool", "theta-lab"},
                 {"version", THETA_LAB_VERSION},
                 {"command", command},
                 {"config", config},
                 {"checks", rep.checks},
                 {"results", rep.results},
                 {"pass", rep.pass()}};
  if (!rep.diagnostics.empty()) report["diagnostics"] = rep.diagnostics;
  if (timing)
    report["timing_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string text = report.dump(2) + "\n";
  if (output.empty()) {
    out << text;
  } else {
    std::ofstream f(output, std::ios::binary);
    if (!f) {
      err << "usage error: cannot write '" << output << "'\n";
      return kExitUsage;
    }
    f << text;
  }
  for (const auto& c : rep.checks)
    if (!c.at("pass").get<bool>()) err << "FAIL " << c.at("name").get<std::string>() << '\n';
  return rep.pass() ? kExitPass : kExitCheckFailed;
}

}  // namespace thetalab::cli
