#include "hambubble/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hambubble/cache.hpp"
#include "hambubble/constants.hpp"
#include "hambubble/errors.hpp"
#include "hambubble/geometry.hpp"
#include "hambubble/halfspace.hpp"
#include "hambubble/reduced_energy.hpp"
#include "hambubble/verify.hpp"
#include "hambubble/version.hpp"
#include "json.hpp"

namespace hambubble::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- parsing helpers -------------------------------------------------------

double parse_real(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw DomainError(what + ": '" + s + "' is not a number");
  return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& what, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(parse_real(item, what));
  if (out.empty()) throw DomainError(what + ": empty list");
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json to_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_std(m.row(i).transpose()));
  return rows;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw DomainError(path + " is not valid JSON");
  return j;
}

std::vector<Eigen::VectorXd> read_points(const std::string& path) {
  const json j = read_json_file(path);
  std::vector<Eigen::VectorXd> pts;
  try {
    for (const auto& p : j) pts.push_back(to_vector(p.get<std::vector<double>>()));
  } catch (const json::exception& e) {
    throw DomainError(path + ": expected an array of points: " + e.what());
  }
  return pts;
}

// ---- JSON views of library results ----------------------------------------

json pair_json(const ExponentPair& p) {
  return {{"N", p.N},
          {"p", p.p},
          {"q", p.q},
          {"criticality", to_string(p.criticality)},
          {"hyperbola_residual", p.hyperbola_residual},
          {"swapped", p.swapped},
          {"admissible", p.admissible}};
}

json order_json(const ExpansionOrder& o) {
  return {{"leading_u", o.leading_u},
          {"leading_v", o.leading_v},
          {"remainder_u", o.remainder_u},
          {"remainder_v", o.remainder_v},
          {"pointwise_u", o.pointwise_u},
          {"pointwise_v", o.pointwise_v},
          {"derivative_remainder_u", o.derivative_remainder_u},
          {"derivative_remainder_v", o.derivative_remainder_v},
          {"sigma", o.sigma},
          {"tau", o.tau},
          {"sigma_hat", o.sigma_hat},
          {"tau_hat", o.tau_hat}};
}

json tail_json(const TailCoefficients& t) {
  return {{"a", t.a},
          {"b", t.b},
          {"gamma", t.gamma},
          {"regime", to_string(t.regime)},
          {"kU", t.kU},
          {"kV", t.kV},
          {"fit_window", {t.fit_lo, t.fit_hi}},
          {"fit_variation", t.fit_variation},
          {"fitted_kU", t.fitted_kU},
          {"fitted_kV", t.fitted_kV}};
}

json energy_json(const EnergyConstants& e) {
  return {{"S_pow", e.S_pow},
          {"S_pow_V", e.S_pow_V},
          {"C1", e.C1},
          {"C2", e.C2},
          {"C3", e.C3},
          {"C4", e.C4},
          {"C5", e.C5},
          {"C6", e.C6},
          {"c1", e.c1},
          {"c2", e.c2},
          {"c3", e.c3},
          {"c4", e.c4},
          {"lambda_used", e.lambda_used},
          {"identity_residual", e.identity_residual},
          {"quadrature",
           {{"method", e.quadrature.method},
            {"tail_mode", e.quadrature.tail_mode},
            {"rel_tol", e.quadrature.rel_tol},
            {"sigma_Nm2", e.quadrature.sigma_Nm2},
            {"sigma_Nm1", e.quadrature.sigma_Nm1}}}};
}

json curvature_json(const CurvatureReport& r) {
  json j = {{"H", r.H}, {"kappa", to_std(r.kappa)}, {"rho", to_std(r.rho)}, {"frame", to_rows(r.frame)}};
  if (r.tangent_grad_H.size() > 0) {
    j["tangent_grad_H"] = to_std(r.tangent_grad_H);
    j["tangent_hess_H"] = to_rows(r.tangent_hess_H);
    j["nondegenerate"] = r.nondegenerate;
  }
  return j;
}

json critical_json(const CriticalPoint& c) {
  return {{"x", to_std(c.point.x)},
          {"nu", to_std(c.point.nu)},
          {"component", c.point.component},
          {"H_sign", c.report.H < 0.0 ? -1 : (c.report.H > 0.0 ? 1 : 0)},
          {"minimum", c.minimum},
          {"curvature", curvature_json(c.report)}};
}

json regime_json(const RegimeVariant& r) {
  return {{"sign_q", r.sign_q},
          {"sign_p", r.sign_p},
          {"c2_factor", r.c2_factor},
          {"c2_sign", r.c2_sign},
          {"admissible_H_sign", r.admissible_H_sign},
          {"degenerate", r.degenerate}};
}

// ---- commands ---------------------------------------------------------------

struct Output {
  json inputs = json::object();
  json results = json::object();
  json diagnostics = json::object();
  int status = 0;
  std::optional<std::string> raw;  // non-JSON payload (CSV)
};

double default_q(int N, double p, const std::optional<double>& q) { return q ? *q : q_from_p(N, p); }

Output cmd_hyperbola(int N, double p, std::optional<double> q_in) {
  Output o;
  o.inputs = {{"N", N}, {"p", p}};
  if (q_in) o.inputs["q"] = *q_in;
  const double q = default_q(N, p, q_in);
  const ExponentPair pair = classify(N, p, q);
  json& r = o.results;
  r = pair_json(pair);
  if (!pair.admissible) {
    o.diagnostics["rejection"] = pair.rejection;
    return o;
  }
  const DecayExponent d = decay_exponent(pair);
  r["regime"] = to_string(d.regime);
  r["gamma"] = d.gamma ? json(*d.gamma) : json(nullptr);
  r["gamma2_lhs"] = d.gamma2_lhs;
  r["gamma2_branch"] = d.gamma2_branch;
  const ScalingExponents se = scaling_exponents(pair);
  r["scaling"] = {{"a", se.a}, {"b", se.b}};
  r["threshold_q"] = threshold_q(N);
  std::string violated;
  r["hypotheses_ok"] = theorem_hypotheses(pair, &violated);
  r["violated_hypothesis"] = violated;
  if (pair.is_critical() && d.gamma) {
    const RemainderLedger L = remainder_ledger(pair);
    r["sigma"] = L.sigma;
    r["ledger"] = {{"E_uv", L.E_uv},   {"E_pq", L.E_pq},   {"E_qp", L.E_qp},         {"e_phi", L.e_phi},
                   {"e_V", L.e_V},     {"capped_min", L.capped_min}, {"sigma", L.sigma}, {"s1_log", L.s1_log},
                   {"s2_log", L.s2_log}};
    r["expansion_order"] = order_json(expansion_order(pair));
  }
  json table = json::array();
  if (pair.p > 1.0 && pair.q > 1.0) {
    for (int sq : {-1, 1})
      for (int sp : {-1, 1}) table.push_back(regime_json(regime_sign(sq, sp, pair.p, pair.q)));
  }
  r["regime_table"] = table;
  return o;
}

BubbleSolution load_bubble(const std::string& path, Output& o) {
  o.inputs["bubble"] = fs::path(path).filename().string();
  return read_bubble_file(path);
}

Output cmd_bubble_solve(const RunConfig& cfg, int N, double p, std::optional<double> q_in, std::optional<double> tol_in,
                        double r_max, const std::string& out_file, bool no_cache) {
  Output o;
  const double q = default_q(N, p, q_in);
  const double tol = tol_in.value_or(cfg.ode_tol);
  o.inputs = {{"N", N}, {"p", p}, {"q", q}, {"tol", tol}, {"r_max", r_max}};
  const ExponentPair pair = critical_pair(N, p, q);
  BubbleSolution sol;
  json cache = {{"key", cache_key(pair.N, pair.p, pair.q, tol, r_max)}};
  if (!no_cache && !cfg.cache_dir.empty()) {
    CachedBubble cb = cached_ground_state(cfg.cache_dir, pair, tol, r_max);
    sol = std::move(cb.sol);
    cache["hit"] = cb.hit;
    if (!cb.warnings.empty()) o.diagnostics["warnings"] = cb.warnings;
  } else {
    sol = solve_ground_state(pair, tol, r_max);
    cache["hit"] = false;
  }
  if (!out_file.empty()) {
    write_bubble_file(out_file, sol);
    o.inputs["out"] = fs::path(out_file).filename().string();
  }
  o.results = {{"pair", pair_json(sol.pair)},
               {"beta_star", sol.beta_star},
               {"tail", tail_json(sol.tail)},
               {"ode_residual", sol.ode_residual},
               {"grid_size", sol.profile.size()},
               {"dichotomy_ok", sol.meta.dichotomy_ok},
               {"cache", cache}};
  o.diagnostics["solver"] = {{"rtol", sol.meta.rtol},
                             {"r_start", sol.meta.r_start},
                             {"steps", sol.meta.steps},
                             {"bracket", {sol.meta.bracket_lo, sol.meta.bracket_hi}},
                             {"trace_length", sol.meta.trace.size()}};
  return o;
}

Output cmd_bubble_show(const std::string& file) {
  Output o;
  const BubbleSolution sol = load_bubble(file, o);
  const LogDerivativeLimits ld = log_derivative_check(sol);
  o.results = {{"pair", pair_json(sol.pair)},
               {"beta_star", sol.beta_star},
               {"tail", tail_json(sol.tail)},
               {"ode_residual", sol.ode_residual},
               {"r_max", sol.profile.r_max()},
               {"log_derivative",
                {{"limit_U", ld.limU},
                 {"limit_V", ld.limV},
                 {"expected_U", ld.expectedU},
                 {"expected_V", ld.expectedV},
                 {"nominal_value", ld.nominal},
                 {"consistent", ld.consistent}}}};
  return o;
}

Output cmd_constants(const RunConfig& cfg, const std::string& file, std::optional<double> lambda) {
  Output o;
  const BubbleSolution sol = load_bubble(file, o);
  if (lambda) o.inputs["lambda"] = *lambda;
  const EnergyConstants ec = energy_constants(sol, lambda, cfg.quad_rel_tol);
  o.results = energy_json(ec);
  const auto [lo, hi] = lambda_window(sol.pair);
  o.results["lambda_window"] = {lo, hi};
  return o;
}

Output cmd_verify(const RunConfig& cfg, const std::string& file) {
  Output o;
  const BubbleSolution sol = load_bubble(file, o);
  VerifyOptions vo;
  vo.quad_rel_tol = cfg.quad_rel_tol;
  const VerificationReport rep = verify_bubble(sol, vo);
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back(
        {{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}, {"detail", c.detail}});
  }
  o.results = {{"checks", checks}, {"pass", rep.pass}};
  o.status = rep.pass ? 0 : 3;
  return o;
}

Output cmd_corrector(const std::string& file, const std::string& rho_s, const std::string& kind_s,
                     const std::string& probes_file, int order, int refine) {
  Output o;
  const BubbleSolution sol = load_bubble(file, o);
  const int N = sol.pair.N;
  QuadricBoundaryData rho;
  rho.rho = to_vector(parse_list(rho_s, "--rho"));
  if (kind_s != "phi0" && kind_s != "psi0") throw DomainError("--kind must be phi0 or psi0");
  const CorrectorKind kind = kind_s == "phi0" ? CorrectorKind::phi0 : CorrectorKind::psi0;
  o.inputs["rho"] = to_std(rho.rho);
  o.inputs["kind"] = kind_s;
  o.inputs["order"] = order;
  o.inputs["refine"] = refine;
  const CorrectorField field(sol, rho, kind, {order, refine});
  std::vector<Eigen::VectorXd> probes;
  if (!probes_file.empty()) {
    probes = read_points(probes_file);
    o.inputs["probes"] = fs::path(probes_file).filename().string();
  }
  json values = json::array();
  std::vector<Eigen::VectorXd> boundary;
  for (const auto& pr : probes) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    if (pr.size() == N - 1) {
      x.head(N - 1) = pr;
    } else if (pr.size() == N) {
      x = pr;
    } else {
      throw DomainError("probe has neither N-1 nor N coordinates");
    }
    values.push_back({{"x", to_std(x)}, {"value", field(x)}});
    if (x[N - 1] == 0.0 && x.head(N - 1).norm() >= 0.1) boundary.push_back(x.head(N - 1));
  }
  const DecayFit fit = decay_fit(field);
  o.results = {{"values", values},
               {"neumann_residual", boundary.empty() ? json(nullptr) : json(neumann_residual(field, boundary))},
               {"decay_slope",
                {{"slope", fit.slope},
                 {"raw_slope", fit.raw_slope},
                 {"expected", fit.expected},
                 {"window", {fit.r_lo, fit.r_hi}},
                 {"inconclusive", fit.inconclusive}}},
               {"order_flags", order_json(expansion_order(sol.pair))}};
  if (!field.warnings().empty()) o.diagnostics["warnings"] = field.warnings();
  return o;
}

BoundarySurface load_surface(const std::string& file, Output& o) {
  const json spec = read_json_file(file);
  o.inputs["surface"] = spec;
  return surface_from_json(spec);
}

Eigen::VectorXd on_surface(const BoundarySurface& s, const Eigen::VectorXd& x, double tol) {
  if (x.size() != s.dimension()) throw DomainError("--point has the wrong dimension");
  const std::size_t i = s.nearest_component(x);
  const double d = std::abs(s.value(i, x)) / s.gradient(i, x).norm();
  if (d > tol) throw GeometryError("--point is not on the surface (distance " + std::to_string(d) + ")");
  return project_to_surface(s, x).x;
}

Output cmd_geometry_curvature(const RunConfig& cfg, const std::string& file, const std::string& point) {
  Output o;
  const BoundarySurface s = load_surface(file, o);
  const Eigen::VectorXd x0 = to_vector(parse_list(point, "--point"));
  o.inputs["point"] = to_std(x0);
  const Eigen::VectorXd x = on_surface(s, x0, cfg.geometry_tol);
  const CurvatureReport r = mean_curvature(s, x);
  o.results = curvature_json(r);
  o.results["x"] = to_std(x);
  o.results["H_sign"] = r.H < 0.0 ? -1 : (r.H > 0.0 ? 1 : 0);
  o.results["derivative_consistency"] = s.derivative_consistency(x);
  return o;
}

Output cmd_geometry_critical(const std::string& file, const std::string& seeds_file) {
  Output o;
  const BoundarySurface s = load_surface(file, o);
  std::vector<Eigen::VectorXd> seeds;
  if (!seeds_file.empty()) {
    seeds = read_points(seeds_file);
    o.inputs["seeds"] = fs::path(seeds_file).filename().string();
  }
  const CriticalSearch cs = find_critical_points(s, seeds);
  json pts = json::array();
  for (const auto& c : cs.points) pts.push_back(critical_json(c));
  o.results = {{"points", pts}, {"count", cs.points.size()}};
  o.diagnostics = {{"seeds", cs.seeds}, {"runs", cs.runs}, {"converged", cs.converged}, {"messages", cs.diagnostics}};
  return o;
}

ReducedConstants reduced_from(const BubbleSolution& sol, const RunConfig& cfg, std::optional<double> lambda) {
  const EnergyConstants ec = energy_constants(sol, lambda, cfg.quad_rel_tol);
  return reduced_constants(ec, sol.pair, ec.lambda_used);
}

Output cmd_predict(const RunConfig& cfg, const std::string& surface, const std::string& bubble,
                   const std::string& eps_s, std::optional<double> lambda, double mu, std::optional<std::size_t> select) {
  Output o;
  const BoundarySurface s = load_surface(surface, o);
  const BubbleSolution sol = load_bubble(bubble, o);
  const std::vector<double> eps = parse_list(eps_s, "--eps");
  o.inputs["eps"] = eps;
  o.inputs["mu"] = mu;
  if (lambda) o.inputs["lambda"] = *lambda;
  if (select) o.inputs["select"] = *select;
  std::string violated;
  if (!theorem_hypotheses(sol.pair, &violated)) throw RefusalError("predict: theorem hypothesis violated: " + violated);
  const ReducedConstants rc = reduced_from(sol, cfg, lambda);
  PredictOptions po;
  po.mu = mu;
  po.select = select;
  const BlowupPrediction p = predict_blowup(s, rc, sol.pair, eps, po);
  json deltas = json::array();
  for (const auto& [e, d] : p.delta_samples) deltas.push_back({{"eps", e}, {"delta", d}});
  json cands = json::array();
  for (const auto& c : p.candidates) cands.push_back(critical_json(c));
  o.results = {{"xi0", critical_json(p.xi0)},
               {"H0", p.H0},
               {"d0", p.d0},
               {"theta_at_d0", p.theta_at_d0},
               {"theta_dd", p.theta_dd},
               {"delta_samples", deltas},
               {"regime", regime_json(p.regime)},
               {"mu", p.mu},
               {"hypotheses",
                {{"ok", p.hypotheses.ok},
                 {"violated", p.hypotheses.violated},
                 {"threshold_q", p.hypotheses.threshold_q},
                 {"sigma", p.hypotheses.sigma}}},
               {"constants", {{"c1", rc.c1}, {"c2", rc.c2}, {"c3", rc.c3}, {"c4", rc.c4}, {"lambda", rc.lambda}}},
               {"candidates", cands}};
  o.diagnostics["notes"] = p.notes;
  return o;
}

Output cmd_landscape(const RunConfig& cfg, const std::string& surface, const std::string& bubble,
                     const std::string& drange, const std::string& chart, std::optional<double> lambda) {
  Output o;
  const BoundarySurface s = load_surface(surface, o);
  const BubbleSolution sol = load_bubble(bubble, o);
  const std::vector<double> dr = parse_list(drange, "--d-range", ':');
  if (dr.size() != 3 || dr[2] != std::floor(dr[2])) throw DomainError("--d-range must be lo:hi:n");
  std::vector<std::string> parts;
  {
    std::stringstream ss(chart);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
  }
  if (parts.size() != 3) throw DomainError("--chart must be x1,...,xN:half_width:n");
  const Eigen::VectorXd center = to_vector(parse_list(parts[0], "--chart"));
  if (center.size() != s.dimension()) throw DomainError("--chart center has the wrong dimension");
  const double half = parse_real(parts[1], "--chart");
  const double n = parse_real(parts[2], "--chart");
  if (n != std::floor(n)) throw DomainError("--chart node count must be an integer");
  const ReducedConstants rc = reduced_from(sol, cfg, lambda);
  const ThetaLandscape L = landscape(s, rc, center, half, static_cast<int>(n), dr[0], dr[1], static_cast<int>(dr[2]));
  std::ostringstream csv;
  write_landscape_csv(L, csv);
  o.raw = csv.str();
  return o;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const RefusalError*>(&e)) return 4;
  if (dynamic_cast<const AccuracyError*>(&e)) return 3;
  if (dynamic_cast<const DomainError*>(&e)) return 2;
  return 3;
}

const char* error_kind(int code) {
  switch (code) {
    case 2: return "domain";
    case 3: return "accuracy";
    case 4: return "refusal";
    default: return "error";
  }
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (!(cfg.ode_tol >= 1e-14 && cfg.ode_tol <= 1e-6)) throw DomainError("config: ode_tol must lie in [1e-14, 1e-6]");
  if (!(cfg.quad_rel_tol >= 1e-14 && cfg.quad_rel_tol <= 1e-6)) {
    throw DomainError("config: quad_rel_tol must lie in [1e-14, 1e-6]");
  }
  if (!(cfg.geometry_tol > 0.0 && cfg.geometry_tol <= 1e-2)) {
    throw DomainError("config: geometry_tol must lie in (0, 1e-2]");
  }
  if (cfg.format != "json" && cfg.format != "csv") throw DomainError("config: format must be json or csv");
  if (cfg.verbosity < 0) throw DomainError("config: verbosity must be non-negative");
}

RunConfig load_config(const fs::path& file, RunConfig cfg) {
  std::ifstream in(file);
  if (!in) throw DomainError("cannot open config file " + file.string());
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "cache_dir") cfg.cache_dir = value;
    else if (key == "ode_tol") cfg.ode_tol = parse_real(value, key);
    else if (key == "quad_rel_tol") cfg.quad_rel_tol = parse_real(value, key);
    else if (key == "geometry_tol") cfg.geometry_tol = parse_real(value, key);
    else if (key == "format") cfg.format = value;
    else if (key == "verbosity") cfg.verbosity = static_cast<int>(parse_real(value, key));
    else throw DomainError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  validate(cfg);
  return cfg;
}

RunConfig apply_environment(RunConfig cfg) {
  if (const char* dir = std::getenv("HAMBUBBLE_CACHE_DIR"); dir && *dir) cfg.cache_dir = dir;
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical Hamiltonian Lane-Emden bubbles, boundary correctors and blow-up prediction", "hambubble"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_file;
  std::string cache_dir;
  std::optional<double> ode_tol;
  std::optional<double> quad_rel_tol;
  app.add_option("--config", config_file, "key=value configuration file");
  app.add_option("--cache-dir", cache_dir, "bubble cache directory");
  app.add_option("--ode-tol", ode_tol, "default shooting tolerance");
  app.add_option("--quad-rel-tol", quad_rel_tol, "relative quadrature tolerance");

  int N = 0;
  double p = 0.0;
  std::optional<double> q;
  std::optional<double> tol;
  double r_max = kDefaultRMax;
  std::string out_file, bubble, surface, point, seeds, rho, kind = "phi0", probes, eps, drange, chart;
  std::optional<double> lambda;
  double mu = 1.0;
  std::optional<std::size_t> select;
  bool no_cache = false;
  int order = 12;
  int refine = 1;

  auto* hyp = app.add_subcommand("hyperbola", "classify an exponent pair and report the exponent ledger");
  hyp->add_option("--N", N, "dimension")->required();
  hyp->add_option("--p", p, "exponent p")->required();
  hyp->add_option("--q", q, "exponent q (default: the critical partner of p)");

  auto* bub = app.add_subcommand("bubble", "solve or inspect a ground state");
  bub->require_subcommand(1);
  auto* solve = bub->add_subcommand("solve", "shoot for the ground state");
  solve->add_option("--N", N, "dimension")->required();
  solve->add_option("--p", p, "exponent p")->required();
  solve->add_option("--q", q, "exponent q (default: the critical partner of p)");
  solve->add_option("--tol", tol, "shooting tolerance");
  solve->add_option("--rmax", r_max, "outer radius of the stored profile");
  solve->add_option("--out", out_file, "bubble file to write");
  solve->add_flag("--no-cache", no_cache, "bypass the cache");
  auto* show = bub->add_subcommand("show", "tail diagnostics of a bubble file");
  show->add_option("file", bubble, "bubble file")->required();

  auto* cons = app.add_subcommand("constants", "energy-expansion constants");
  cons->add_option("--bubble", bubble, "bubble file")->required();
  cons->add_option("--lambda", lambda, "splitting parameter for c4");

  auto* ver = app.add_subcommand("verify", "identity, positivity and oracle checks");
  ver->add_option("--bubble", bubble, "bubble file")->required();

  auto* cor = app.add_subcommand("corrector", "half-space boundary corrector");
  cor->add_option("--bubble", bubble, "bubble file")->required();
  cor->add_option("--rho", rho, "rho_1,...,rho_{N-1}")->required();
  cor->add_option("--kind", kind, "phi0 or psi0");
  cor->add_option("--probes", probes, "JSON array of points (N-1 coordinates: boundary)");
  cor->add_option("--order", order, "Gauss-Legendre points per panel");
  cor->add_option("--refine", refine, "panel subdivisions");

  auto* geo = app.add_subcommand("geometry", "boundary curvature");
  geo->require_subcommand(1);
  auto* curv = geo->add_subcommand("curvature", "curvature at a boundary point");
  curv->add_option("--surface", surface, "surface spec file")->required();
  curv->add_option("--point", point, "x1,...,xN")->required();
  auto* crit = geo->add_subcommand("critical", "critical points of the mean curvature");
  crit->add_option("--surface", surface, "surface spec file")->required();
  crit->add_option("--seeds", seeds, "JSON array of seed points");

  auto* pred = app.add_subcommand("predict", "blow-up location and scale");
  pred->add_option("--surface", surface, "surface spec file")->required();
  pred->add_option("--bubble", bubble, "bubble file")->required();
  pred->add_option("--eps", eps, "eps values, comma separated")->required();
  pred->add_option("--lambda", lambda, "splitting parameter for c4");
  pred->add_option("--mu", mu, "coupling parameter (metadata)");
  pred->add_option("--select", select, "index among admissible critical points");

  auto* land = app.add_subcommand("landscape", "reduced energy over a boundary chart (CSV)");
  land->add_option("--surface", surface, "surface spec file")->required();
  land->add_option("--bubble", bubble, "bubble file")->required();
  land->add_option("--d-range", drange, "lo:hi:n")->required();
  land->add_option("--chart", chart, "x1,...,xN:half_width:n")->required();
  land->add_option("--lambda", lambda, "splitting parameter for c4");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    err << "\n" << app.help();
    return 1;
  }

  std::string command;
  for (const auto* sc = app.get_subcommands().front();;) {
    command += (command.empty() ? "" : " ") + sc->get_name();
    if (sc->get_subcommands().empty()) break;
    sc = sc->get_subcommands().front();
  }

  Output o;
  int status = 0;
  try {
    RunConfig cfg = apply_environment(config_file.empty() ? RunConfig{} : load_config(config_file));
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (ode_tol) cfg.ode_tol = *ode_tol;
    if (quad_rel_tol) cfg.quad_rel_tol = *quad_rel_tol;
    validate(cfg);

    if (hyp->parsed()) o = cmd_hyperbola(N, p, q);
    else if (solve->parsed()) o = cmd_bubble_solve(cfg, N, p, q, tol, r_max, out_file, no_cache);
    else if (show->parsed()) o = cmd_bubble_show(bubble);
    else if (cons->parsed()) o = cmd_constants(cfg, bubble, lambda);
    else if (ver->parsed()) o = cmd_verify(cfg, bubble);
    else if (cor->parsed()) o = cmd_corrector(bubble, rho, kind, probes, order, refine);
    else if (curv->parsed()) o = cmd_geometry_curvature(cfg, surface, point);
    else if (crit->parsed()) o = cmd_geometry_critical(surface, seeds);
    else if (pred->parsed()) o = cmd_predict(cfg, surface, bubble, eps, lambda, mu, select);
    else if (land->parsed()) o = cmd_landscape(cfg, surface, bubble, drange, chart, lambda);
    status = o.status;
  } catch (const std::exception& e) {
    status = exit_code_for(e);
    o.results = nullptr;
    o.diagnostics["error"] = {{"kind", error_kind(status)}, {"message", e.what()}};
    err << "error: " << e.what() << "\n";
  }

  if (o.raw && status == 0) {
    out << *o.raw;
    return status;
  }
  const json doc = {{"command", command},
                    {"inputs", o.inputs},
                    {"results", o.results},
                    {"diagnostics", o.diagnostics},
                    {"version", kVersion}};
  out << doc.dump(2) << "\n";
  return status;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace hambubble::cli
