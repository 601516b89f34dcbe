// microswim <command> --config <path> [--out <dir>] [--seed <n>] [--tol <x>]
//
// Exit codes: 0 success, 1 check failure, 2 usage/config error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "microswim/controllability.hpp"
#include "microswim/errors.hpp"
#include "microswim/expansion.hpp"
#include "microswim/simulator.hpp"
#include "microswim/transform.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace microswim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

PhysParams params_from(const json& j, const PhysParams& base = kReferenceParams) {
  if (!j.is_object()) throw ConfigError("parameter set must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "ell" && k != "xi" && k != "eta" && k != "kappa" && k != "m1" && k != "m2")
      throw ConfigError("unknown parameter '" + k + "'");
  PhysParams p = base;
  p.ell = get_or(j, "ell", p.ell);
  p.xi = get_or(j, "xi", p.xi);
  p.eta = get_or(j, "eta", p.eta);
  p.kappa = get_or(j, "kappa", p.kappa);
  p.m1 = get_or(j, "m1", p.m1);
  p.m2 = get_or(j, "m2", p.m2);
  return p;
}

/// "params" of the config, validated; P* when absent.
PhysParams single_params(const json& cfg) {
  const PhysParams p = cfg.contains("params") ? params_from(cfg.at("params")) : kReferenceParams;
  return validate_params(p);
}

json params_json(const PhysParams& p) {
  return {{"ell", p.ell}, {"xi", p.xi}, {"eta", p.eta}, {"kappa", p.kappa}, {"m1", p.m1}, {"m2", p.m2}};
}

std::uint64_t seed_of(const json& cfg, const Options& o) {
  return o.seed ? *o.seed : get_or<std::uint64_t>(cfg, "seed", 1);
}

/// Writes `body` to <out>/<name> when --out is set.
void emit(const Options& o, const std::string& name, const std::string& body) {
  if (o.out.empty()) return;
  fs::create_directories(o.out);
  std::ofstream f(fs::path(o.out) / name, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + (fs::path(o.out) / name).string());
  f << body;
}

// ---------------------------------------------------------------------------

int cmd_verify_model(const Options& o) {
  const json cfg = load_config(o.config);
  const PhysParams p = single_params(cfg);
  ExpansionOptions eo;
  if (o.tol) eo.match_rel_tol = *o.tol;
  eo.match_rel_tol = get_or(cfg, "match_rel_tol", eo.match_rel_tol);
  const TaylorReport rep = expansion_report(p, eo);

  json j;
  j["params"] = params_json(p);
  for (const auto& c : rep.coefficients)
    j["coefficients"].push_back({{"id", c.id()},
                                 {"symbol", c.symbol},
                                 {"computed", c.computed},
                                 {"closed_form", c.closed_form},
                                 {"abs_error", c.abs_error},
                                 {"error_estimate", c.error_estimate},
                                 {"status", to_string(c.status)}});
  for (const auto& r : rep.remainders)
    j["functions"].push_back({{"id", r.id()},
                              {"slope", r.fitted_slope},
                              {"identically_zero", r.identically_zero},
                              {"status", to_string(r.status)}});
  for (const auto& c : rep.constants)
    j["constants"].push_back({{"name", c.name},
                              {"computed", c.computed},
                              {"closed_form", c.closed_form},
                              {"rel_error", c.rel_error},
                              {"status", to_string(c.status)}});
  j["notices"] = rep.notices;
  j["all_pass"] = rep.all_pass();
  emit(o, "verify_model.json", j.dump(2) + "\n");

  std::cout << "function checks: " << rep.remainders.size() << ", coefficient checks: " << rep.coefficients.size()
            << ", constants: " << rep.constants.size() << "\n";
  for (const auto& n : rep.notices) std::cout << n << "\n";
  if (!rep.all_pass()) {
    std::cout << "FAIL first failing check: " << rep.first_failure() << "\n";
    return kExitCheck;
  }
  std::cout << "PASS\n";
  return kExitOk;
}

int cmd_constants(const Options& o) {
  const json cfg = load_config(o.config);
  const PhysParams p = single_params(cfg);
  const DerivedConstants d = derived_constants(p);
  json j;
  j["params"] = params_json(p);
  for (const auto& [k, v] : std::initializer_list<std::pair<const char*, double>>{
           {"a1", d.a1}, {"a2", d.a2}, {"b1", d.b1}, {"b2", d.b2}, {"b3", d.b3}, {"b4", d.b4}, {"c0", d.c0}, {"q", d.q}})
    j[k] = v;
  const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["c1"] = opt(d.c1);
  j["c2"] = opt(d.c2);
  j["c3"] = opt(d.c3);
  j["c0_regression"] = opt(d.c0_regression);
  j["fit_residual"] = opt(d.fit_residual);
  j["normal_coordinates_defined"] = d.normal_coordinates_defined;
  j["degeneracy"] = d.degeneracy;
  const std::string body = j.dump(2) + "\n";
  emit(o, "constants.json", body);
  std::cout << body;
  return kExitOk;
}

std::vector<PhysParams> grid_rows(const json& cfg) {
  const PhysParams base = cfg.contains("params") ? params_from(cfg.at("params")) : kReferenceParams;
  if (!cfg.contains("grid")) return {base};
  const json& g = cfg.at("grid");
  std::vector<PhysParams> rows;
  if (g.is_array()) {
    for (const auto& e : g) rows.push_back(params_from(e, base));
    return rows;
  }
  if (!g.is_object()) throw ConfigError("grid must be an array of parameter sets or an object of value lists");
  rows.push_back(base);
  for (const char* key : {"ell", "xi", "eta", "kappa", "m1", "m2"}) {
    if (!g.contains(key)) continue;
    const json& vals = g.at(key);
    if (!vals.is_array()) throw ConfigError(std::string("grid entry '") + key + "' must be a list");
    std::vector<PhysParams> next;
    for (const PhysParams& r : rows)
      for (const auto& v : vals) {
        if (!v.is_number()) throw ConfigError(std::string("grid entry '") + key + "' must hold numbers");
        next.push_back(params_from(json{{key, v.get<double>()}}, r));
      }
    rows = std::move(next);
  }
  return rows;
}

int cmd_classify(const Options& o) {
  const json cfg = load_config(o.config);
  const std::vector<PhysParams> rows = grid_rows(cfg);
  std::ostringstream csv;
  csv << "ell,xi,eta,kappa,m1,m2,class,q,c0,error\n";
  for (const PhysParams& p : rows) {
    csv << fmt(p.ell) << ',' << fmt(p.xi) << ',' << fmt(p.eta) << ',' << fmt(p.kappa) << ',' << fmt(p.m1) << ','
        << fmt(p.m2) << ',';
    try {
      const ControllabilityClass c = classify(p);
      csv << to_string(c.regime) << ',' << fmt(c.q) << ',' << fmt(c.c0) << ",\n";
    } catch (const Error& e) {
      std::string msg = e.what();
      for (char& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      csv << ",,," << msg << "\n";
    }
  }
  emit(o, "classify.csv", csv.str());
  std::cout << csv.str();
  return kExitOk;
}

ControlSignal signal_from(const json& j, double T) {
  const std::string kind = get_or<std::string>(j, "kind", "zero");
  if (kind == "zero") return ControlSignal::zero();
  if (kind == "piecewise") {
    if (!j.contains("values") || !j.at("values").is_array()) throw ConfigError("piecewise control needs 'values'");
    std::vector<ControlInput> v;
    for (const auto& e : j.at("values")) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("piecewise values are [h_perp, h_par] pairs");
      v.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return ControlSignal::piecewise_constant(T, std::move(v));
  }
  if (kind == "sinusoidal") {
    ControlSignal::Sinusoid s;
    s.amp_perp = get_or(j, "amp_perp", 0.0);
    s.amp_par = get_or(j, "amp_par", 0.0);
    s.omega = get_or(j, "omega", 1.0);
    s.phase_perp = get_or(j, "phase_perp", 0.0);
    s.phase_par = get_or(j, "phase_par", 0.0);
    return ControlSignal::sinusoidal(s);
  }
  throw ConfigError("unknown control kind '" + kind + "'");
}

int cmd_simulate(const Options& o) {
  const json cfg = load_config(o.config);
  const PhysParams p = single_params(cfg);
  const double T = get_or(cfg, "horizon", 1.0);
  SwimmerState z0{};
  if (cfg.contains("initial_state")) {
    const auto v = get_or<std::vector<double>>(cfg, "initial_state", {});
    if (v.size() != 4) throw ConfigError("initial_state must be [x, y, theta, alpha]");
    z0 = {v[0], v[1], v[2], v[3]};
  }
  const ControlSignal u = signal_from(cfg.value("control", json::object()), T);
  Tolerance tol;
  tol.rtol = tol.atol = get_or(cfg, "tol", tol.rtol);
  if (o.tol) tol.rtol = tol.atol = *o.tol;
  const Trajectory traj = integrate(p, z0, u, T, tol);

  std::ostringstream csv, xy;
  csv << "t,x,y,theta,alpha,h_perp,h_par\n";
  for (std::size_t i = 0; i < traj.times().size(); ++i) {
    const double t = traj.times()[i];
    const State4& s = traj.states()[i];
    const ControlInput c = traj.control_at(t);
    csv << fmt(t) << ',' << fmt(s[0]) << ',' << fmt(s[1]) << ',' << fmt(s[2]) << ',' << fmt(s[3]) << ','
        << fmt(c.h_perp) << ',' << fmt(c.h_par) << '\n';
    xy << fmt(s[0]) << ' ' << fmt(s[1]) << '\n';
  }
  emit(o, "trajectory.csv", csv.str());
  emit(o, "trajectory_xy.dat", xy.str());
  const State4& f = traj.final_state();
  std::cout << "steps " << traj.stats().steps << " rejected " << traj.stats().rejected << "\n"
            << "final " << fmt(f[0]) << ' ' << fmt(f[1]) << ' ' << fmt(f[2]) << ' ' << fmt(f[3]) << "\n";
  return kExitOk;
}

std::vector<double> eps_list_from(const json& cfg, const PhysParams& p) {
  if (cfg.contains("eps_list")) return get_or<std::vector<double>>(cfg, "eps_list", {});
  if (cfg.contains("eps_over_q")) {
    std::vector<double> v = get_or<std::vector<double>>(cfg, "eps_over_q", {});
    const double q = stlc_threshold(p);
    if (q == 0.0) throw ConfigError("eps_over_q needs q > 0");
    for (double& e : v) e *= q;
    return v;
  }
  throw ConfigError("config needs 'eps_list' or 'eps_over_q'");
}

int cmd_loop_sweep(const Options& o) {
  const json cfg = load_config(o.config);
  const PhysParams p = single_params(cfg);
  const std::vector<double> eps = eps_list_from(cfg, p);
  if (eps.empty()) throw ConfigError("eps list is empty");
  SweepOptions so;
  so.horizon_factor = get_or(cfg, "horizon_factor", so.horizon_factor);
  so.fixed_horizon = get_or(cfg, "fixed_horizon", so.fixed_horizon);
  so.loop.intervals = get_or(cfg, "intervals", so.loop.intervals);
  so.loop.steps = get_or(cfg, "steps", 10 * so.loop.intervals);
  so.loop.starts = get_or(cfg, "starts", so.loop.starts);
  if (o.tol) so.loop.feasibility_tol = *o.tol;
  SweepResult r;
  try {
    r = epsilon_sweep(p, eps, seed_of(cfg, o), so);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }

  std::ostringstream csv;
  csv << "eps,T,status,objective,defect,nontrivial,best_candidate_objective,best_candidate_defect,ratio,"
         "max_K1_over_K,max_K2_over_K\n";
  for (const SweepRow& row : r.rows) {
    double cand_obj = 0.0, cand_def = 0.0;
    for (const auto& c : row.loop.candidates)
      if (c.objective > cand_obj) {
        cand_obj = c.objective;
        cand_def = c.defect;
      }
    double k1 = 0.0, k2 = 0.0;
    for (const auto& q : row.inequalities)
      if (!q.undefined_ratio && q.K > 0.0) {
        k1 = std::max(k1, q.K1 / q.K);
        k2 = std::max(k2, q.K2 / q.K);
      }
    csv << fmt(row.eps) << ',' << fmt(row.horizon) << ',' << to_string(row.loop.status) << ','
        << fmt(row.loop.objective) << ',' << fmt(row.loop.defect) << ',' << (row.loop.nontrivial ? 1 : 0) << ','
        << fmt(cand_obj) << ',' << fmt(cand_def) << ',' << fmt(row.ratio) << ',' << fmt(k1) << ',' << fmt(k2)
        << '\n';
  }
  json s = {{"params", params_json(p)},
            {"class", to_string(r.cls.regime)},
            {"q", r.cls.q},
            {"c0", r.cls.c0},
            {"monotone_violations", r.monotone_violations},
            {"kendall_tau", r.kendall_tau},
            {"verdict", r.verdict}};
  emit(o, "loop_sweep.csv", csv.str());
  emit(o, "loop_sweep.json", s.dump(2) + "\n");
  std::cout << csv.str() << "class " << to_string(r.cls.regime) << "\nverdict " << r.verdict << "\n";
  return kExitOk;
}

int cmd_obstruction(const Options& o) {
  const json cfg = load_config(o.config);
  const PhysParams p = single_params(cfg);
  const std::vector<double> eps = get_or<std::vector<double>>(cfg, "eps_list", {1e-1, 1e-2, 1e-3});
  ObstructionStudyOptions so;
  so.samples = get_or(cfg, "samples", so.samples);
  so.intervals = get_or(cfg, "intervals", so.intervals);
  so.horizon_factor = get_or(cfg, "horizon_factor", so.horizon_factor);
  if (o.tol) so.tol.rtol = *o.tol;
  std::vector<ObstructionLevel> levels;
  try {
    levels = obstruction_study(p, eps, seed_of(cfg, o), so);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const double c0 = c0_closed_form(p);
  std::ostringstream csv, samples, plot;
  csv << "eps,T,defined,undefined,median_abs_deviation,c0\n";
  samples << "eps,sample,ratio\n";
  for (const auto& l : levels) {
    csv << fmt(l.eps) << ',' << fmt(l.horizon) << ',' << l.ratios.size() << ',' << l.undefined << ','
        << fmt(l.median_abs_deviation) << ',' << fmt(c0) << '\n';
    for (std::size_t i = 0; i < l.ratios.size(); ++i) samples << fmt(l.eps) << ',' << i << ',' << fmt(l.ratios[i]) << '\n';
    plot << fmt(l.eps) << ' ' << fmt(l.median_abs_deviation) << '\n';
  }
  emit(o, "obstruction.csv", csv.str());
  emit(o, "obstruction_samples.csv", samples.str());
  emit(o, "obstruction_convergence.dat", plot.str());
  std::cout << csv.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-link magneto-elastic swimmer: model checks, constants, controllability experiments"};
  app.require_subcommand(1);
  Options opt;
  int (*handler)(const Options&) = nullptr;

  const auto add = [&](const char* name, const char* desc, int (*fn)(const Options&)) {
    CLI::App* sc = app.add_subcommand(name, desc);
    sc->add_option("--config", opt.config, "JSON config")->required();
    sc->add_option("--out", opt.out, "output directory");
    sc->add_option("--seed", opt.seed, "random seed");
    sc->add_option("--tol", opt.tol, "tolerance override");
    sc->callback([&handler, fn] { handler = fn; });
  };
  add("verify-model", "check the model's expansions against closed forms", cmd_verify_model);
  add("constants", "dump derived constants", cmd_constants);
  add("classify", "controllability class, q and c0 per parameter set", cmd_classify);
  add("simulate", "integrate and export a trajectory", cmd_simulate);
  add("loop-sweep", "loop search over decreasing control bounds", cmd_loop_sweep);
  add("obstruction", "random-control obstruction-ratio convergence study", cmd_obstruction);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    return handler(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NonPositiveParameter& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ZeroMagnetization& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const OracleMismatch& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitCheck;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}
