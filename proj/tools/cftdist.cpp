#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cftdist/acceptance.hpp"
#include "cftdist/charfun.hpp"
#include "cftdist/dist.hpp"
#include "cftdist/fields.hpp"
#include "cftdist/momentflow.hpp"
#include "cftdist/thermal.hpp"
#include "cftdist/welding.hpp"

using namespace cftdist;
using nlohmann::json;

namespace {

constexpr const char* kSchema = "cftdist-output/1";
constexpr const char* kVersion = "1.0.0";

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    invalid("'" + path + "' is not valid JSON: " + e.what());
  }
}

double num(const json& cfg, const char* key, double fallback) {
  if (!cfg.contains(key) || cfg.at(key).is_null()) return fallback;
  if (!cfg.at(key).is_number()) invalid(std::string("'") + key + "' must be a number");
  return cfg.at(key).get<double>();
}

int integer(const json& cfg, const char* key, int fallback) {
  const double v = num(cfg, key, fallback);
  if (v != std::floor(v)) invalid(std::string("'") + key + "' must be an integer");
  return static_cast<int>(v);
}

// Validated view of a RunConfig document.
struct RunConfig {
  json doc;
  std::string command;
  double c = 1.0;
  double h = 0.0;
  double beta = 0.0;
  int N = 256;
  double t_max = 5.0;
  int n_t = 128;
  double lambda_max = 0.0;
  double mu_max = 0.0;
  int n_mu = 17;
  int steps = 64;
  double t = 0.5;
  std::string variant = "vacuum";
  std::string method = "closed";
  std::string json_out, csv_out;
  json tolerances = json::object();
};

RunConfig validate(const json& doc) {
  static const std::set<std::string> top = {"command", "field", "c", "h", "beta", "grids", "t", "variant",
                                            "method", "spectrum", "output", "tolerances", "quick"};
  static const std::set<std::string> grid_keys = {"N", "t_max", "n_t", "lambda_max", "mu_max", "n_mu", "steps"};
  static const std::set<std::string> tol_keys = {"junction", "resolution", "w_tol"};
  if (!doc.is_object()) invalid("run config must be a JSON object");
  for (const auto& [k, v] : doc.items())
    if (!top.count(k)) invalid("unknown config key '" + k + "'");
  RunConfig rc;
  rc.doc = doc;
  rc.command = doc.value("command", "");
  rc.c = num(doc, "c", 1.0);
  rc.h = num(doc, "h", 0.0);
  rc.beta = num(doc, "beta", 0.0);
  rc.t = num(doc, "t", 0.5);
  rc.variant = doc.value("variant", "vacuum");
  rc.method = doc.value("method", "closed");
  const json g = doc.value("grids", json::object());
  for (const auto& [k, v] : g.items())
    if (!grid_keys.count(k)) invalid("unknown grid key '" + k + "'");
  rc.N = integer(g, "N", 256);
  rc.t_max = num(g, "t_max", 5.0);
  rc.n_t = integer(g, "n_t", 128);
  rc.lambda_max = num(g, "lambda_max", 0.0);
  rc.mu_max = num(g, "mu_max", 0.0);
  rc.n_mu = integer(g, "n_mu", 17);
  rc.steps = integer(g, "steps", 64);
  const json o = doc.value("output", json::object());
  rc.json_out = o.value("json", "");
  rc.csv_out = o.value("csv", "");
  rc.tolerances = doc.value("tolerances", json::object());
  for (const auto& [k, v] : rc.tolerances.items())
    if (!tol_keys.count(k) || !v.is_number() || !(v.get<double>() > 0.0)) invalid("bad tolerance override '" + k + "'");

  if (!(rc.c > 0.0)) invalid("c must be positive");
  if (rc.h < 0.0) invalid("h must be nonnegative");
  if (rc.N < 8 || (rc.N & (rc.N - 1))) invalid("N must be a power of two >= 8");
  if (!(rc.t_max > 0.0)) invalid("t_max must be positive");
  if (rc.n_t < 4) invalid("n_t must be at least 4");
  if (rc.mu_max < 0.0) invalid("mu_max must be positive");
  if (rc.lambda_max < 0.0) invalid("lambda_max must be positive");
  if (rc.n_mu < 2 || rc.steps < 1) invalid("n_mu must be >= 2 and steps >= 1");
  return rc;
}

FieldSource field_of(const RunConfig& rc) {
  if (!rc.doc.contains("field")) invalid("no field given; use --builtin/--family or --field");
  return parse_field(rc.doc.at("field"));
}

WeldingOptions welding_options(const RunConfig& rc) {
  WeldingOptions w;
  w.junction_tol = num(rc.tolerances, "junction", w.junction_tol);
  w.resolution_tol = num(rc.tolerances, "resolution", w.resolution_tol);
  return w;
}

FlowOptions flow_options(const RunConfig& rc) {
  FlowOptions f;
  f.w_tol = num(rc.tolerances, "w_tol", f.w_tol);
  return f;
}

json complex_array(const cvec& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back({{"re", z.real()}, {"im", z.imag()}});
  return a;
}

json params_json(const ShiftedGamma& g) { return {{"alpha", g.alpha}, {"beta", g.beta}, {"sigma", g.sigma}}; }

json header(const RunConfig& rc) {
  return {{"schema", kSchema}, {"version", kVersion}, {"command", rc.command}};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) invalid("cannot write '" + path + "'");
  out << text;
}

void emit(const RunConfig& rc, const json& j) { write_text(rc.json_out, j.dump(2) + "\n"); }

std::string csv(const std::string& head, const std::vector<rvec>& cols) {
  std::ostringstream s;
  s.precision(17);
  s << head << "\n";
  for (size_t i = 0; i < cols[0].size(); ++i) {
    for (size_t k = 0; k < cols.size(); ++k) s << (k ? "," : "") << cols[k][i];
    s << "\n";
  }
  return s.str();
}

rvec mu_grid(const RunConfig& rc, double lo, double hi) {
  rvec mu(rc.n_mu);
  for (int k = 0; k < rc.n_mu; ++k) mu[k] = lo + (hi - lo) * k / (rc.n_mu - 1);
  return mu;
}

// ---- subcommands ----

int cmd_weld(const RunConfig& rc) {
  const FieldSource src = field_of(rc);
  const WeldingSolution ws = solve_flow_welding(src.circle(PeriodicGrid(rc.N)), rc.t, welding_options(rc));
  json j = header(rc);
  j["field"] = src.descriptor;
  j["t"] = ws.t;
  j["n_points"] = ws.grid.size();
  j["junction_residual"] = ws.junction_residual;
  j["normalization_error"] = ws.normalization_error;
  j["theta"] = ws.theta;
  j["w_minus"] = complex_array(ws.w_minus);
  j["schwarzian"] = complex_array(ws.schwarzian);
  emit(rc, j);
  return 0;
}

CharFunSamples charfun_of(const RunConfig& rc, const FieldSource& src) {
  CharFunOptions o;
  o.t_max = rc.t_max;
  o.n_t = rc.n_t;
  o.welding = welding_options(rc);
  if (rc.variant == "kms") {
    if (!(rc.beta > 0.0)) invalid("kms variant needs --beta > 0");
    return kms_charfun(src.line(), rc.beta, rc.c, o);
  }
  if (rc.variant == "hw") return hw_charfun(src.circle(PeriodicGrid(rc.N)), rc.c, rc.h, o);
  if (rc.variant != "vacuum") invalid("variant must be vacuum, hw or kms");
  if (src.on_line()) return lightray_charfun(src.line(), rc.c, o);
  return vacuum_charfun(src.circle(PeriodicGrid(rc.N)), rc.c, o);
}

int cmd_charfun(const RunConfig& rc) {
  const FieldSource src = field_of(rc);
  const CharFunSamples cf = charfun_of(rc, src);
  json j = header(rc);
  j["field"] = src.descriptor;
  j["variant"] = rc.variant;
  j["c"] = rc.c;
  if (rc.variant == "hw") j["h"] = rc.h;
  if (rc.variant == "kms") j["beta"] = rc.beta;
  rvec re, im;
  for (const auto& v : cf.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  j["t"] = cf.t;
  j["re"] = re;
  j["im"] = im;
  emit(rc, j);
  if (!rc.csv_out.empty()) write_text(rc.csv_out, csv("t,re,im", {cf.t, re, im}));
  return 0;
}

int cmd_pdf(const RunConfig& rc) {
  const FieldSource src = field_of(rc);
  CharFunSamples cf;
  std::string law;
  if (rc.method == "closed") {
    if (src.fn_order > 0) {
      const int n = src.fn_order;
      const double p = (rc.c / 12.0) * (n - 1.0 / n) + 2.0 * rc.h / n;
      cf = secant_samples(p, rc.t_max, rc.n_t);
      law = "secant p=" + std::to_string(p);
    } else if (src.family) {
      const ShiftedGamma g = shifted_gamma_params(*src.family, rc.c);
      cf = shifted_gamma_samples(g, rc.t_max, rc.n_t);
      law = "shifted-gamma";
    } else {
      invalid("closed method needs a builtin field; use --method numeric");
    }
  } else if (rc.method == "numeric") {
    cf = charfun_of(rc, src);
    law = "numeric charfun";
  } else {
    invalid("method must be closed or numeric");
  }
  InversionOptions io;
  const EmpiricalDensity d = invert_charfun(cf, io);
  json j = header(rc);
  j["field"] = src.descriptor;
  j["source"] = d.source + " (" + law + ")";
  j["window"] = d.window;
  j["mass"] = d.mass;
  j["support_min"] = d.support_min;
  j["window_bias"] = d.window_bias;
  j["spacing"] = d.spacing();
  j["valid"] = d.valid();
  emit(rc, j);
  const std::string table = csv("lambda,pdf", {d.x, d.pdf});
  if (!rc.csv_out.empty()) write_text(rc.csv_out, table);
  if (d.valid()) return 0;
  std::fprintf(stderr, "accuracy failure: density minimum %.6e, mass error %.6e\n", d.min_value, std::abs(d.mass - 1.0));
  return 2;
}

json diagnostics_of(const FieldSource& src, const LineField& f, const RunConfig& rc, ShiftedGamma* out) {
  const CumulantFit fit = cumulant_fit(f, rc.c, flow_options(rc));
  json d = {{"kappa2", fit.kappa2}, {"kappa3", fit.kappa3}, {"fit_adequacy", fit.adequacy}};
  *out = fit.fit;
  if (src.family) {
    const ShiftedGamma closed = shifted_gamma_params(*src.family, rc.c);
    d["closed_form"] = params_json(closed);
    d["fit_relative_error"] = std::max({std::abs(fit.fit.alpha / closed.alpha - 1.0),
                                        std::abs(fit.fit.beta / closed.beta - 1.0),
                                        std::abs(fit.fit.sigma / closed.sigma - 1.0)});
    *out = closed;
  }
  return d;
}

int cmd_params(const RunConfig& rc) {
  const FieldSource src = field_of(rc);
  const LineField f = src.line();
  ShiftedGamma p;
  const json diag = diagnostics_of(src, f, rc, &p);
  json j = header(rc);
  j["family"] = src.name();
  j["c"] = rc.c;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["sigma"] = p.sigma;
  j["params"] = params_json(p);
  j["qei"] = qei_bound(f, rc.c);
  j["diagnostics"] = diag;
  emit(rc, j);
  return 0;
}

int cmd_qei(const RunConfig& rc) {
  const FieldSource src = field_of(rc);
  const LineField f = src.line();
  ShiftedGamma p;
  const json diag = diagnostics_of(src, f, rc, &p);
  json j = header(rc);
  j["family"] = src.name();
  j["c"] = rc.c;
  j["qei"] = qei_bound(f, rc.c);
  j["params"] = params_json(p);
  j["diagnostics"] = diag;
  emit(rc, j);
  return 0;
}

int cmd_flow(const RunConfig& rc) {
  const FieldSource src = field_of(rc);
  const LineField f = src.line();
  double lmax = rc.lambda_max;
  if (lmax == 0.0) {
    if (!src.family) invalid("--lambda-max is required for non-builtin fields");
    lmax = 0.5 * src.family->blowup();
  }
  const NumericFlow fl = flow_integrate(f, lmax, rc.steps, flow_options(rc));
  rvec variance, center, left;
  for (size_t k = 0; k < fl.size(); ++k) {
    variance.push_back(rc.c * fl.unit_variance[k]);
    center.push_back(fl.value(k, 0.0));
    left.push_back(fl.left_end(k));
  }
  json j = header(rc);
  j["family"] = src.name();
  j["c"] = rc.c;
  j["lambda"] = fl.lambda;
  j["variance"] = variance;
  j["value_at_zero"] = center;
  j["left_particle"] = left;
  if (src.family) {
    rvec width;
    for (double l : fl.lambda) width.push_back(src.family->width(l));
    j["closed_width"] = width;
    j["params"] = params_json(shifted_gamma_params(*src.family, rc.c));
  }
  j["diagnostics"] = {{"s_points", fl.s.size()}, {"steps", rc.steps}};
  emit(rc, j);
  if (!rc.csv_out.empty()) write_text(rc.csv_out, csv("lambda,variance,value_at_zero", {fl.lambda, variance, center}));
  return 0;
}

int cmd_mgf(const RunConfig& rc) {
  const FieldSource src = field_of(rc);
  const LineField f = src.line();
  double mu_max = rc.mu_max;
  ShiftedGamma closed;
  if (src.family) closed = shifted_gamma_params(*src.family, rc.c);
  if (mu_max == 0.0) {
    if (!src.family) invalid("--mu-max is required for non-builtin fields");
    mu_max = 0.5 * closed.beta;
  }
  const rvec mu = mu_grid(rc, -mu_max, mu_max);
  const MgfResult r = mgf(f, rc.c, mu, flow_options(rc));
  json j = header(rc);
  j["family"] = src.name();
  j["c"] = rc.c;
  j["mu"] = r.mu;
  j["log_mgf"] = r.log_mgf;
  json diag = {{"steps", r.steps}, {"step_change", r.step_change}};
  if (src.family) {
    rvec ref;
    double err = 0.0;
    for (size_t k = 0; k < mu.size(); ++k) {
      ref.push_back(closed.log_mgf(mu[k]));
      err = std::max(err, std::abs(std::exp(r.log_mgf[k] - ref.back()) - 1.0));
    }
    j["params"] = params_json(closed);
    j["closed_log_mgf"] = ref;
    diag["max_relative_error"] = err;
  }
  j["diagnostics"] = diag;
  emit(rc, j);
  if (!rc.csv_out.empty()) write_text(rc.csv_out, csv("mu,log_mgf", {r.mu, r.log_mgf}));
  return 0;
}

PartitionFunction partition_of(const RunConfig& rc) {
  if (!rc.doc.contains("spectrum")) return free_boson_partition();
  json s = rc.doc.at("spectrum");
  if (s.is_string()) s = read_json_file(s.get<std::string>());
  if (s.is_string() && s.get<std::string>() == "vacuum") return vacuum_character();
  if (!s.is_array()) invalid("spectrum must be a list of [h, multiplicity] pairs");
  std::vector<std::pair<double, double>> levels;
  for (const auto& e : s) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      invalid("spectrum entries must be [h, multiplicity]");
    levels.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return spectrum_partition(levels);
}

int cmd_thermal(const RunConfig& rc) {
  if (!(rc.beta > 0.0)) invalid("thermal needs --beta > 0");
  const FieldSource src = field_of(rc);
  const CircleField f = src.circle(PeriodicGrid(rc.N));
  const PartitionFunction z = partition_of(rc);
  const double mu_max = rc.mu_max > 0.0 ? rc.mu_max : 0.1;
  const rvec mu = mu_grid(rc, -mu_max, mu_max);
  ThermalOptions to;
  to.steps = rc.steps;
  const ThermalMgf r = thermal_mgf(f, rc.beta, z, rc.c, mu, to);
  json traj = json::array();
  for (const auto& s : r.trajectory) traj.push_back({{"lambda", s.lambda}, {"beta", s.beta}, {"int_f", s.f.integral()}});
  json j = header(rc);
  j["field"] = src.descriptor;
  j["beta"] = rc.beta;
  j["c"] = rc.c;
  j["partition"] = z.name;
  j["mean"] = r.mean;
  j["connected2"] = r.connected2;
  j["connected2_modes"] = thermal_connected2_modes(f, rc.beta, z, rc.c);
  j["mu"] = r.mu;
  j["log_mgf"] = r.log_mgf;
  j["trajectory"] = traj;
  emit(rc, j);
  if (!rc.csv_out.empty()) write_text(rc.csv_out, csv("mu,log_mgf", {r.mu, r.log_mgf}));
  return 0;
}

int cmd_selftest(const RunConfig& rc) {
  const bool quick = rc.doc.value("quick", false);
  const std::vector<CriterionResult> res = quick ? run_quick_selftest() : [] {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= 12; ++id) {
      out.push_back(run_criterion(id));
      std::printf("%s\n", format_result(out.back()).c_str());
      std::fflush(stdout);
    }
    return out;
  }();
  int failed = 0;
  for (const auto& r : res) {
    if (quick) std::printf("%s\n", format_result(r).c_str());
    failed += !r.pass;
  }
  std::printf("%d of %zu passed\n", static_cast<int>(res.size()) - failed, res.size());
  return failed ? 2 : 0;
}

int run(const RunConfig& rc) {
  if (rc.command == "weld") return cmd_weld(rc);
  if (rc.command == "charfun") return cmd_charfun(rc);
  if (rc.command == "pdf") return cmd_pdf(rc);
  if (rc.command == "flow") return cmd_flow(rc);
  if (rc.command == "mgf") return cmd_mgf(rc);
  if (rc.command == "qei") return cmd_qei(rc);
  if (rc.command == "params") return cmd_params(rc);
  if (rc.command == "thermal") return cmd_thermal(rc);
  if (rc.command == "selftest") return cmd_selftest(rc);
  invalid("unknown command '" + rc.command + "'");
}

bool validation_kind(ErrorKind k) {
  return k == ErrorKind::Config || k == ErrorKind::Parameter || k == ErrorKind::Precondition;
}

// Flags shared by the subcommands, written into the config document when given.
struct Flags {
  std::string config, field, builtin, spectrum, json_out, csv_out, variant, method;
  int n = 0;
  double tau = 0, b0 = 0, gamma = 0;
  double c = 0, h = 0, beta = 0, t = 0, t_max = 0, lambda_max = 0, mu_max = 0;
  int N = 0, n_t = 0, n_mu = 0, steps = 0;
  double junction = 0, w_tol = 0;
  bool quick = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->set_help_flag("--help", "print this help");
  sub->add_option("--config", f.config, "RunConfig JSON file");
  sub->add_option("--field", f.field, "field descriptor JSON file");
  sub->add_option("--builtin,--family", f.builtin, "builtin field: gaussian, lorentzian, invgamma, fn");
  sub->add_option("--n", f.n, "order of f_n or Lorentzian power");
  sub->add_option("--tau", f.tau, "Gaussian width");
  sub->add_option("--b0", f.b0, "Lorentzian width or inverse-Gamma scale");
  sub->add_option("--gamma", f.gamma, "inverse-Gamma power");
  sub->add_option("--c", f.c, "central charge");
  sub->add_option("--h", f.h, "highest weight");
  sub->add_option("--beta", f.beta, "inverse temperature");
  sub->add_option("--t", f.t, "flow time for weld");
  sub->add_option("--N", f.N, "circle grid size (power of two)");
  sub->add_option("--t-max", f.t_max, "charfun window");
  sub->add_option("--n-t", f.n_t, "charfun samples per side");
  sub->add_option("--lambda-max", f.lambda_max, "flow range");
  sub->add_option("--mu-max", f.mu_max, "MGF range");
  sub->add_option("--n-mu", f.n_mu, "MGF samples");
  sub->add_option("--steps,--modes", f.steps, "RK4 steps");
  sub->add_option("--variant", f.variant, "vacuum, hw or kms");
  sub->add_option("--method", f.method, "closed or numeric (pdf)");
  sub->add_option("--spectrum", f.spectrum, "JSON list of [h, multiplicity] pairs, or 'vacuum'");
  sub->add_option("--out,--json", f.json_out, "JSON output path (default stdout)");
  sub->add_option("--csv", f.csv_out, "CSV output path");
  sub->add_option("--junction-tol", f.junction, "welding junction tolerance");
  sub->add_option("--w-tol", f.w_tol, "MGF step-halving tolerance");
  sub->add_flag("--quick", f.quick, "selftest subset");
}

json assemble(const std::string& command, CLI::App* sub, const Flags& f) {
  json doc = f.config.empty() ? json::object() : read_json_file(f.config);
  if (!doc.is_object()) invalid("run config must be a JSON object");
  doc["command"] = command;
  auto given = [&](const char* name) { return sub->get_option(name)->count() > 0; };
  if (given("--field")) doc["field"] = read_json_file(f.field);
  if (given("--builtin")) {
    json p = json::object();
    if (given("--n")) p["n"] = f.n;
    if (given("--tau")) p["tau"] = f.tau;
    if (given("--b0")) p["b0"] = f.b0;
    if (given("--gamma")) p["gamma"] = f.gamma;
    doc["field"] = builtin_descriptor(f.builtin, p);
  }
  for (auto [flag, key, v] : {std::tuple{"--c", "c", f.c}, {"--h", "h", f.h}, {"--beta", "beta", f.beta}, {"--t", "t", f.t}})
    if (given(flag)) doc[key] = v;
  json& g = doc["grids"];
  if (!g.is_object()) g = json::object();
  if (given("--N")) g["N"] = f.N;
  if (given("--t-max")) g["t_max"] = f.t_max;
  if (given("--n-t")) g["n_t"] = f.n_t;
  if (given("--lambda-max")) g["lambda_max"] = f.lambda_max;
  if (given("--mu-max")) g["mu_max"] = f.mu_max;
  if (given("--n-mu")) g["n_mu"] = f.n_mu;
  if (given("--steps")) g["steps"] = f.steps;
  if (given("--variant")) doc["variant"] = f.variant;
  else if (command == "charfun" && given("--h") && !doc.contains("variant")) doc["variant"] = "hw";
  if (given("--method")) doc["method"] = f.method;
  if (given("--spectrum")) doc["spectrum"] = f.spectrum == "vacuum" ? json("vacuum") : read_json_file(f.spectrum);
  json& o = doc["output"];
  if (!o.is_object()) o = json::object();
  if (given("--out")) o["json"] = f.json_out;
  if (given("--csv")) o["csv"] = f.csv_out;
  json& tol = doc["tolerances"];
  if (!tol.is_object()) tol = json::object();
  if (given("--junction-tol")) tol["junction"] = f.junction;
  if (given("--w-tol")) tol["w_tol"] = f.w_tol;
  if (f.quick) doc["quick"] = true;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributions of smeared stress-tensor observables in 2d CFT"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"weld", "conformal welding of the time-t flow of a circle field"},
      {"charfun", "characteristic function (vacuum, hw or kms)"},
      {"pdf", "density by charfun inversion"},
      {"flow", "numeric moment flow of a line field"},
      {"mgf", "moment generating function from the flow"},
      {"qei", "quantum energy inequality bound"},
      {"params", "shifted Gamma parameters"},
      {"thermal", "thermal flow and MGF"},
      {"selftest", "acceptance suite"}};
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  CLI::App* sub = app.get_subcommands().front();
  try {
    const RunConfig rc = validate(assemble(sub->get_name(), sub, flags));
    return run(rc);
  } catch (const Error& e) {
    if (validation_kind(e.kind())) {
      std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
      return 1;
    }
    std::fprintf(stderr, "accuracy failure (%s): %s; achieved residual %.6e\n", to_string(e.kind()), e.what(),
                 e.achieved());
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return 1;
  }
}
