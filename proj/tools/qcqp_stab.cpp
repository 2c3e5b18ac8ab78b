// qcqp-stab: certification, stability reports, grid scans and noise sweeps.
#include "qstab/kernels.hpp"
#include "qstab/registry.hpp"
#include "qstab/report.hpp"
#include "qstab/scan.hpp"
#include "qstab/sdp.hpp"
#include "qstab/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace qstab;
using nlohmann::json;

namespace {

constexpr int kExitTight = 0;
constexpr int kExitUsage = 1;
constexpr int kExitGap = 2;
constexpr int kExitInconclusive = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw UsageError("cannot parse number '" + tok + "'");
    }
    if (tok.find_first_not_of(" \t", used) != std::string::npos) throw UsageError("cannot parse number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())); }

// Options shared by every problem-driven subcommand. Flags win over the config file.
struct Common {
  std::string config_path;
  std::string problem;
  std::string params;
  std::string theta;
  std::string out;
  double feas_tol = -1, gap_tol = -1;
  int max_iter = -1;
  int threads = 0;
  bool no_oracle = false;
  bool reproducible = false;

  json cfg = json::object();

  void add(CLI::App* sub, bool with_theta) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--problem", problem, "problem name (see list-problems)");
    sub->add_option("--params", params, "problem parameters as a JSON object");
    if (with_theta) sub->add_option("--theta", theta, "comma-separated parameter vector");
    sub->add_option("--out", out, "output file (default stdout)");
    sub->add_option("--feas-tol", feas_tol, "certificate feasibility tolerance");
    sub->add_option("--gap-tol", gap_tol, "certificate relative gap tolerance");
    sub->add_option("--max-iter", max_iter, "interior-point iteration limit");
    sub->add_option("--threads", threads, "worker count (QCQP_STAB_THREADS overrides)");
    sub->add_flag("--no-oracle", no_oracle, "do not use the family's global-minimum oracle");
    sub->add_flag("--reproducible", reproducible, "omit timestamps and timings");
  }

  void load() {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw UsageError("cannot open config file " + config_path);
      try {
        cfg = json::parse(in);
      } catch (const json::exception& e) {
        throw UsageError(std::string("bad config file: ") + e.what());
      }
      if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    }
    if (problem.empty()) problem = cfg.value("problem", std::string());
    if (problem.empty()) throw UsageError("--problem is required");
    if (!reproducible) reproducible = cfg.value("reproducible", false);
    if (!no_oracle) no_oracle = !cfg.value("oracle", true);
  }

  ParametricProblem family() const {
    json p = cfg.value("params", json::object());
    if (!params.empty()) {
      try {
        p = json::parse(params);
      } catch (const json::exception& e) {
        throw UsageError(std::string("bad --params: ") + e.what());
      }
    }
    return make_problem(problem, p);
  }

  Vector theta_vec(const ParametricProblem& fam) const {
    std::vector<double> v;
    if (!theta.empty())
      v = parse_list(theta);
    else if (cfg.contains("theta"))
      v = cfg["theta"].get<std::vector<double>>();
    else
      throw UsageError("--theta is required");
    if (static_cast<Index>(v.size()) != fam.d)
      throw UsageError(fam.name + " expects theta of length " + std::to_string(fam.d) + ", got " +
                       std::to_string(v.size()));
    return to_vector(v);
  }

  int workers() const {
    int t = threads > 0 ? threads : cfg.value("threads", 1);
    return kernels::worker_count(std::max(1, t));
  }

  CertifySettings settings() const {
    CertifySettings s;
    s.feas_tol = feas_tol > 0 ? feas_tol : cfg.value("feas_tol", s.feas_tol);
    s.gap_tol = gap_tol > 0 ? gap_tol : cfg.value("gap_tol", s.gap_tol);
    s.solver.max_iter = max_iter > 0 ? max_iter : cfg.value("max_iter", s.solver.max_iter);
    s.solver.threads = workers();
    return s;
  }

  std::string out_path() const { return out.empty() ? cfg.value("out", std::string()) : out; }

  void emit(const std::string& text) const {
    const std::string path = out_path();
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path);
    f << text;
  }
};

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::certified_tight: return kExitTight;
    case Verdict::gap_positive: return kExitGap;
    default: return kExitInconclusive;
  }
}

json theta_json(const Vector& th) { return json_vector(th); }

GapCertificate certify_cli(const Common& c, const ParametricProblem& fam, const Vector& th) {
  return certify_gap(fam, th, with_oracle(fam, th, c.settings(), !c.no_oracle));
}

int cmd_certify(const Common& c) {
  ParametricProblem fam = c.family();
  Vector th = c.theta_vec(fam);
  GapCertificate cert = certify_cli(c, fam, th);
  json j = {{"problem", fam.name}, {"theta", theta_json(th)}, {"certificate", certificate_to_json(cert, !c.reproducible)}};
  c.emit(j.dump(2) + "\n");
  return verdict_exit(cert.verdict);
}

struct Tight {
  GapCertificate cert;
  HomQCQP p;
};

Tight tight_point(const Common& c, const ParametricProblem& fam, const Vector& th) {
  Tight t{certify_cli(c, fam, th), fam.instantiate(th)};
  if (!t.cert.x_hat) throw std::runtime_error("no rank-one solution at theta; stability needs a tight parameter");
  return t;
}

int cmd_stability(const Common& c, std::optional<double> K, std::optional<double> L, bool slater_only) {
  ParametricProblem fam = c.family();
  Vector th = c.theta_vec(fam);
  Tight t = tight_point(c, fam, th);
  json j = {{"problem", fam.name}, {"theta", theta_json(th)}, {"verdict", to_string(t.cert.verdict)}};
  if (slater_only) {
    SymMatrix Q = lagrangian_hessian(t.p, t.cert.lambda);
    RestrictedSlater rs = restricted_slater(t.p, *t.cert.x_hat, Q, 1e-7, kRankTol, c.settings().solver);
    j["restricted_slater"] = slater_to_json(rs);
  } else {
    StabilityOptions o;
    o.K = K;
    o.L = L;
    o.solver = c.settings().solver;
    j["stability"] = stability_to_json(assess_stability(fam, th, *t.cert.x_hat, t.cert.lambda, o));
  }
  c.emit(j.dump(2) + "\n");
  return t.cert.verdict == Verdict::certified_tight ? kExitTight : kExitInconclusive;
}

int cmd_radius(const Common& c, const std::string& ybar, std::optional<double> K, std::optional<double> L) {
  ParametricProblem fam = c.family();
  json j = {{"problem", fam.name}};
  if (!ybar.empty()) {
    Vector y = to_vector(parse_list(ybar));
    auto r = corollary_radius_at(fam, y);
    if (!r) throw UsageError(fam.name + " is not a nearest-point family; pass --theta with --K and --L instead");
    j["ybar"] = json_vector(y);
    j["radius_cor"] = {{"value", json_number(r->value)}, {"degenerate", r->degenerate}};
    c.emit(j.dump(2) + "\n");
    return kExitTight;
  }
  Vector th = c.theta_vec(fam);
  Tight t = tight_point(c, fam, th);
  StabilityOptions o;
  o.K = K;
  o.L = L;
  o.solver = c.settings().solver;
  StabilityReport rep = assess_stability(fam, th, *t.cert.x_hat, t.cert.lambda, o);
  json s = stability_to_json(rep);
  j["theta"] = theta_json(th);
  j["verdict"] = to_string(t.cert.verdict);
  j["radius_thm"] = s["radius_thm"];
  j["radius_cor"] = s["radius_cor"];
  j["nu2"] = s["nu2"];
  j["M"] = s["M"];
  c.emit(j.dump(2) + "\n");
  return t.cert.verdict == Verdict::certified_tight ? kExitTight : kExitInconclusive;
}

// "coord:min:max:steps", coordinates numbered from 1 like the CSV columns.
ScanAxis parse_axis(const std::string& s) {
  std::stringstream ss(s);
  std::string a, b, c, d;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c, ':') || !std::getline(ss, d))
    throw UsageError("axis must look like coord:min:max:steps");
  try {
    return {std::stol(a) - 1, std::stod(b), std::stod(c), std::stoi(d)};
  } catch (const std::exception&) {
    throw UsageError("axis must look like coord:min:max:steps");
  }
}

// "coord=value"
std::pair<Index, double> parse_fixed(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos) throw UsageError("fixed must look like coord=value");
  try {
    return {std::stol(s.substr(0, eq)) - 1, std::stod(s.substr(eq + 1))};
  } catch (const std::exception&) {
    throw UsageError("fixed must look like coord=value");
  }
}

// "coord=source^power" or "coord=scale*source^power"
DerivedCoord parse_derived(const std::string& s) {
  DerivedCoord d;
  auto eq = s.find('=');
  if (eq == std::string::npos) throw UsageError("derived must look like coord=source^power");
  std::string rhs = s.substr(eq + 1);
  try {
    d.coord = std::stol(s.substr(0, eq)) - 1;
    auto star = rhs.find('*');
    if (star != std::string::npos) {
      d.scale = std::stod(rhs.substr(0, star));
      rhs = rhs.substr(star + 1);
    }
    auto caret = rhs.find('^');
    d.source = std::stol(rhs.substr(0, caret)) - 1;
    if (caret != std::string::npos) d.power = std::stod(rhs.substr(caret + 1));
  } catch (const std::exception&) {
    throw UsageError("derived must look like coord=source^power");
  }
  return d;
}

struct ScanFlags {
  std::vector<std::string> axes, fixed, derived, bases;
  bool guaranteed = false;
};

int cmd_scan(const Common& c, const ScanFlags& f) {
  ParametricProblem fam = c.family();
  ScanConfig sc;
  if (f.axes.empty()) {
    for (const auto& a : c.cfg.value("axes", json::array()))
      sc.axes.push_back({a.at("coord").get<Index>() - 1, a.at("min").get<double>(), a.at("max").get<double>(),
                         a.at("steps").get<int>()});
  } else {
    for (const auto& a : f.axes) sc.axes.push_back(parse_axis(a));
  }
  if (f.fixed.empty()) {
    for (const auto& [k, v] : c.cfg.value("fixed", json::object()).items()) sc.fixed.push_back({std::stol(k) - 1, v.get<double>()});
  } else {
    for (const auto& s : f.fixed) sc.fixed.push_back(parse_fixed(s));
  }
  if (f.derived.empty()) {
    for (const auto& d : c.cfg.value("derived", json::array()))
      sc.derived.push_back({d.at("coord").get<Index>() - 1, d.at("source").get<Index>() - 1, d.value("power", 1.0),
                            d.value("scale", 1.0)});
  } else {
    for (const auto& s : f.derived) sc.derived.push_back(parse_derived(s));
  }
  if (f.bases.empty()) {
    for (const auto& b : c.cfg.value("base_points", json::array())) sc.base_points.push_back(to_vector(b.get<std::vector<double>>()));
  } else {
    for (const auto& b : f.bases) sc.base_points.push_back(to_vector(parse_list(b)));
  }
  sc.guaranteed_column = f.guaranteed || c.cfg.value("guaranteed", false);
  sc.use_oracle = !c.no_oracle;
  sc.reproducible = c.reproducible;
  sc.workers = c.workers();
  sc.settings = c.settings();
  try {
    sc.validate(fam.d);
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  auto rows = run_scan(fam, sc);
  std::ostringstream os;
  write_scan_csv(os, fam, sc, rows);
  c.emit(os.str());
  return 0;
}

int cmd_sweep(const Common& c, const std::string& sigmas, int trials, long long seed) {
  ParametricProblem fam = c.family();
  SweepConfig sc;
  if (!sigmas.empty())
    sc.sigmas = parse_list(sigmas);
  else
    sc.sigmas = c.cfg.value("sigmas", std::vector<double>{});
  if (sc.sigmas.empty()) throw UsageError("--sigmas is required");
  sc.trials = trials > 0 ? trials : c.cfg.value("trials", 1);
  sc.seed = static_cast<std::uint64_t>(seed >= 0 ? seed : c.cfg.value("seed", 0LL));
  sc.use_oracle = !c.no_oracle;
  sc.reproducible = c.reproducible;
  sc.workers = c.workers();
  sc.settings = c.settings();
  auto rows = run_noise_sweep(fam, sc);
  std::ostringstream os;
  write_sweep_csv(os, sc, rows);
  c.emit(os.str());
  return 0;
}

int cmd_dump_sdp(const Common& c) {
  ParametricProblem fam = c.family();
  Vector th = c.theta_vec(fam);
  std::ostringstream os;
  write_sdpa(os, build_relaxation(fam.instantiate(th)));
  c.emit(os.str());
  return 0;
}

int cmd_list() {
  for (const auto& e : registered_problems()) std::printf("%-24s %s [params: %s]\n", e.name.c_str(), e.summary.c_str(), e.params.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify zero duality gap and stability of SDP relaxations of parametric QCQPs"};
  app.require_subcommand(1);

  auto* certify = app.add_subcommand("certify", "certify tightness at one parameter");
  Common c_certify;
  c_certify.add(certify, true);

  std::optional<double> K, L;
  auto* stability = app.add_subcommand("stability", "regularity checks and stability radii at a tight parameter");
  Common c_stab;
  c_stab.add(stability, true);
  stability->add_option("--K", K, "Lipschitz constant of the multiplier map");
  stability->add_option("--L", L, "Lipschitz constant of the objective Hessian");

  auto* slater = app.add_subcommand("slater", "restricted Slater check at a tight parameter");
  Common c_slater;
  c_slater.add(slater, true);

  std::string ybar;
  auto* radius = app.add_subcommand("radius", "stability radius at a point of the variety or a tight parameter");
  Common c_radius;
  c_radius.add(radius, true);
  radius->add_option("--y", ybar, "point on the variety (nearest-point families)");
  radius->add_option("--K", K, "Lipschitz constant of the multiplier map");
  radius->add_option("--L", L, "Lipschitz constant of the objective Hessian");

  ScanFlags sf;
  auto* scan = app.add_subcommand("scan", "certify every point of a parameter grid, CSV output");
  Common c_scan;
  c_scan.add(scan, false);
  scan->add_option("--axis", sf.axes, "coord:min:max:steps (coordinates from 1)");
  scan->add_option("--fixed", sf.fixed, "coord=value");
  scan->add_option("--derived", sf.derived, "coord=source^power or coord=scale*source^power");
  scan->add_option("--base", sf.bases, "comma-separated point on the variety; adds the in_ball column");
  scan->add_flag("--guaranteed", sf.guaranteed, "add the guaranteed-region column");

  std::string sigmas;
  int trials = -1;
  long long seed = -1;
  auto* sweep = app.add_subcommand("sweep", "tightness against noise level, CSV output");
  Common c_sweep;
  c_sweep.add(sweep, false);
  sweep->add_option("--sigmas", sigmas, "comma-separated noise levels");
  sweep->add_option("--trials", trials, "trials per noise level");
  sweep->add_option("--seed", seed, "base seed");

  auto* list = app.add_subcommand("list-problems", "list registered problem families");

  auto* dump = app.add_subcommand("dump-sdp", "write the relaxation in SDPA sparse format");
  Common c_dump;
  c_dump.add(dump, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (list->parsed()) return cmd_list();
    Common* active = certify->parsed()    ? &c_certify
                     : stability->parsed() ? &c_stab
                     : slater->parsed()    ? &c_slater
                     : radius->parsed()    ? &c_radius
                     : scan->parsed()      ? &c_scan
                     : sweep->parsed()     ? &c_sweep
                                           : &c_dump;
    active->load();
    if (certify->parsed()) return cmd_certify(*active);
    if (stability->parsed()) return cmd_stability(*active, K, L, false);
    if (slater->parsed()) return cmd_stability(*active, K, L, true);
    if (radius->parsed()) return cmd_radius(*active, ybar, K, L);
    if (scan->parsed()) return cmd_scan(*active, sf);
    if (sweep->parsed()) return cmd_sweep(*active, sigmas, trials, seed);
    return cmd_dump_sdp(*active);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInconclusive;
  }
}
