#include "qstab/scan.hpp"

#include "qstab/kernels.hpp"
#include "qstab/report.hpp"
#include "qstab/stability.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <ostream>
#include <random>
#include <set>

namespace qstab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// Per-task settings: the pool is already parallel, so the Schur kernel stays serial.
CertifySettings task_settings(const CertifySettings& s, int workers) {
  CertifySettings t = s;
  if (workers > 1) t.solver.threads = 1;
  return t;
}

void run_tasks(Index count, int workers, const std::function<void(Index)>& body) {
  if (workers > 1)
    kernels::for_each_parallel(count, body, workers);
  else
    kernels::for_each_serial(count, body);
}

Vector affine_y(const Vector& x) { return x.tail(x.size() - 1) / x(0); }

}  // namespace

void ScanConfig::validate(Index d) const {
  if (axes.empty() || axes.size() > 2) throw InvalidInput("scan: need one or two axes");
  std::set<Index> seen;
  auto claim = [&](Index c, const char* what) {
    if (c < 0 || c >= d) throw InvalidInput(std::string("scan: ") + what + " coordinate out of range");
    if (!seen.insert(c).second) throw InvalidInput("scan: coordinate assigned twice");
  };
  for (const auto& a : axes) {
    if (a.steps < 2) throw InvalidInput("scan: each axis needs at least 2 steps");
    if (!std::isfinite(a.min) || !std::isfinite(a.max)) throw InvalidInput("scan: non-finite axis bounds");
    claim(a.coord, "axis");
  }
  for (const auto& [c, v] : fixed) {
    claim(c, "fixed");
    if (!std::isfinite(v)) throw InvalidInput("scan: non-finite fixed value");
  }
  for (const auto& dc : derived) {
    claim(dc.coord, "derived");
    if (dc.source < 0 || dc.source >= d) throw InvalidInput("scan: derived source out of range");
  }
  for (const auto& dc : derived)
    for (const auto& other : derived)
      if (dc.source == other.coord) throw InvalidInput("scan: derived coordinates cannot chain");
  if (static_cast<Index>(seen.size()) != d) throw InvalidInput("scan: every theta coordinate needs an axis, fixed or derived value");
  for (const auto& b : base_points)
    if (b.size() != d) throw InvalidInput("scan: base point has wrong length");
}

Index ScanConfig::rows() const {
  Index r = 1;
  for (const auto& a : axes) r *= a.steps;
  return r;
}

Vector ScanConfig::theta_at(Index row, Index d) const {
  Vector th = Vector::Zero(d);
  Index rest = row;
  for (std::size_t k = axes.size(); k-- > 0;) {
    th(axes[k].coord) = axes[k].value(static_cast<int>(rest % axes[k].steps));
    rest /= axes[k].steps;
  }
  for (const auto& [c, v] : fixed) th(c) = v;
  for (const auto& dc : derived) th(dc.coord) = dc.scale * std::pow(th(dc.source), dc.power);
  return th;
}

CertifySettings with_oracle(const ParametricProblem& fam, const Vector& theta, CertifySettings s, bool use_oracle) {
  if (use_oracle && fam.oracle) {
    if (auto o = fam.oracle(theta)) s.oracle_value = o->value;
  }
  return s;
}

std::vector<ScanRow> run_scan(const ParametricProblem& fam, const ScanConfig& cfg) {
  cfg.validate(fam.d);
  const Index n = cfg.rows();
  std::vector<ScanRow> rows(n);
  const CertifySettings base = task_settings(cfg.settings, cfg.workers);

  std::vector<double> base_radius;
  for (const auto& b : cfg.base_points) {
    auto r = corollary_radius_at(fam, b, cfg.settings.rank_tol);
    if (!r) throw InvalidInput("scan: base points need a nearest-point family");
    base_radius.push_back(r->value);
  }

  run_tasks(n, cfg.workers, [&](Index i) {
    ScanRow& row = rows[i];
    row.theta = cfg.theta_at(i, fam.d);
    std::optional<OracleResult> orc;
    if (fam.oracle && (cfg.use_oracle || cfg.guaranteed_column)) orc = fam.oracle(row.theta);
    CertifySettings s = base;
    if (cfg.use_oracle && orc) s.oracle_value = orc->value;
    try {
      row.cert = certify_gap(fam, row.theta, s);
    } catch (const std::exception& e) {
      row.cert = GapCertificate{};
      row.cert.warnings.push_back(e.what());
    }
    if (!cfg.base_points.empty()) {
      bool in = false;
      for (std::size_t k = 0; k < cfg.base_points.size(); ++k)
        in = in || (row.theta - cfg.base_points[k]).norm() < base_radius[k];
      row.in_ball = in;
    }
    if (cfg.guaranteed_column) {
      bool g = false;
      if (orc) {
        Vector ybar = affine_y(orc->x);
        auto r = corollary_radius_at(fam, ybar, cfg.settings.rank_tol);
        g = r && (row.theta - ybar).norm() < r->value;
      }
      row.guaranteed = g;
    }
  });
  return rows;
}

void write_scan_csv(std::ostream& os, const ParametricProblem& fam, const ScanConfig& cfg,
                    const std::vector<ScanRow>& rows) {
  if (!cfg.reproducible) os << "# " << fam.name << " scan " << timestamp() << "\n";
  for (Index k = 0; k < fam.d; ++k) os << "theta" << k + 1 << ",";
  os << "dval,pval_candidate,gap_rel,verdict,rank_S,nu2,solve_time";
  if (!cfg.base_points.empty()) os << ",in_ball";
  if (cfg.guaranteed_column) os << ",guaranteed";
  os << "\n";
  for (const auto& r : rows) {
    for (Index k = 0; k < r.theta.size(); ++k) os << format_number(r.theta(k)) << ",";
    os << format_number(r.cert.dval) << "," << format_number(r.cert.pval_candidate.value_or(kNaN)) << ","
       << format_number(r.cert.gap_rel.value_or(kNaN)) << "," << to_string(r.cert.verdict) << "," << r.cert.rank_S
       << "," << format_number(r.cert.nu2) << "," << format_number(cfg.reproducible ? 0.0 : r.cert.solve_seconds);
    if (r.in_ball) os << "," << (*r.in_ball ? 1 : 0);
    if (r.guaranteed) os << "," << (*r.guaranteed ? 1 : 0);
    os << "\n";
  }
}

std::vector<SweepRow> run_noise_sweep(const ParametricProblem& fam, const SweepConfig& cfg) {
  if (!fam.ground_truth) throw InvalidInput("sweep: problem has no ground-truth sampler");
  if (cfg.trials < 1) throw InvalidInput("sweep: trials must be positive");
  if (cfg.sigmas.empty()) throw InvalidInput("sweep: empty sigma grid");
  for (double s : cfg.sigmas)
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidInput("sweep: sigma must be finite and non-negative");

  // Common random numbers: trial t uses the same truth and direction for all sigma.
  std::vector<GroundTruth> truth(cfg.trials);
  std::vector<Vector> dir(cfg.trials);
  for (int t = 0; t < cfg.trials; ++t) {
    std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(t)};
    std::mt19937_64 rng(seq);
    truth[t] = fam.ground_truth(rng());
    std::normal_distribution<double> nd(0.0, 1.0);
    dir[t] = Vector(fam.d);
    for (Index k = 0; k < fam.d; ++k) dir[t](k) = nd(rng);
  }

  const Index S = static_cast<Index>(cfg.sigmas.size());
  struct Outcome {
    bool tight = false;
    double gap = kNaN;
    double err = kNaN;
  };
  std::vector<Outcome> out(S * cfg.trials);
  const CertifySettings base = task_settings(cfg.settings, cfg.workers);
  run_tasks(S * cfg.trials, cfg.workers, [&](Index i) {
    const Index si = i / cfg.trials, t = i % cfg.trials;
    Vector theta = truth[t].theta + cfg.sigmas[si] * dir[t];
    try {
      GapCertificate c = certify_gap(fam, theta, with_oracle(fam, theta, base, cfg.use_oracle));
      out[i].tight = c.verdict == Verdict::certified_tight;
      if (c.gap_rel && std::isfinite(*c.gap_rel)) out[i].gap = *c.gap_rel;
      if (c.x_hat) out[i].err = (*c.x_hat - truth[t].x).norm();
    } catch (const std::exception&) {
    }
  });

  std::vector<SweepRow> rows;
  for (Index si = 0; si < S; ++si) {
    SweepRow r;
    r.sigma = cfg.sigmas[si];
    r.trials = cfg.trials;
    int tight = 0, ngap = 0, nerr = 0;
    double gsum = 0.0, esum = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
      const Outcome& o = out[si * cfg.trials + t];
      tight += o.tight;
      if (!std::isnan(o.gap)) {
        gsum += o.gap;
        ++ngap;
      }
      if (!std::isnan(o.err)) {
        esum += o.err;
        ++nerr;
      }
    }
    r.tight_fraction = static_cast<double>(tight) / cfg.trials;
    r.mean_gap_rel = ngap ? gsum / ngap : kNaN;
    r.mean_recovery_error = nerr ? esum / nerr : kNaN;
    rows.push_back(r);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  if (!cfg.reproducible) os << "# sweep " << timestamp() << "\n";
  os << "sigma,trials,tight_fraction,mean_gap_rel,mean_recovery_error\n";
  for (const auto& r : rows)
    os << format_number(r.sigma) << "," << r.trials << "," << format_number(r.tight_fraction) << ","
       << format_number(r.mean_gap_rel) << "," << format_number(r.mean_recovery_error) << "\n";
}

}  // namespace qstab
