// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include "qstab/certify.hpp"
#include "qstab/problems.hpp"
#include "qstab/registry.hpp"
#include "qstab/scan.hpp"
#include "qstab/sdp.hpp"
#include "qstab/stability.hpp"

#include "oracles.hpp"

#include <Eigen/SVD>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace qstab;

namespace {

// Collects failures; the first few are kept for the report line.
struct Outcome {
  int failures = 0;
  std::vector<std::string> notes;
  std::string summary;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures;
    if (notes.size() < 4) notes.push_back(what);
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

std::vector<Index> z_block(const ParametricProblem& fam) {
  std::vector<Index> z{*fam.layout.hom_index};
  for (Index a : fam.layout.aux) z.push_back(a);
  return z;
}

// ---------------------------------------------------------------------------

Outcome solver_soundness() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> Nd(2, 8), md(1, 6);
  const SolverSettings s;
  int optimal = 0;
  for (int k = 0; k < 100; ++k) {
    const Index N = Nd(rng), m = md(rng);
    oracle::RandomSdp inst = oracle::random_feasible_sdp(rng, N, m, false);
    SDPResult r = solve_sdp(inst.prob, s);
    const std::string tag = "random #" + std::to_string(k);
    o.expect(r.status == SolveStatus::optimal, tag + " status " + to_string(r.status));
    if (r.status != SolveStatus::optimal) continue;
    ++optimal;
    o.expect(r.pval >= r.dval - 1e-6 * (1.0 + std::abs(r.pval)), tag + " weak duality");
    o.expect(r.residuals.primal_feas <= 1e-6 && r.residuals.dual_feas <= 1e-6 && r.residuals.rel_gap <= 1e-6,
             tag + " residuals");
    o.expect(min_eig(r.S) >= -1e-6 && min_eig(r.Z) >= -1e-6, tag + " cone");
  }
  int diag = 0;
  for (int k = 0; k < 40; ++k) {
    const Index n = 2 + k % 7, m = 1 + k % std::min<Index>(n, 4);
    oracle::RandomSdp inst = oracle::random_feasible_sdp(rng, n, m, true);
    Matrix A(m, n);
    for (Index i = 0; i < m; ++i) A.row(i) = inst.prob.A[i].mat().diagonal().transpose();
    auto lp = oracle::lp_vertex_min(A, inst.prob.b, inst.prob.C.mat().diagonal());
    SDPResult r = solve_sdp(inst.prob, s);
    const std::string tag = "diagonal #" + std::to_string(k);
    o.expect(lp.has_value() && r.status == SolveStatus::optimal, tag + " status");
    if (!lp || r.status != SolveStatus::optimal) continue;
    ++diag;
    o.expect(std::abs(r.pval - *lp) <= 1e-6 * (1.0 + std::abs(*lp)), tag + fmt(" pval %.3e vs lp %.3e", r.pval, *lp));
  }
  o.summary = std::to_string(optimal) + "/100 random optimal, " + std::to_string(diag) + "/40 diagonal vs LP";
  return o;
}

// certified_tight, small gap, recovery of x_bar
void expect_tight(Outcome& o, const ParametricProblem& fam, const Vector& th, const Vector& xbar, const std::string& tag) {
  GapCertificate c = certify_gap(fam, th);
  o.expect(c.verdict == Verdict::certified_tight, tag + " verdict " + to_string(c.verdict));
  o.expect(c.gap_rel && std::abs(*c.gap_rel) <= 1e-6, tag + " gap_rel");
  o.expect(c.x_hat && (*c.x_hat - xbar).norm() <= 1e-5,
           tag + (c.x_hat ? fmt(" recovery %.2e", (*c.x_hat - xbar).norm()) : std::string(" no x_hat")));
}

Outcome on_variety_tightness() {
  Outcome o;
  int count = 0;
  ParametricProblem tc = twisted_cubic();
  for (int k = 0; k < 20; ++k) {
    const double t = -2.0 + 4.0 * k / 19.0;
    expect_tight(o, tc, vec({t, t * t, t * t * t}), vec({1, t, t * t, t * t * t}), fmt("twisted cubic t=%.3f", t));
    ++count;
  }
  ParametricProblem cc = cuspidal_cubic();
  for (int k = 0; k < 8; ++k) {
    const double t = 0.25 + 1.75 * k / 7.0;
    expect_tight(o, cc, vec({t * t, t * t * t}), vec({1, t, t * t, t * t * t}), fmt("cuspidal t=%.3f", t));
    ++count;
  }
  const std::vector<ParametricProblem> fams = {
      rank_one_approximation({2, 2}), rank_one_approximation({3, 3}),
      rotation_sync(GraphSpec{3, {{0, 1}, {1, 2}, {0, 2}}}, 2), se_sync(GraphSpec{3, {{0, 1}, {1, 2}}}, 2),
      edm_1d(GraphSpec{4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}})};
  for (const auto& fam : fams)
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GroundTruth g = fam.ground_truth(seed);
      if (g.degenerate) continue;
      expect_tight(o, fam, g.theta, g.x, fam.name + " seed " + std::to_string(seed));
      ++count;
    }
  o.summary = std::to_string(count) + " noiseless instances";
  return o;
}

Outcome non_informative_dual() {
  Outcome o;
  ParametricProblem fam = twisted_cubic_bad();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ud(-1.5, 1.5);
  int far = 0;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    Vector th(3);
    for (auto& v : th) v = ud(rng);
    CertifySettings s;
    s.oracle_value = oracle::twisted_cubic_dist2(th);
    GapCertificate c = certify_gap(fam, th, s);
    worst = std::max(worst, std::abs(c.dval));
    o.expect(std::abs(c.dval) <= 1e-6, fmt("dval %.3e", c.dval));
    if (*s.oracle_value >= 0.1) {
      ++far;
      o.expect(c.verdict == Verdict::gap_positive, "verdict " + to_string(c.verdict) + fmt(" at dist2 %.3f", *s.oracle_value));
    }
  }
  o.summary = fmt("max |dval| %.2e, ", worst) + std::to_string(far) + " points with dist2 >= 0.1";
  return o;
}

Outcome corollary_radius_value() {
  Outcome o;
  ParametricProblem fam = twisted_cubic();
  AffineProblem ap = fam.affine_view(Vector::Zero(3));
  Matrix J(2, 3);
  std::vector<SymMatrix> hess;
  for (int i = 0; i < 2; ++i) {
    J.row(i) = ap.constraints[i].gradient(Vector::Zero(3)).transpose();
    hess.push_back(ap.constraints[i].hessian());
  }
  AcqResult acq = check_acq(J, 1);
  const double M = operator_norm_M(hess);
  auto r = corollary_radius_at(fam, Vector::Zero(3));
  o.expect(acq.holds && std::abs(acq.sigma_s - 1.0) <= 1e-9, fmt("sigma_2 %.12g", acq.sigma_s));
  o.expect(std::abs(M - 1.0) <= 1e-9, fmt("M %.12g", M));
  o.expect(r && std::abs(r->value - 0.5) <= 1e-9, r ? fmt("radius %.12g", r->value) : "no radius");
  StabilityReport rep = assess_stability(fam, Vector::Zero(3), vec({1, 0, 0, 0}), Vector::Zero(3));
  o.expect(rep.radius_cor && std::abs(rep.radius_cor->value - 0.5) <= 1e-9, "assess_stability radius");
  o.summary = fmt("sigma_2 %.12g, M %.12g, radius %.12g", acq.sigma_s, M, r ? r->value : NAN);
  return o;
}

// Corollary radius at (t, t^2, t^3) for f = (y2 - y1^2, y3 - y1 y2). The constraint
// Hessians are diag(-2,0,0) and -(e1e2^T + e2e1^T), so mu -> (1/2) sum mu_i Hess f_i
// has Frobenius norm sqrt(mu1^2 + mu2^2 / 2) and M = 1.
double twisted_cubic_radius(double t) {
  Matrix J(2, 3);
  J << -2 * t, 1, 0, -t * t, -t, 1;
  return Eigen::JacobiSVD<Matrix>(J).singularValues()(1) / 2.0;
}

Outcome inner_approximation() {
  Outcome o;
  ParametricProblem fam = twisted_cubic();
  ScanConfig c;
  c.axes = {{0, -1.0, 1.0, 41}, {2, -1.5, 1.5, 41}};
  c.derived = {{1, 0, 2.0, 1.0}};
  c.workers = 8;
  c.reproducible = true;
  c.guaranteed_column = true;
  auto rows = run_scan(fam, c);
  int inside = 0, tight = 0, disagree = 0;
  for (const auto& r : rows) {
    auto [t, d2] = oracle::twisted_cubic_nearest_t(r.theta);
    const double rad = twisted_cubic_radius(t);
    const bool in = std::sqrt(d2) < rad;
    if (r.cert.verdict == Verdict::certified_tight) ++tight;
    if (r.guaranteed && *r.guaranteed != in) ++disagree;
    if (!in) continue;
    ++inside;
    o.expect(r.cert.verdict == Verdict::certified_tight,
             fmt("theta (%.3f, %.3f, %.3f) ", r.theta(0), r.theta(1), r.theta(2)) + to_string(r.cert.verdict));
  }
  o.expect(inside > 0, "empty guaranteed region");
  o.summary = std::to_string(rows.size()) + " grid points, " + std::to_string(inside) + " guaranteed, " +
              std::to_string(tight) + " tight, " + std::to_string(disagree) + " disagree with the library column";
  return o;
}

Outcome restricted_slater_fixtures() {
  Outcome o;
  ParametricProblem cc = cuspidal_cubic();
  for (double t : {0.5, 1.0, 2.0}) {
    const Vector th = vec({t * t, t * t * t}), x = vec({1, t, t * t, t * t * t});
    HomQCQP p = cc.instantiate(th);
    StabilityReport rep = assess_stability(cc, th, x, Vector::Zero(p.m()));
    o.expect(rep.rs.holds, fmt("cuspidal t=%.1f rs", t));
    SymMatrix A = restriction_matrix_A(p, vec({0, t, -t * t, -1}), z_block(cc), nearest_point_shift(cc.layout, x));
    const double lhs = A.quad(vec({t, -1})), rhs = t * t * std::pow(t * t + 1, 2);
    o.expect(std::abs(lhs - rhs) <= 1e-8, fmt("cuspidal t=%.1f zeta^T A zeta %.12g vs %.12g", t, lhs, rhs));
  }
  ParametricProblem bad = twisted_cubic_bad();
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    GroundTruth g = bad.ground_truth(seed);
    HomQCQP p = bad.instantiate(g.theta);
    RestrictedSlater rs = restricted_slater(p, g.x, lagrangian_hessian(p, Vector::Zero(p.m())));
    o.expect(!rs.holds && !rs.inconclusive, "bad formulation rs");
  }
  for (const auto& fam : {twisted_cubic(), rank_one_approximation({2, 2})}) {
    GroundTruth g = fam.ground_truth(3);
    HomQCQP p = fam.instantiate(g.theta);
    RestrictedSlater rs = restricted_slater(p, g.x, lagrangian_hessian(p, Vector::Zero(p.m())));
    o.expect(rs.holds && rs.V_dim == 0, fam.name + " not vacuous");
  }
  for (double t : {0.0, 1.0}) {
    const Vector th = vec({t * t, t * t * t}), x = vec({1, t, t * t, t * t * t});
    HomQCQP p = cc.instantiate(th);
    BranchPoint bp = branch_point_check(constraint_jacobian(p, x), lagrangian_hessian(p, Vector::Zero(p.m())));
    o.expect(bp.is_branch_point == (t == 0.0), fmt("branch point at t=%.0f", t));
  }
  o.summary = "cuspidal t in {0.5,1,2}, 3 bad-formulation points, 2 vacuous cases, branch points t=0/1";
  return o;
}

Outcome edm_fixtures() {
  Outcome o;
  ParametricProblem fam = edm_1d(GraphSpec{4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}});
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  double worst_mu = 0.0, worst_A = 0.0;
  for (int k = 0; k < 20; ++k) {
    double t[4];
    for (auto& v : t) v = nd(rng);
    auto T = [&](int i, int j) { return t[j] - t[i]; };
    const Vector th = vec({T(0, 2) * T(0, 2), T(0, 3) * T(0, 3), T(1, 2) * T(1, 2), T(1, 3) * T(1, 3), T(2, 3) * T(2, 3)});
    Vector x(7);
    x << 1, T(0, 1) * T(0, 1), th;
    HomQCQP p = fam.instantiate(th);
    const Vector mu = vec({0, -T(0, 3) * T(1, 3) * T(2, 3), T(0, 2) * T(1, 2) * T(2, 3), -T(0, 1) * T(1, 2) * T(1, 3),
                           T(0, 1) * T(0, 2) * T(0, 3)});
    double sc = 1.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) sc = std::max(sc, std::abs(T(i, j)));
    const double r_mu = (mu.transpose() * constraint_jacobian(p, x)).norm() / std::pow(sc, 5);
    worst_mu = std::max(worst_mu, r_mu);
    o.expect(r_mu <= 1e-8, fmt("mu^T grad h %.3e", r_mu));
    SymMatrix A = restriction_matrix_A(p, mu, z_block(fam), nearest_point_shift(fam.layout, x));
    const double a = T(0, 1) * T(0, 1), f = T(2, 3) * T(2, 3) * (t[0] + t[1] - t[2] - t[3]);
    Matrix E(2, 2);
    E << f * a * a, -f * a, -f * a, f;
    const double r_A = (A.mat() - E).cwiseAbs().maxCoeff() / std::max(1.0, E.cwiseAbs().maxCoeff());
    worst_A = std::max(worst_A, r_A);
    o.expect(r_A <= 1e-8, fmt("A(mu) mismatch %.3e", r_A));
  }
  int noiseless = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GroundTruth g = fam.ground_truth(seed);
    if (g.degenerate) continue;
    ++noiseless;
    o.expect(certify_gap(fam, g.theta).verdict == Verdict::certified_tight, "noiseless seed " + std::to_string(seed));
  }
  SweepConfig sc;
  sc.sigmas = {1e-3};
  sc.trials = 100;
  sc.seed = 42;
  sc.workers = 8;
  auto rows = run_noise_sweep(fam, sc);
  const double frac = rows.at(0).tight_fraction;
  o.expect(frac >= 0.95, fmt("noisy tight fraction %.2f", frac));
  o.summary = fmt("max mu residual %.1e, max A residual %.1e, sigma=1e-3 tight fraction %.2f", worst_mu, worst_A, frac) +
              ", " + std::to_string(noiseless) + " noiseless tight checks";
  return o;
}

Outcome sos_behavior() {
  Outcome o;
  ParametricProblem sx = sos_binary_sextic();
  GapCertificate a = certify_gap(sx, vec({1.0}));
  o.expect(a.solver_status == SolveStatus::optimal && std::abs(a.dval) <= 1e-6, fmt("theta=1 dval %.3e", a.dval));
  GapCertificate b = certify_gap(sx, vec({-0.1}));
  o.expect(b.solver_status == SolveStatus::dual_infeasible, "theta=-0.1 status " + to_string(b.solver_status));
  ParametricProblem q = sos_univariate_quartic();
  GapCertificate c = certify_gap(q, vec({4.0}));
  o.expect(std::abs(c.dval + 3.0) <= 1e-6, fmt("quartic value %.9g", c.dval));
  double z = NAN;
  // x is indexed by the monomials (1, z, z^2)
  const Index iz = monomial_basis(1, 2).index_of({1});
  if (c.x_hat && iz >= 0) z = (*c.x_hat)(iz) / (*c.x_hat)(*q.layout.hom_index);
  o.expect(std::abs(z - 1.0) <= 1e-4, fmt("quartic z %.9g", z));
  o.summary = fmt("sextic theta=1 dval %.2e, theta=-0.1 ", a.dval) + to_string(b.solver_status) +
              fmt(", quartic value %.9g at z %.9g", c.dval, z);
  return o;
}

// A psd with kernel K; B made definite on K with the requested sign.
std::pair<SymMatrix, SymMatrix> finsler_pair(std::mt19937_64& rng, bool satisfy) {
  std::uniform_int_distribution<int> nd(2, 6);
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  const Index n = nd(rng);
  const Index k = std::uniform_int_distribution<Index>(1, n - 1)(rng);
  Eigen::HouseholderQR<Matrix> qr(oracle::gaussian(rng, n, n));
  const Matrix U = qr.householderQ();
  Vector d = Vector::Zero(n);
  for (Index i = k; i < n; ++i) d(i) = pos(rng);
  SymMatrix A(U * d.asDiagonal() * U.transpose());
  SymMatrix B = oracle::random_sym(rng, n);
  const Matrix K = U.leftCols(k);
  const Vector ev = sym_eigenvalues(SymMatrix(K.transpose() * B.mat() * K));
  const double shift = satisfy ? std::max(0.0, -ev(0)) + pos(rng) : -(std::max(0.0, ev(k - 1)) + pos(rng));
  B = SymMatrix(B.mat() + shift * K * K.transpose());
  return {A, B};
}

Outcome finsler_properties() {
  Outcome o;
  std::mt19937_64 rng(9);
  int found = 0, thrown = 0;
  for (int k = 0; k < 50; ++k) {
    auto [A, B] = finsler_pair(rng, true);
    try {
      FinslerResult r = finsler_perturb(A, B);
      o.expect(r.found, "satisfying pair not perturbed");
      if (!r.found) continue;
      ++found;
      o.expect(r.t > 0 && min_eig(SymMatrix(A.mat() + r.t * B.mat())) > 0, "A + tB not positive definite");
    } catch (const FinslerHypothesisViolated&) {
      o.expect(false, "satisfying pair rejected");
    }
  }
  for (int k = 0; k < 50; ++k) {
    auto [A, B] = finsler_pair(rng, false);
    try {
      finsler_perturb(A, B);
      o.expect(false, "violating pair accepted");
    } catch (const FinslerHypothesisViolated&) {
      ++thrown;
    }
  }
  ParametricProblem cc = cuspidal_cubic();
  HomQCQP p = cc.instantiate(vec({1, 1}));
  MultiplierPerturbation mp = perturb_multiplier(p, vec({1, 1, 1, 1}), Vector::Zero(4), vec({0, 1, -1, -1}));
  const Vector ev = sym_eigenvalues(lagrangian_hessian(p, mp.lambda));
  const double tol = 1e-9 * std::max(1.0, ev(ev.size() - 1));
  o.expect(mp.corank_one && mp.t > 0 && mp.t <= 1, fmt("perturbation t %.3e", mp.t));
  o.expect(ev(0) >= -tol && std::abs(ev(0)) <= tol && ev(1) > tol, fmt("eigenvalues %.3e %.3e", ev(0), ev(1)));
  o.summary = std::to_string(found) + "/50 perturbed, " + std::to_string(thrown) + "/50 rejected, " +
              fmt("cuspidal t %.3e nu2 %.3e", mp.t, ev(1));
  return o;
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(QCQP_STAB_EXE) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return "<popen failed>";
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = pclose(p);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) out += "<exit " + std::to_string(status) + ">";
  return out;
}

Outcome determinism() {
  Outcome o;
  ParametricProblem tc = twisted_cubic();
  auto scan = [&](int workers) {
    ScanConfig c;
    c.axes = {{0, -1.0, 1.0, 9}, {2, -1.5, 1.5, 9}};
    c.derived = {{1, 0, 2.0, 1.0}};
    c.workers = workers;
    c.reproducible = true;
    c.guaranteed_column = true;
    std::ostringstream os;
    write_scan_csv(os, tc, c, run_scan(tc, c));
    return os.str();
  };
  const std::string s1 = scan(1);
  o.expect(s1 == scan(1), "scan rerun");
  o.expect(s1 == scan(8), "scan 8 workers");
  for (const char* name : {"rotation-sync", "edm-1d"}) {
    ParametricProblem fam = make_problem(name);
    auto sweep = [&](int workers) {
      SweepConfig c;
      c.sigmas = {0.0, 1e-3, 0.05};
      c.trials = 8;
      c.seed = 5;
      c.workers = workers;
      c.reproducible = true;
      std::ostringstream os;
      write_sweep_csv(os, c, run_noise_sweep(fam, c));
      return os.str();
    };
    const std::string w1 = sweep(1);
    o.expect(w1 == sweep(1), std::string(name) + " sweep rerun");
    o.expect(w1 == sweep(8), std::string(name) + " sweep 8 workers");
  }
  const std::string scan_args =
      "scan --problem twisted-cubic --axis 1:-1:1:7 --axis 3:-1.5:1.5:7 --derived 2=1^2 --guaranteed --reproducible";
  const std::string sweep_args = "sweep --problem rotation-sync --sigmas 0,0.02 --trials 6 --seed 11 --reproducible";
  const std::string a = run_cli(scan_args + " --threads 1");
  o.expect(a.rfind("theta1", 0) == 0, "cli scan output");
  o.expect(a == run_cli(scan_args + " --threads 1") && a == run_cli(scan_args + " --threads 8"), "cli scan");
  const std::string b = run_cli(sweep_args + " --threads 1");
  o.expect(b.rfind("sigma", 0) == 0, "cli sweep output");
  o.expect(b == run_cli(sweep_args + " --threads 8"), "cli sweep");
  o.summary = "library and CLI scan/sweep reruns across 1 and 8 workers";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 means no runtime limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> all = {
      {1, "solver soundness", 30, solver_soundness},
      {2, "on-variety tightness", 60, on_variety_tightness},
      {3, "non-informative dual", 0, non_informative_dual},
      {4, "corollary radius value", 0, corollary_radius_value},
      {5, "inner approximation", 300, inner_approximation},
      {6, "restricted Slater fixtures", 0, restricted_slater_fixtures},
      {7, "EDM fixtures", 0, edm_fixtures},
      {8, "SOS behavior", 0, sos_behavior},
      {9, "Finsler and perturbation", 0, finsler_properties},
      {10, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) o.expect(false, fmt("runtime %.1f s over %.0f s", secs, c.budget_s));
    const bool pass = o.failures == 0;
    failed += pass ? 0 : 1;
    std::printf("criterion %2d %s  %-28s %7.2f s  %s\n", c.id, pass ? "PASS" : "FAIL", c.name, secs, o.summary.c_str());
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
