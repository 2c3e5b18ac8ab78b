#include "qstab/certify.hpp"

#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <limits>

namespace qstab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::certified_tight: return "certified_tight";
    case Verdict::tight_but_degenerate: return "tight_but_degenerate";
    case Verdict::gap_positive: return "gap_positive";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

CorankCheck check_corank_one(const SymMatrix& Q, double rank_tol) {
  Vector ev = sym_eigenvalues(Q);
  CorankCheck c;
  if (ev.size() == 0) return c;
  const double thr = zero_threshold(ev.cwiseAbs().maxCoeff(), rank_tol);
  c.nu1 = ev(0);
  c.nu2 = ev.size() > 1 ? ev(1) : std::numeric_limits<double>::infinity();
  c.is_corank_one = std::abs(c.nu1) <= thr && c.nu2 > thr;
  return c;
}

namespace {

void fill_spectrum(GapCertificate& cert, const SymMatrix& Q, double rank_tol) {
  cert.corank_Q = 0;
  if (!Q.all_finite()) return;
  Vector ev = sym_eigenvalues(Q);
  const double thr = zero_threshold(ev.cwiseAbs().maxCoeff(), rank_tol);
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) <= thr) ++cert.corank_Q;
  CorankCheck cc = check_corank_one(Q, rank_tol);
  cert.nu1 = cc.nu1;
  cert.nu2 = cc.nu2;
  cert.corank_one = cc.is_corank_one;
  cert.dual_feasible = ev(0) >= -thr;
}

}  // namespace

KktPoint polish_kkt(const HomQCQP& p, const Vector& x0, const Vector& lambda0, int max_iter) {
  const Index N = p.N, m = p.m();
  auto residual = [&](const Vector& x, const Vector& lam) {
    Vector F(N + m);
    F.head(N) = lagrangian_hessian(p, lam).mat() * x;
    for (Index i = 0; i < m; ++i) F(N + i) = p.constraints[i](x);
    return F;
  };
  KktPoint best{x0, lambda0, false, residual(x0, lambda0).lpNorm<Eigen::Infinity>()};
  if (!std::isfinite(best.residual)) return best;
  const double start = best.residual;
  Vector x = x0, lam = lambda0;
  for (int it = 0; it < max_iter; ++it) {
    // d/dx (Q x) = Q, d/dlambda_i (Q x) = H^i x, d/dx h_i = 2 (H^i x)^T
    Matrix Jac = Matrix::Zero(N + m, N + m);
    Jac.topLeftCorner(N, N) = lagrangian_hessian(p, lam).mat();
    for (Index i = 0; i < m; ++i) {
      Vector Hx = p.constraints[i].H.mat() * x;
      Jac.block(0, N + i, N, 1) = Hx;
      Jac.block(N + i, 0, 1, N) = 2.0 * Hx.transpose();
    }
    // threshold has to be in place before compute(), Z is built for that rank
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(N + m, N + m);
    cod.setThreshold(1e-10);
    cod.compute(Jac);
    Vector step = cod.solve(residual(x, lam));
    x -= step.head(N);
    lam -= step.tail(m);
    const double r = residual(x, lam).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(r)) break;
    if (r < best.residual) {
      best = {x, lam, true, r};
    } else {
      break;
    }
    if (r <= 1e-15 * (1.0 + x.squaredNorm())) break;
  }
  best.improved = best.residual < start;
  return best;
}

GapCertificate certify_instance(const HomQCQP& p, const CertifySettings& settings) {
  const auto t0 = std::chrono::steady_clock::now();
  GapCertificate cert;
  p.validate();
  cert.lambda = Vector::Zero(p.m());

  SDPResult res;
  try {
    res = solve_sdp(build_relaxation(p), settings.solver);
  } catch (const std::exception& e) {
    cert.warnings.push_back(std::string("solver error: ") + e.what());
    cert.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cert;
  }
  cert.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  cert.solver_status = res.status;
  cert.iterations = res.iterations;
  cert.residuals = res.residuals;
  cert.dval = res.dval;
  cert.pval_relaxation = res.pval;
  cert.lambda = -res.y;

  const bool solved = res.status == SolveStatus::optimal;
  if (res.S.n() == p.N && res.S.all_finite()) cert.rank_S = psd_rank(res.S, settings.ratio_tol);

  SymMatrix Q = lagrangian_hessian(p, cert.lambda);
  fill_spectrum(cert, Q, settings.rank_tol);

  if (solved) {
    cert.x_hat = extract_rank_one(res.S, settings.ratio_tol, p.hom_index);
    // Interior-point multipliers are loose along directions the dual objective
    // ignores, so polish (x, lambda) on the KKT equations before judging.
    if (cert.x_hat) {
      KktPoint kp = polish_kkt(p, *cert.x_hat, cert.lambda);
      if (kp.improved) {
        cert.x_hat = kp.x;
        cert.lambda = kp.lambda;
        Q = lagrangian_hessian(p, cert.lambda);
        fill_spectrum(cert, Q, settings.rank_tol);
      }
    }
    if (cert.x_hat) {
      cert.kkt = kkt_residuals(p, *cert.x_hat, cert.lambda);
      cert.primal_feasible = cert.kkt.feas <= settings.feas_tol;
      cert.multiplier = cert.kkt.stat <= settings.feas_tol;
      if (cert.primal_feasible) cert.pval_candidate = p.objective(*cert.x_hat);
    }
  }
  if (!cert.pval_candidate && settings.oracle_value) {
    cert.pval_candidate = settings.oracle_value;
    cert.oracle_used = true;
  }

  if (cert.pval_candidate) {
    if (solved) {
      cert.gap_abs = *cert.pval_candidate - cert.dval;
      cert.gap_rel = *cert.gap_abs / (1.0 + std::abs(cert.dval));
    } else if (res.status == SolveStatus::dual_infeasible && cert.oracle_used) {
      // (D) infeasible: its value is -infinity.
      cert.gap_abs = std::numeric_limits<double>::infinity();
      cert.gap_rel = std::numeric_limits<double>::infinity();
    }
  }

  if (solved && cert.x_hat && cert.primal_feasible && cert.gap_rel && *cert.gap_rel <= settings.gap_tol) {
    cert.verdict = (cert.corank_one && cert.multiplier && cert.dual_feasible) ? Verdict::certified_tight
                                                                              : Verdict::tight_but_degenerate;
  } else if (cert.gap_rel && *cert.gap_rel > 10.0 * settings.gap_tol) {
    cert.verdict = Verdict::gap_positive;
  } else {
    cert.verdict = Verdict::inconclusive;
  }
  return cert;
}

GapCertificate certify_gap(const ParametricProblem& fam, const Vector& theta, const CertifySettings& settings) {
  HomQCQP p = fam.instantiate(theta);
  GapCertificate cert = certify_instance(p, settings);
  for (auto& w : fam.warnings(theta)) cert.warnings.push_back(std::move(w));
  return cert;
}

}  // namespace qstab
