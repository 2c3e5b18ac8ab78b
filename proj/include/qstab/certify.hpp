#pragma once

#include "qstab/sdp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qstab {

enum class Verdict { certified_tight, tight_but_degenerate, gap_positive, inconclusive };
std::string to_string(Verdict v);

struct CertifySettings {
  SolverSettings solver;
  double feas_tol = 1e-6;   // absolute, on max_i |h_i(x)| and ||Q(lambda) x||
  double gap_tol = 1e-6;    // relative to 1 + |dval|
  double rank_tol = kRankTol;
  double ratio_tol = 1e-6;  // rank-one extraction
  std::optional<double> oracle_value;
};

struct CorankCheck {
  bool is_corank_one = false;
  double nu1 = 0.0;
  double nu2 = 0.0;
};
CorankCheck check_corank_one(const SymMatrix& Q, double rank_tol = kRankTol);

struct GapCertificate {
  Verdict verdict = Verdict::inconclusive;
  SolveStatus solver_status = SolveStatus::numerical_failure;
  int iterations = 0;
  SDPResiduals residuals;
  double dval = 0.0;
  double pval_relaxation = 0.0;
  std::optional<double> pval_candidate;
  std::optional<double> gap_abs;
  std::optional<double> gap_rel;
  Vector lambda;  // lambda = -y
  Index rank_S = 0;
  Index corank_Q = 0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  std::optional<Vector> x_hat;
  // The four checks of the zero-gap lemma at (x_hat, lambda).
  bool primal_feasible = false;
  bool multiplier = false;
  bool dual_feasible = false;
  bool corank_one = false;
  KktResiduals kkt;
  bool oracle_used = false;
  std::vector<std::string> warnings;
  double solve_seconds = 0.0;
};

// Gauss-Newton on Q(lambda) x = 0, h(x) = 0 with minimum-norm steps, so the
// multiplier stays near the starting one when it is not unique.
struct KktPoint {
  Vector x;
  Vector lambda;
  bool improved = false;
  double residual = 0.0;  // max-norm of the KKT equations
};
KktPoint polish_kkt(const HomQCQP& p, const Vector& x0, const Vector& lambda0, int max_iter = 8);

GapCertificate certify_instance(const HomQCQP& p, const CertifySettings& settings = {});
GapCertificate certify_gap(const ParametricProblem& fam, const Vector& theta, const CertifySettings& settings = {});

}  // namespace qstab
