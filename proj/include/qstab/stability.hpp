#pragma once

#include "qstab/certify.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace qstab {

struct AcqResult {
  Index s = 0;            // codimension n - dim_Y
  double sigma_s = 0.0;   // s-th largest singular value (infinite when s = 0)
  double sigma_next = 0.0;
  bool holds = false;
};
AcqResult check_acq(const Matrix& J, Index dim_Y, double rank_tol = kRankTol);

// Norm of mu -> (1/2) sum mu_i H^i from l2 to Frobenius.
double operator_norm_M(const std::vector<SymMatrix>& hessians);

enum class RadiusMode { theorem, corollary };

struct RadiusInputs {
  double nu2 = 0.0;
  std::optional<double> K;
  std::optional<double> L;
  double M = 0.0;
  std::optional<double> sigma_s;
};

struct Radius {
  double value = 0.0;
  bool degenerate = false;  // denominator vanished, value is +infinity
};
Radius stability_radius(const RadiusInputs& in, RadiusMode mode);

struct RestrictedSlater {
  Vector mu_star;
  double t_star = 0.0;
  bool holds = false;
  Index V_dim = 0;
  bool inconclusive = false;
};
// V = ker Qbar intersected with the orthogonal complement of xbar.
Matrix restricted_kernel_basis(const SymMatrix& Qbar, const Vector& xbar, double rank_tol = kRankTol);
RestrictedSlater restricted_slater(const HomQCQP& p, const Vector& xbar, const SymMatrix& Qbar,
                                   double rs_tol = 1e-7, double rank_tol = kRankTol,
                                   const SolverSettings& solver = {});

// z-block of sum mu_i H^i after the change of coordinates y = u + shift * z0
// (shift has length N and is zero off the y block; empty means no change).
SymMatrix restriction_matrix_A(const HomQCQP& p, const Vector& mu, const std::vector<Index>& z_indices,
                               const Vector& shift = Vector());
// shift = xbar_y / xbar_z0 on the y coordinates of the layout.
Vector nearest_point_shift(const Layout& layout, const Vector& xbar);

class FinslerHypothesisViolated : public std::runtime_error {
 public:
  FinslerHypothesisViolated() : std::runtime_error("Finsler hypothesis violated") {}
};

struct FinslerGrid {
  double t_min = 1e-8;
  double t_max = 1.0;
  int points = 50;
  std::vector<double> values() const;
};

struct FinslerResult {
  double t = 0.0;
  double min_eig = 0.0;
  bool found = false;
};
// Smallest grid t with A + tB positive definite; throws FinslerHypothesisViolated
// unless B is positive definite on ker A.
FinslerResult finsler_perturb(const SymMatrix& A, const SymMatrix& B, const FinslerGrid& grid = {},
                              double rank_tol = kRankTol);

struct MultiplierPerturbation {
  double t = 0.0;
  Vector lambda;
  bool corank_one = false;
  double nu2 = 0.0;
};
// Moves lambda_bar along mu (with mu^T grad h(xbar) = 0) until Q is psd of corank one.
MultiplierPerturbation perturb_multiplier(const HomQCQP& p, const Vector& xbar, const Vector& lambda_bar,
                                          const Vector& mu, const FinslerGrid& grid = {},
                                          double rank_tol = kRankTol);

struct BranchPoint {
  double min_projected_tangent_norm = 0.0;
  bool is_branch_point = false;
};
BranchPoint branch_point_check(const Matrix& J, const SymMatrix& Qbar, double rank_tol = kRankTol);
bool regularity_matrix_check(const Matrix& J, const SymMatrix& Qbar, double rank_tol = kRankTol);

enum class R2Status { holds_by_declaration, unknown };
std::string to_string(R2Status s);
R2Status assess_R2(const ParametricProblem& fam);

struct StabilityOptions {
  std::optional<double> K;
  std::optional<double> L;
  double rank_tol = kRankTol;
  double rs_tol = 1e-7;
  SolverSettings solver;
};

struct StabilityReport {
  std::optional<AcqResult> acq;
  double nu2 = 0.0;
  std::optional<double> K;
  std::optional<double> L;
  double M = 0.0;
  std::optional<Radius> radius_thm;
  std::optional<Radius> radius_cor;
  RestrictedSlater rs;
  BranchPoint branch_point;
  bool regularity_matrix_full_rank = false;
  R2Status r2 = R2Status::unknown;
};

StabilityReport assess_stability(const ParametricProblem& fam, const Vector& theta_bar, const Vector& xbar,
                                 const Vector& lambda_bar, const StabilityOptions& opts = {});

// Corollary radius for a nearest-point family at a point ybar of the variety
// (affine coordinates). Empty when the family has no nearest-point view.
std::optional<Radius> corollary_radius_at(const ParametricProblem& fam, const Vector& ybar,
                                          double rank_tol = kRankTol);

}  // namespace qstab
