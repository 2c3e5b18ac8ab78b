#pragma once

#include "qstab/qcqp.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qstab {

// min C.S  s.t.  A_i.S = b_i,  S psd
// max b^T y  s.t.  C - sum y_i A_i = Z psd
struct SDPProblem {
  SymMatrix C;
  std::vector<SymMatrix> A;
  Vector b;

  Index N() const { return C.n(); }
  Index m() const { return static_cast<Index>(A.size()); }
  void validate() const;
};

enum class SolveStatus { optimal, infeasible, dual_infeasible, max_iter, numerical_failure };
std::string to_string(SolveStatus s);

struct SolverSettings {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.95;
  double ray_threshold = 1e6;
  int threads = 1;  // Schur complement workers
};

// With sb = max(1, ||b||) and sC = max(1, ||C||_F); these are the residuals of the
// problem rescaled to unit data, so they reduce to 1 + ... when the data is small.
struct SDPResiduals {
  double primal_feas = 0.0;  // ||b - A(S)|| / (sb + ||b||)
  double dual_feas = 0.0;    // ||C - Z - A^T y||_F / (sC + ||C||_F)
  double rel_gap = 0.0;      // |pval - dval| / (sC sb + |pval| + |dval|)
};

struct SDPResult {
  SymMatrix S;
  Vector y;
  SymMatrix Z;
  double pval = 0.0;
  double dval = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  SDPResiduals residuals;
  int iterations = 0;
};

SDPProblem build_relaxation(const HomQCQP& p);
SDPResult solve_sdp(const SDPProblem& prob, const SolverSettings& settings = {});

std::optional<Vector> extract_rank_one(const SymMatrix& S, double ratio_tol = 1e-6,
                                       std::optional<Index> hom_index = std::nullopt);
// Eigenvalues above ratio_tol * largest.
Index psd_rank(const SymMatrix& S, double ratio_tol = 1e-6);

// Sparse SDPA format, one block.
void write_sdpa(std::ostream& os, const SDPProblem& prob);

}  // namespace qstab
