#include "qstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qstab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

AcqResult check_acq(const Matrix& J, Index dim_Y, double rank_tol) {
  const Index n = J.cols();
  if (dim_Y < 0 || dim_Y > n) throw InvalidInput("check_acq: dim_Y out of range");
  AcqResult r;
  r.s = n - dim_Y;
  Vector sv = singular_values(J);
  const double s1 = sv.size() ? sv(0) : 0.0;
  const double thr = zero_threshold(s1, rank_tol);
  auto sigma = [&](Index k) { return k < sv.size() ? sv(k) : 0.0; };  // zero-based
  if (r.s == 0) {
    r.sigma_s = kInf;
    r.sigma_next = sigma(0);
    r.holds = r.sigma_next <= thr;
    return r;
  }
  r.sigma_s = sigma(r.s - 1);
  r.sigma_next = sigma(r.s);
  r.holds = r.sigma_s > thr && r.sigma_next <= thr;
  return r;
}

double operator_norm_M(const std::vector<SymMatrix>& hessians) {
  if (hessians.empty()) throw InvalidInput("operator_norm_M: empty list");
  const Index n = hessians.front().n();
  Matrix cols(n * (n + 1) / 2, static_cast<Index>(hessians.size()));
  for (std::size_t i = 0; i < hessians.size(); ++i) {
    if (hessians[i].n() != n) throw InvalidInput("operator_norm_M: dimension mismatch");
    cols.col(static_cast<Index>(i)) = svec(0.5 * hessians[i]);
  }
  return spectral_norm(cols);
}

Radius stability_radius(const RadiusInputs& in, RadiusMode mode) {
  if (in.M < 0 || in.nu2 < 0) throw InvalidInput("stability_radius: negative constant");
  if (mode == RadiusMode::theorem) {
    if (!in.K || !in.L) throw InvalidInput("stability_radius: theorem mode needs K and L");
    if (*in.K < 0 || *in.L < 0) throw InvalidInput("stability_radius: negative constant");
    const double den = *in.K * in.M + *in.L;
    if (den == 0.0) return {kInf, true};
    return {in.nu2 / den, false};
  }
  if (!in.sigma_s) throw InvalidInput("stability_radius: corollary mode needs sigma_s");
  if (*in.sigma_s < 0) throw InvalidInput("stability_radius: negative constant");
  if (in.M == 0.0) return {kInf, true};
  return {*in.sigma_s / (2.0 * in.M), false};
}

Matrix restricted_kernel_basis(const SymMatrix& Qbar, const Vector& xbar, double rank_tol) {
  EigDecomposition e = sym_eig(Qbar);
  const double thr = zero_threshold(e.eigenvalues.cwiseAbs().maxCoeff(), rank_tol);
  Index k = 0;
  while (k < e.eigenvalues.size() && e.eigenvalues(k) <= thr) ++k;
  Matrix K = e.eigenvectors.leftCols(k);
  const Vector u = xbar / xbar.norm();
  K -= u * (u.transpose() * K);
  // Columns of K are unit vectors before projection, so an absolute cutoff is meaningful.
  if (K.cols() == 0) return K;
  SvdResult s = svd(K);
  Index r = 0;
  while (r < s.sigma.size() && s.sigma(r) > 1e-6) ++r;
  return s.U.leftCols(r);
}

RestrictedSlater restricted_slater(const HomQCQP& p, const Vector& xbar, const SymMatrix& Qbar, double rs_tol,
                                   double rank_tol, const SolverSettings& solver) {
  if (xbar.size() != p.N || xbar.norm() == 0.0) throw InvalidInput("restricted_slater: bad xbar");
  const Index m = p.m();
  RestrictedSlater out;
  out.mu_star = Vector::Zero(m);
  Matrix B = restricted_kernel_basis(Qbar, xbar, rank_tol);
  out.V_dim = B.cols();
  if (out.V_dim == 0) {
    out.t_star = kInf;
    out.holds = true;
    return out;
  }
  Matrix E(p.N, m);
  for (Index i = 0; i < m; ++i) E.col(i) = p.constraints[i].H.mat() * xbar;
  Matrix W = null_space(E, rank_tol);
  const Index r = W.cols();
  if (r == 0) {
    out.t_star = 0.0;  // only mu = 0, whose restriction is the zero matrix
    return out;
  }

  const Index k = out.V_dim;
  std::vector<SymMatrix> Bj(r);
  for (Index j = 0; j < r; ++j) {
    SymMatrix S(p.N);
    for (Index i = 0; i < m; ++i) S.axpy(W(i, j), p.constraints[i].H);
    Bj[j] = SymMatrix(Matrix(B.transpose() * S.mat() * B));
  }

  // Dual-form SDP in y = (c, t): maximize t subject to
  //   sum c_j B_j - t I >= 0  and  -1 <= (W c)_i <= 1  (as a diagonal block).
  const Index n = k + 2 * m;
  SDPProblem sdp;
  Matrix C = Matrix::Zero(n, n);
  C.diagonal().tail(2 * m).setOnes();
  sdp.C = SymMatrix(C);
  for (Index j = 0; j < r; ++j) {
    Matrix A = Matrix::Zero(n, n);
    A.topLeftCorner(k, k) = -Bj[j].mat();
    for (Index i = 0; i < m; ++i) {
      A(k + i, k + i) = W(i, j);
      A(k + m + i, k + m + i) = -W(i, j);
    }
    sdp.A.push_back(SymMatrix(A));
  }
  Matrix At = Matrix::Zero(n, n);
  At.topLeftCorner(k, k).setIdentity();
  sdp.A.push_back(SymMatrix(At));
  sdp.b = Vector::Zero(r + 1);
  sdp.b(r) = 1.0;

  SDPResult res = solve_sdp(sdp, solver);
  if (res.status != SolveStatus::optimal) {
    out.inconclusive = true;
    out.t_star = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  Vector mu = W * res.y.head(r);
  // Round-off can leave the box by a hair; the verified value uses the clipped point.
  mu = mu.cwiseMax(-1.0).cwiseMin(1.0);
  SymMatrix S(p.N);
  for (Index i = 0; i < m; ++i) S.axpy(mu(i), p.constraints[i].H);
  out.mu_star = mu;
  out.t_star = min_eig(SymMatrix(Matrix(B.transpose() * S.mat() * B)));
  out.holds = out.t_star > rs_tol;
  return out;
}

SymMatrix restriction_matrix_A(const HomQCQP& p, const Vector& mu, const std::vector<Index>& z_indices,
                               const Vector& shift) {
  if (mu.size() != p.m()) throw InvalidInput("restriction_matrix_A: multiplier length mismatch");
  for (std::size_t a = 0; a < z_indices.size(); ++a) {
    if (z_indices[a] < 0 || z_indices[a] >= p.N) throw InvalidInput("restriction_matrix_A: index out of range");
    for (std::size_t b = 0; b < a; ++b)
      if (z_indices[a] == z_indices[b]) throw InvalidInput("restriction_matrix_A: repeated index");
  }
  SymMatrix S(p.N);
  for (Index i = 0; i < p.m(); ++i)
    if (mu(i) != 0.0) S.axpy(mu(i), p.constraints[i].H);
  Matrix T = Matrix::Identity(p.N, p.N);
  if (shift.size() != 0) {
    if (shift.size() != p.N || !p.hom_index) throw InvalidInput("restriction_matrix_A: bad shift");
    T.col(*p.hom_index) += shift;
  }
  Matrix Sx = T.transpose() * S.mat() * T;
  const Index k = static_cast<Index>(z_indices.size());
  Matrix out(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) out(a, b) = Sx(z_indices[a], z_indices[b]);
  return SymMatrix(out);
}

Vector nearest_point_shift(const Layout& layout, const Vector& xbar) {
  if (!layout.hom_index) throw InvalidInput("nearest_point_shift: layout has no homogenizing coordinate");
  const double z0 = xbar(*layout.hom_index);
  if (z0 == 0.0) throw InvalidInput("nearest_point_shift: z0 vanishes");
  Vector s = Vector::Zero(xbar.size());
  for (Index j : layout.y) s(j) = xbar(j) / z0;
  return s;
}

std::vector<double> FinslerGrid::values() const {
  std::vector<double> v;
  if (points < 1 || !(t_min > 0) || !(t_max >= t_min)) throw InvalidInput("FinslerGrid: bad grid");
  if (points == 1) return {t_min};
  const double ratio = std::log(t_max / t_min) / (points - 1);
  for (int i = 0; i < points; ++i) v.push_back(t_min * std::exp(ratio * i));
  v.back() = t_max;
  return v;
}

FinslerResult finsler_perturb(const SymMatrix& A, const SymMatrix& B, const FinslerGrid& grid, double rank_tol) {
  if (A.n() != B.n()) throw InvalidInput("finsler_perturb: dimension mismatch");
  EigDecomposition e = sym_eig(A);
  const double thrA = zero_threshold(e.eigenvalues.cwiseAbs().maxCoeff(), rank_tol);
  if (e.eigenvalues(0) < -thrA) throw InvalidInput("finsler_perturb: A is not positive semidefinite");
  Index k = 0;
  while (k < e.eigenvalues.size() && e.eigenvalues(k) <= thrA) ++k;
  const double normB = std::max(1.0, spectral_norm(B.mat()));
  if (k > 0) {
    Matrix K = e.eigenvectors.leftCols(k);
    double lmin = min_eig(SymMatrix(Matrix(K.transpose() * B.mat() * K)));
    if (!(lmin > rank_tol * normB)) throw FinslerHypothesisViolated();
  }
  FinslerResult out;
  for (double t : grid.values()) {
    double lm = min_eig(A + t * B);
    // The perturbation must lift the spectrum by a resolvable fraction of its size.
    if (lm > rank_tol * t * normB) {
      out.t = t;
      out.min_eig = lm;
      out.found = true;
      return out;
    }
  }
  return out;
}

MultiplierPerturbation perturb_multiplier(const HomQCQP& p, const Vector& xbar, const Vector& lambda_bar,
                                          const Vector& mu, const FinslerGrid& grid, double rank_tol) {
  if (mu.size() != p.m() || lambda_bar.size() != p.m() || xbar.size() != p.N)
    throw InvalidInput("perturb_multiplier: dimension mismatch");
  SymMatrix Qbar = lagrangian_hessian(p, lambda_bar);
  SymMatrix Bm(p.N);
  for (Index i = 0; i < p.m(); ++i) Bm.axpy(mu(i), p.constraints[i].H);
  if ((Bm.mat() * xbar).norm() > 1e-8 * std::max(1.0, Bm.frobenius()) * xbar.norm())
    throw InvalidInput("perturb_multiplier: mu^T grad h(xbar) != 0");

  Matrix P = null_space(xbar.transpose());
  SymMatrix Ap(Matrix(P.transpose() * Qbar.mat() * P));
  SymMatrix Bp(Matrix(P.transpose() * Bm.mat() * P));
  FinslerResult fr = finsler_perturb(Ap, Bp, grid, rank_tol);

  MultiplierPerturbation out;
  out.lambda = lambda_bar;
  if (!fr.found) return out;
  for (double t : grid.values()) {
    if (t < fr.t) continue;
    Vector lam = lambda_bar + t * mu;
    CorankCheck cc = check_corank_one(lagrangian_hessian(p, lam), rank_tol);
    if (cc.is_corank_one) {
      out.t = t;
      out.lambda = lam;
      out.corank_one = true;
      out.nu2 = cc.nu2;
      return out;
    }
  }
  return out;
}

BranchPoint branch_point_check(const Matrix& J, const SymMatrix& Qbar, double rank_tol) {
  if (J.cols() != Qbar.n()) throw InvalidInput("branch_point_check: dimension mismatch");
  Matrix T = null_space(J, rank_tol);
  BranchPoint bp;
  if (T.cols() == 0) {
    bp.min_projected_tangent_norm = kInf;
    return bp;
  }
  Vector sv = singular_values(Qbar.mat() * T);
  bp.min_projected_tangent_norm = sv(sv.size() - 1);
  bp.is_branch_point =
      bp.min_projected_tangent_norm <= zero_threshold(spectral_norm(Qbar.mat()), rank_tol);
  return bp;
}

bool regularity_matrix_check(const Matrix& J, const SymMatrix& Qbar, double rank_tol) {
  const Index m = J.rows(), N = J.cols();
  if (N != Qbar.n()) throw InvalidInput("regularity_matrix_check: dimension mismatch");
  // Greedy row selection in order keeps the first of any dependent group.
  std::vector<Index> rows;
  std::vector<Vector> basis;
  const double scale = std::max(1.0, spectral_norm(J));
  for (Index i = 0; i < m; ++i) {
    Vector v = J.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= q.dot(v) * q;
    if (v.norm() > rank_tol * scale) {
      basis.push_back(v / v.norm());
      rows.push_back(i);
    }
  }
  const Index r = static_cast<Index>(rows.size());
  Matrix K = Matrix::Zero(r + N, m + N);
  for (Index a = 0; a < r; ++a) K.block(a, m, 1, N) = J.row(rows[a]);
  K.block(r, 0, N, m) = J.transpose();
  K.block(r, m, N, N) = Qbar.mat();
  Vector sv = singular_values(K);
  if (sv.size() < r + N) return false;
  return sv(r + N - 1) > zero_threshold(sv(0), rank_tol);
}

std::string to_string(R2Status s) {
  return s == R2Status::holds_by_declaration ? "holds_by_declaration" : "unknown";
}

R2Status assess_R2(const ParametricProblem& fam) {
  return fam.theta_independent_feasible_set ? R2Status::holds_by_declaration : R2Status::unknown;
}

namespace {

Vector affine_point(const ParametricProblem& fam, const Vector& xbar) {
  if (!fam.layout.hom_index) throw InvalidInput("affine view needs a homogenizing coordinate");
  const Index h = *fam.layout.hom_index;
  Vector y(xbar.size() - 1);
  for (Index i = 0, k = 0; i < xbar.size(); ++i)
    if (i != h) y(k++) = xbar(i) / xbar(h);
  return y;
}

Matrix affine_jacobian(const AffineProblem& av, const Vector& y) {
  Matrix J(static_cast<Index>(av.constraints.size()), y.size());
  for (std::size_t i = 0; i < av.constraints.size(); ++i)
    J.row(static_cast<Index>(i)) = av.constraints[i].gradient(y).transpose();
  return J;
}

double affine_M(const AffineProblem& av) {
  std::vector<SymMatrix> hs;
  for (const auto& f : av.constraints) hs.push_back(f.hessian());
  return hs.empty() ? 0.0 : operator_norm_M(hs);
}

}  // namespace

std::optional<Radius> corollary_radius_at(const ParametricProblem& fam, const Vector& ybar, double rank_tol) {
  if (!fam.affine_view) return std::nullopt;
  AffineProblem av = fam.affine_view(ybar);
  if (!av.nearest_point) return std::nullopt;
  AcqResult acq = check_acq(affine_jacobian(av, ybar), av.local_dim, rank_tol);
  if (!acq.holds) return Radius{0.0, false};
  RadiusInputs in;
  in.M = affine_M(av);
  in.sigma_s = acq.sigma_s;
  return stability_radius(in, RadiusMode::corollary);
}

StabilityReport assess_stability(const ParametricProblem& fam, const Vector& theta_bar, const Vector& xbar,
                                 const Vector& lambda_bar, const StabilityOptions& opts) {
  HomQCQP p = fam.instantiate(theta_bar);
  if (xbar.size() != p.N) throw InvalidInput("assess_stability: xbar has wrong length");
  StabilityReport rep;
  SymMatrix Qbar = lagrangian_hessian(p, lambda_bar);
  Vector ev = sym_eigenvalues(Qbar);
  rep.nu2 = ev.size() > 1 ? ev(1) : kInf;

  if (fam.affine_view) {
    AffineProblem av = fam.affine_view(theta_bar);
    Vector y = affine_point(fam, xbar);
    rep.acq = check_acq(affine_jacobian(av, y), av.local_dim, opts.rank_tol);
    if (av.nearest_point) {
      rep.M = affine_M(av);
      RadiusInputs in;
      in.M = rep.M;
      in.sigma_s = rep.acq->sigma_s;
      if (rep.acq->holds) {
        rep.radius_cor = stability_radius(in, RadiusMode::corollary);
        rep.K = 2.0 / rep.acq->sigma_s;
        rep.L = 0.0;
      } else {
        rep.radius_cor = Radius{0.0, false};
      }
    }
  }
  if (opts.K && opts.L) {
    std::vector<SymMatrix> hs;
    for (const auto& c : p.constraints) hs.push_back(2.0 * c.H);
    rep.K = opts.K;
    rep.L = opts.L;
    rep.M = operator_norm_M(hs);
    RadiusInputs in;
    in.nu2 = std::max(0.0, rep.nu2);
    in.K = opts.K;
    in.L = opts.L;
    in.M = rep.M;
    rep.radius_thm = stability_radius(in, RadiusMode::theorem);
  }

  rep.rs = restricted_slater(p, xbar, Qbar, opts.rs_tol, opts.rank_tol, opts.solver);
  Matrix J = constraint_jacobian(p, xbar);
  rep.branch_point = branch_point_check(J, Qbar, opts.rank_tol);
  rep.regularity_matrix_full_rank = regularity_matrix_check(J, Qbar, opts.rank_tol);
  rep.r2 = assess_R2(fam);
  return rep;
}

}  // namespace qstab
