#include "qstab/sdp.hpp"

#include "qstab/kernels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace qstab {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::dual_infeasible: return "dual_infeasible";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

void SDPProblem::validate() const {
  if (C.n() < 1) throw InvalidInput("SDPProblem: empty objective");
  if (A.empty()) throw InvalidInput("SDPProblem: no constraints");
  if (b.size() != m()) throw InvalidInput("SDPProblem: b has wrong length");
  if (!C.all_finite() || !b.allFinite()) throw InvalidInput("SDPProblem: non-finite data");
  for (const auto& a : A) {
    if (a.n() != C.n()) throw InvalidInput("SDPProblem: constraint matrix has wrong size");
    if (!a.all_finite()) throw InvalidInput("SDPProblem: non-finite data");
  }
}

SDPProblem build_relaxation(const HomQCQP& p) {
  p.validate();
  SDPProblem s;
  s.C = p.G;
  s.b.resize(p.m());
  for (Index i = 0; i < p.m(); ++i) {
    s.A.push_back(p.constraints[i].H);
    s.b(i) = -p.constraints[i].b;
  }
  return s;
}

namespace {

constexpr double kTiny = 1e-300;

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

// Keeps a linearly independent subset of the constraints, in order.
struct Reduction {
  std::vector<Index> kept;
  bool consistent = true;
};

Reduction reduce_constraints(const SDPProblem& prob) {
  const Index m = prob.m();
  Reduction r;
  std::vector<Vector> basis;  // orthonormal
  Matrix V(svec(prob.C).size(), m);
  for (Index i = 0; i < m; ++i) V.col(i) = svec(prob.A[i]);
  for (Index i = 0; i < m; ++i) {
    Vector v = V.col(i);
    const double nv = v.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= q.dot(v) * q;
    if (v.norm() > 1e-10 * std::max(nv, kTiny) && nv > 0) {
      basis.push_back(v / v.norm());
      r.kept.push_back(i);
    }
  }
  if (static_cast<Index>(r.kept.size()) == m) return r;
  Matrix VK(V.rows(), static_cast<Index>(r.kept.size()));
  Vector bK(VK.cols());
  for (Index k = 0; k < VK.cols(); ++k) {
    VK.col(k) = V.col(r.kept[k]);
    bK(k) = prob.b(r.kept[k]);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(VK);
  std::size_t next = 0;
  for (Index i = 0; i < m; ++i) {
    if (next < r.kept.size() && r.kept[next] == i) {
      ++next;
      continue;
    }
    double implied = 0.0;
    if (VK.cols() > 0) implied = (qr.solve(Vector(V.col(i)))).dot(bK);
    if (std::abs(implied - prob.b(i)) > 1e-8 * (1.0 + std::abs(prob.b(i)))) r.consistent = false;
  }
  return r;
}

// Largest alpha with X + alpha dX psd (infinity if none binds).
double max_step(const Eigen::LLT<Matrix>& Lx, const Matrix& dX) {
  Matrix half = Lx.matrixL().solve(dX);
  Matrix W = symmetrized(Lx.matrixL().solve(Matrix(half.transpose())));
  Eigen::SelfAdjointEigenSolver<Matrix> es(W, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues()(0);
  if (lmin >= 0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

class SchurSolver {
 public:
  bool factor(const Matrix& M) {
    llt_.compute(M);
    if (llt_.info() == Eigen::Success) {
      use_llt_ = true;
      return true;
    }
    double d = M.diagonal().cwiseAbs().maxCoeff();
    for (double reg : {1e-14, 1e-12, 1e-10}) {
      Matrix Mr = M;
      Mr.diagonal().array() += reg * std::max(d, 1.0);
      llt_.compute(Mr);
      if (llt_.info() == Eigen::Success) {
        use_llt_ = true;
        return true;
      }
    }
    ldlt_.compute(M);
    use_llt_ = false;
    return ldlt_.info() == Eigen::Success;
  }
  Vector solve(const Vector& r) const { return use_llt_ ? Vector(llt_.solve(r)) : Vector(ldlt_.solve(r)); }

 private:
  Eigen::LLT<Matrix> llt_;
  Eigen::LDLT<Matrix> ldlt_;
  bool use_llt_ = true;
};

struct Direction {
  Matrix dX, dZ;
  Vector dy;
};

}  // namespace

SDPResult solve_sdp(const SDPProblem& prob, const SolverSettings& settings) {
  prob.validate();
  const Index N = prob.N();
  const Index m_full = prob.m();

  SDPResult res;
  res.y = Vector::Zero(m_full);

  Reduction red = reduce_constraints(prob);
  if (!red.consistent || red.kept.empty()) {
    // Either A(S) = b has no solution or every A_i vanishes.
    bool zero_ok = red.kept.empty() && prob.b.cwiseAbs().maxCoeff() == 0.0;
    if (!red.consistent || !zero_ok) {
      res.status = SolveStatus::infeasible;
      res.S = SymMatrix(N);
      res.Z = prob.C;
      return res;
    }
  }
  const Index m = static_cast<Index>(red.kept.size());
  std::vector<SymMatrix> A;
  std::vector<kernels::SparseSym> As;
  Vector b(m);
  for (Index k = 0; k < m; ++k) {
    A.push_back(prob.A[red.kept[k]]);
    As.push_back(kernels::to_sparse(A.back()));
    b(k) = prob.b(red.kept[k]);
  }
  // Work on C / sC and b / sb so the stopping rules do not depend on data scale.
  const double sC = std::max(1.0, prob.C.frobenius());
  const double sb = std::max(1.0, b.norm());
  const Vector b_orig = b;
  b /= sb;
  const Matrix C = prob.C.mat() / sC;
  const double normC = C.norm();
  const double normb = b.norm();
  double normA = 0.0;
  for (const auto& a : A) normA = std::max(normA, a.frobenius());

  // Gram matrix of the (independent) constraints, for exact primal corrections.
  Matrix gram(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = i; j < m; ++j) gram(i, j) = gram(j, i) = A[i].dot(A[j]);
  Eigen::LLT<Matrix> gram_llt(gram);

  const double tau = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0) + normC;
  Matrix X = tau * Matrix::Identity(N, N);
  Matrix Z = tau * Matrix::Identity(N, N);
  Vector y = Vector::Zero(m);

  struct Snapshot {
    Matrix X, Z;
    Vector y;
    double score = std::numeric_limits<double>::infinity();
    SDPResiduals r;
    double pval = 0, dval = 0;
  } best;

  auto finish = [&](SolveStatus st, const Matrix& Xf, const Matrix& Zf, const Vector& yf, const SDPResiduals& r,
                    double pv, double dv, int it) {
    (void)r;
    res.S = SymMatrix(Matrix(sb * Xf));
    res.Z = SymMatrix(Matrix(sC * Zf));
    res.y.setZero();
    for (Index k = 0; k < m; ++k) res.y(red.kept[k]) = sC * yf(k);
    res.pval = sC * sb * pv;
    res.dval = sC * sb * dv;
    const Vector ys = sC * yf;
    // Same normalization as the stopping rule, expressed in the caller's data.
    SDPResiduals ro;
    ro.primal_feas = (b_orig - kernels::apply_op(As, res.S.mat())).norm() / (sb + b_orig.norm());
    ro.dual_feas = (prob.C.mat() - res.Z.mat() - kernels::apply_adjoint(As, ys, N)).norm() / (sC + prob.C.frobenius());
    ro.rel_gap = std::abs(res.pval - res.dval) / (sC * sb + std::abs(res.pval) + std::abs(res.dval));
    res.residuals = ro;
    res.status = st;
    res.iterations = it;
    return res;
  };

  int stalls = 0;
  for (int iter = 0;; ++iter) {
    Vector AX = kernels::apply_op(As, X);
    Vector Rp = b - AX;
    Matrix Rd = C - Z - kernels::apply_adjoint(As, y, N);
    const double pval = C.cwiseProduct(X).sum();
    const double dval = b.dot(y);
    SDPResiduals r;
    r.primal_feas = Rp.norm() / (1.0 + normb);
    r.dual_feas = Rd.norm() / (1.0 + normC);
    r.rel_gap = std::abs(pval - dval) / (1.0 + std::abs(pval) + std::abs(dval));

    if (!std::isfinite(pval) || !std::isfinite(dval) || !X.allFinite() || !Z.allFinite())
      return finish(SolveStatus::numerical_failure, best.X, best.Z, best.y, best.r, best.pval, best.dval, iter);

    const double score = std::max({r.primal_feas, r.dual_feas, r.rel_gap});
    if (score < best.score) best = {X, Z, y, score, r, pval, dval};

    if (r.primal_feas <= settings.feas_tol && r.dual_feas <= settings.feas_tol && r.rel_gap <= settings.gap_tol)
      return finish(SolveStatus::optimal, X, Z, y, r, pval, dval, iter);

    // Ray tests. X/(-C.X) approximates a primal improving direction when
    // A(X) is tiny relative to the objective decrease; likewise for y.
    if (iter >= 5 && normA > 0) {
      if (pval < 0 && normC > 0) {
        double ratio = (-pval / normC) / std::max(AX.norm() / normA, kTiny);
        if (ratio >= settings.ray_threshold)
          return finish(SolveStatus::dual_infeasible, X, Z, y, r, pval, dval, iter);
      }
      // Weak infeasibility of the dual has no clean ray: X drifts off along an
      // almost-improving direction and pval undercuts dval.
      if (r.primal_feas <= 1e-6 && X.trace() >= settings.ray_threshold * tau &&
          pval < dval - 1e-6 * (1.0 + std::abs(dval)))
        return finish(SolveStatus::dual_infeasible, X, Z, y, r, pval, dval, iter);
      if (dval > 0 && normb > 0) {
        double denom = (C - Rd).norm() / normA;
        double ratio = (dval / normb) / std::max(denom, kTiny);
        if (ratio >= settings.ray_threshold && y.norm() > settings.ray_threshold)
          return finish(SolveStatus::infeasible, X, Z, y, r, pval, dval, iter);
      }
    }

    if (iter >= settings.max_iter)
      return finish(SolveStatus::max_iter, best.X, best.Z, best.y, best.r, best.pval, best.dval, iter);

    Eigen::LLT<Matrix> Lz(Z), Lx(X);
    if (Lz.info() != Eigen::Success || Lx.info() != Eigen::Success)
      return finish(SolveStatus::numerical_failure, best.X, best.Z, best.y, best.r, best.pval, best.dval, iter);
    Matrix Zinv = Lz.solve(Matrix::Identity(N, N));
    Zinv = symmetrized(Zinv);

    Matrix M = kernels::schur_complement_parallel(As, X, Zinv, settings.threads);
    SchurSolver schur;
    if (!schur.factor(M))
      return finish(SolveStatus::numerical_failure, best.X, best.Z, best.y, best.r, best.pval, best.dval, iter);

    const Vector ARdZ = kernels::apply_op(As, X * Rd * Zinv);
    auto direction = [&](const Matrix& Rc) {
      Direction d;
      Vector rhs = Rp - kernels::apply_op(As, Rc * Zinv) + ARdZ;
      d.dy = schur.solve(rhs);
      // M is badly conditioned near the end; refinement keeps A(dX) = Rp.
      for (int k = 0; k < 2; ++k) d.dy += schur.solve(rhs - M * d.dy);
      d.dZ = Rd - kernels::apply_adjoint(As, d.dy, N);
      d.dX = (Rc - X * d.dZ) * Zinv;
      d.dX = symmetrized(d.dX);
      // Z^{-1} is nearly singular late in the run; restore A(dX) = Rp.
      if (gram_llt.info() == Eigen::Success)
        d.dX += kernels::apply_adjoint(As, gram_llt.solve(Rp - kernels::apply_op(As, d.dX)), N);
      return d;
    };

    const double mu = X.cwiseProduct(Z).sum() / static_cast<double>(N);
    const Matrix XZ = X * Z;

    Direction pred = direction(-XZ);
    double ap = std::min(1.0, max_step(Lx, pred.dX));
    double ad = std::min(1.0, max_step(Lz, pred.dZ));
    double mu_aff = (X + ap * pred.dX).cwiseProduct(Z + ad * pred.dZ).sum() / static_cast<double>(N);
    double sigma = std::clamp(std::pow(mu_aff / std::max(mu, kTiny), 3.0), 0.0, 1.0);

    Matrix Rc = sigma * mu * Matrix::Identity(N, N) - XZ - pred.dX * pred.dZ;
    Direction corr = direction(Rc);
    if (!corr.dX.allFinite() || !corr.dZ.allFinite() || !corr.dy.allFinite())
      return finish(SolveStatus::numerical_failure, best.X, best.Z, best.y, best.r, best.pval, best.dval, iter);
    ap = std::min(1.0, settings.step_fraction * max_step(Lx, corr.dX));
    ad = std::min(1.0, settings.step_fraction * max_step(Lz, corr.dZ));

    X += ap * corr.dX;
    X = symmetrized(X);
    y += ad * corr.dy;
    Z += ad * corr.dZ;
    Z = symmetrized(Z);

    stalls = (ap < 1e-10 && ad < 1e-10) ? stalls + 1 : 0;
    if (stalls >= 3)
      return finish(SolveStatus::numerical_failure, best.X, best.Z, best.y, best.r, best.pval, best.dval, iter);
  }
}

std::optional<Vector> extract_rank_one(const SymMatrix& S, double ratio_tol, std::optional<Index> hom_index) {
  const Index N = S.n();
  if (N == 0) return std::nullopt;
  EigDecomposition e = sym_eig(S);
  const double top = e.eigenvalues(N - 1);
  if (!(top > 0)) return std::nullopt;
  const double second = N > 1 ? std::max(0.0, e.eigenvalues(N - 2)) : 0.0;
  if (second / top > ratio_tol) return std::nullopt;
  Vector x = std::sqrt(top) * e.eigenvectors.col(N - 1);
  Index pivot = -1;
  if (hom_index && std::abs(x(*hom_index)) > 1e-12 * x.norm()) {
    pivot = *hom_index;
  } else {
    for (Index i = 0; i < N; ++i)
      if (std::abs(x(i)) > 1e-12 * x.norm()) {
        pivot = i;
        break;
      }
  }
  if (pivot >= 0 && x(pivot) < 0) x = -x;
  return x;
}

Index psd_rank(const SymMatrix& S, double ratio_tol) {
  Vector ev = sym_eigenvalues(S);
  if (ev.size() == 0) return 0;
  const double top = ev(ev.size() - 1);
  if (!(top > 0)) return 0;
  Index r = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > ratio_tol * top) ++r;
  return r;
}

void write_sdpa(std::ostream& os, const SDPProblem& prob) {
  prob.validate();
  const Index N = prob.N();
  char buf[128];
  os << "* min C.S s.t. A_i.S = b_i; matrix 0 holds -C so the file reads as max (-C).S\n";
  os << prob.m() << " = mDIM\n1 = nBLOCK\n" << N << " = bLOCKsTRUCT\n";
  for (Index i = 0; i < prob.m(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", prob.b(i));
    os << (i ? " " : "") << buf;
  }
  os << "\n";
  auto emit = [&](Index k, const Matrix& M, double sign) {
    for (Index i = 0; i < N; ++i)
      for (Index j = i; j < N; ++j)
        if (M(i, j) != 0.0) {
          std::snprintf(buf, sizeof buf, "%.17g", sign * M(i, j));
          os << k << " 1 " << i + 1 << " " << j + 1 << " " << buf << "\n";
        }
  };
  emit(0, prob.C.mat(), -1.0);
  for (Index k = 0; k < prob.m(); ++k) emit(k + 1, prob.A[k].mat(), 1.0);
}

}  // namespace qstab
