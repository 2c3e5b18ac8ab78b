#include "qstab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace qstab {

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("SymMatrix: matrix is not square");
  a_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(Index n) { return SymMatrix(Matrix(Matrix::Identity(n, n))); }

SymMatrix SymMatrix::outer(const Vector& x) {
  SymMatrix s;
  s.a_ = x * x.transpose();
  return s;
}

SymMatrix SymMatrix::diag(const Vector& d) {
  SymMatrix s;
  s.a_ = d.asDiagonal();
  return s;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  a_ += o.a_;
  return *this;
}
SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  a_ -= o.a_;
  return *this;
}
SymMatrix& SymMatrix::operator*=(double s) {
  a_ *= s;
  return *this;
}
void SymMatrix::axpy(double s, const SymMatrix& o) { a_ += s * o.a_; }

void require_finite(const Matrix& A, const char* what) {
  if (!A.allFinite()) throw InvalidInput(std::string(what) + ": non-finite input");
}
void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InvalidInput(std::string(what) + ": non-finite input");
}

EigDecomposition sym_eig(const SymMatrix& A) {
  require_finite(A.mat(), "sym_eig");
  if (A.n() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.mat());
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig: no convergence");
  return {es.eigenvalues(), es.eigenvectors()};
}

Vector sym_eigenvalues(const SymMatrix& A) {
  require_finite(A.mat(), "sym_eig");
  if (A.n() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig: no convergence");
  return es.eigenvalues();
}

SvdResult svd(const Matrix& A) {
  require_finite(A, "svd");
  if (A.size() == 0) {
    return {Matrix::Identity(A.rows(), A.rows()), Vector(), Matrix::Identity(A.cols(), A.cols())};
  }
  Eigen::JacobiSVD<Matrix> s(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {s.matrixU(), s.singularValues(), s.matrixV()};
}

Vector singular_values(const Matrix& A) {
  require_finite(A, "svd");
  if (A.size() == 0) return {};
  Eigen::JacobiSVD<Matrix> s(A);
  return s.singularValues();
}

Matrix pseudo_inverse(const Matrix& A, double tol) {
  if (!(tol > 0)) throw InvalidInput("pseudo_inverse: tol must be positive");
  require_finite(A, "pseudo_inverse");
  if (A.size() == 0) return Matrix::Zero(A.cols(), A.rows());
  Eigen::JacobiSVD<Matrix> s(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = s.singularValues();
  double cut = tol * sv(0);
  Vector inv(sv.size());
  for (Index i = 0; i < sv.size(); ++i) inv(i) = (sv(i) > cut && sv(i) > 0) ? 1.0 / sv(i) : 0.0;
  return s.matrixV() * inv.asDiagonal() * s.matrixU().transpose();
}

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  return singular_values(A)(0);
}

double min_eig(const SymMatrix& A) { return sym_eigenvalues(A)(0); }

Index numerical_rank(const Vector& sigma_desc, double rank_tol) {
  if (sigma_desc.size() == 0) return 0;
  double thr = zero_threshold(sigma_desc(0), rank_tol);
  Index r = 0;
  for (Index i = 0; i < sigma_desc.size(); ++i)
    if (sigma_desc(i) > thr) ++r;
  return r;
}

Matrix null_space(const Matrix& A, double rank_tol) {
  const Index n = A.cols();
  if (A.rows() == 0) return Matrix::Identity(n, n);
  SvdResult s = svd(A);
  Index r = numerical_rank(s.sigma, rank_tol);
  return s.V.rightCols(n - r);
}

Matrix range_basis(const Matrix& A, double rank_tol) {
  if (A.cols() == 0) return Matrix(A.rows(), 0);
  SvdResult s = svd(A);
  Index r = numerical_rank(s.sigma, rank_tol);
  return s.U.leftCols(r);
}

Vector svec(const SymMatrix& A) {
  const Index n = A.n();
  Vector v(n * (n + 1) / 2);
  Index k = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i) v(k++) = (i == j) ? A(i, j) : std::sqrt(2.0) * A(i, j);
  return v;
}

}  // namespace qstab
