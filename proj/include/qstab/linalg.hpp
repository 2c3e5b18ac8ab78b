#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace qstab {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kRankTol = 1e-7;

// Dense symmetric matrix. Symmetry is enforced on every write.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index n) : a_(Matrix::Zero(n, n)) {}
  // Symmetrizes (A + A^T)/2; throws on a non-square argument.
  explicit SymMatrix(const Matrix& a);

  static SymMatrix identity(Index n);
  static SymMatrix outer(const Vector& x);
  static SymMatrix diag(const Vector& d);

  Index n() const { return a_.rows(); }
  const Matrix& mat() const { return a_; }
  double operator()(Index i, Index j) const { return a_(i, j); }

  void set(Index i, Index j, double v) {
    a_(i, j) = v;
    a_(j, i) = v;
  }
  // Adds the monomial c*x_i*x_j to x^T A x.
  void add_monomial(Index i, Index j, double c) {
    if (i == j) {
      a_(i, i) += c;
    } else {
      a_(i, j) += 0.5 * c;
      a_(j, i) += 0.5 * c;
    }
  }

  double quad(const Vector& x) const { return x.dot(a_ * x); }
  // Frobenius inner product.
  double dot(const SymMatrix& o) const { return a_.cwiseProduct(o.a_).sum(); }
  double frobenius() const { return a_.norm(); }
  bool all_finite() const { return a_.allFinite(); }
  bool is_zero() const { return (a_.array() == 0.0).all(); }

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);
  void axpy(double s, const SymMatrix& o);  // this += s*o

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) { return a.a_ == b.a_; }

 private:
  Matrix a_;
};

struct EigDecomposition {
  Vector eigenvalues;  // ascending
  Matrix eigenvectors;
};

struct SvdResult {
  Matrix U;
  Vector sigma;  // descending
  Matrix V;
};

EigDecomposition sym_eig(const SymMatrix& A);
Vector sym_eigenvalues(const SymMatrix& A);
SvdResult svd(const Matrix& A);
Vector singular_values(const Matrix& A);
Matrix pseudo_inverse(const Matrix& A, double tol = 1e-12);

double spectral_norm(const Matrix& A);
double min_eig(const SymMatrix& A);

// sigma <= rank_tol * max(1, sigma_max) counts as zero.
inline double zero_threshold(double sigma_max, double rank_tol) {
  return rank_tol * std::max(1.0, sigma_max);
}
Index numerical_rank(const Vector& sigma_desc, double rank_tol = kRankTol);

// Orthonormal basis of ker A (columns); may have zero columns.
Matrix null_space(const Matrix& A, double rank_tol = kRankTol);
// Orthonormal basis of the range of A.
Matrix range_basis(const Matrix& A, double rank_tol = kRankTol);

// Symmetric vectorization with off-diagonal entries scaled by sqrt(2), so that
// svec(A).dot(svec(B)) == A.dot(B).
Vector svec(const SymMatrix& A);

void require_finite(const Matrix& A, const char* what);
void require_finite(const Vector& v, const char* what);

}  // namespace qstab
