#include "qstab/kernels.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <string>

namespace qstab::kernels {

SparseSym to_sparse(const SymMatrix& A) {
  SparseSym s;
  s.n = A.n();
  for (Index j = 0; j < A.n(); ++j)
    for (Index i = 0; i < A.n(); ++i)
      if (A(i, j) != 0.0) {
        s.row.push_back(i);
        s.col.push_back(j);
        s.val.push_back(A(i, j));
      }
  return s;
}

Matrix schur_complement_serial(const std::vector<SymMatrix>& A, const Matrix& X, const Matrix& Zinv) {
  const Index m = static_cast<Index>(A.size());
  Matrix M(m, m);
  for (Index j = 0; j < m; ++j) {
    Matrix P = X * A[j].mat() * Zinv;
    for (Index i = 0; i < m; ++i) M(i, j) = A[i].mat().cwiseProduct(P.transpose()).sum();
  }
  return 0.5 * (M + M.transpose());
}

namespace {

double schur_entry(const SparseSym& Ai, const SparseSym& Aj, const Matrix& X, const Matrix& Zinv) {
  double s = 0.0;
  for (Index a = 0; a < Ai.nnz(); ++a) {
    const Index k = Ai.row[a], l = Ai.col[a];
    double inner = 0.0;
    for (Index b = 0; b < Aj.nnz(); ++b) inner += Aj.val[b] * X(l, Aj.row[b]) * Zinv(Aj.col[b], k);
    s += Ai.val[a] * inner;
  }
  return s;
}

}  // namespace

Matrix schur_complement_parallel(const std::vector<SparseSym>& A, const Matrix& X, const Matrix& Zinv,
                                 int threads) {
  const Index m = static_cast<Index>(A.size());
  Matrix M(m, m);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (Index i = 0; i < m; ++i) {
    for (Index j = i; j < m; ++j) {
      double v = schur_entry(A[i], A[j], X, Zinv);
      M(i, j) = v;
      M(j, i) = v;
    }
  }
  return M;
}

Vector apply_op(const std::vector<SparseSym>& A, const Matrix& W) {
  Vector out(static_cast<Index>(A.size()));
  for (std::size_t i = 0; i < A.size(); ++i) {
    double s = 0.0;
    const SparseSym& a = A[i];
    for (Index k = 0; k < a.nnz(); ++k) s += a.val[k] * W(a.col[k], a.row[k]);
    out(static_cast<Index>(i)) = s;
  }
  return out;
}

Matrix apply_adjoint(const std::vector<SparseSym>& A, const Vector& y, Index n) {
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < A.size(); ++i) {
    const double yi = y(static_cast<Index>(i));
    if (yi == 0.0) continue;
    const SparseSym& a = A[i];
    for (Index k = 0; k < a.nnz(); ++k) out(a.row[k], a.col[k]) += yi * a.val[k];
  }
  return out;
}

void for_each_serial(Index count, const std::function<void(Index)>& body) {
  for (Index i = 0; i < count; ++i) body(i);
}

void for_each_parallel(Index count, const std::function<void(Index)>& body, int threads) {
  const int nt = threads > 0 ? threads : omp_get_max_threads();
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (Index i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

int worker_count(int fallback) {
  if (const char* env = std::getenv("QCQP_STAB_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return fallback;
}

}  // namespace qstab::kernels
