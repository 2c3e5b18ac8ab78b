#pragma once

#include "qstab/linalg.hpp"

#include <functional>
#include <vector>

namespace qstab::kernels {

// Nonzeros of a symmetric matrix, both triangles listed.
struct SparseSym {
  Index n = 0;
  std::vector<Index> row, col;
  std::vector<double> val;

  Index nnz() const { return static_cast<Index>(val.size()); }
};

SparseSym to_sparse(const SymMatrix& A);

// M_ij = tr(A_i X A_j Zinv), the HKM Schur complement.
// Dense reference: forms X A_j Zinv for every j.
Matrix schur_complement_serial(const std::vector<SymMatrix>& A, const Matrix& X, const Matrix& Zinv);
// Sparse double sum over the nonzeros of A_i and A_j, OpenMP over rows.
// threads <= 0 uses the OpenMP default.
Matrix schur_complement_parallel(const std::vector<SparseSym>& A, const Matrix& X, const Matrix& Zinv,
                                 int threads = 0);

// out_i = tr(A_i W) for a general square W.
Vector apply_op(const std::vector<SparseSym>& A, const Matrix& W);
// sum_i y_i A_i
Matrix apply_adjoint(const std::vector<SparseSym>& A, const Vector& y, Index n);

// Runs body(i) for i in [0, count); results must be written to per-index slots.
void for_each_serial(Index count, const std::function<void(Index)>& body);
void for_each_parallel(Index count, const std::function<void(Index)>& body, int threads = 0);

// QCQP_STAB_THREADS if set and positive, otherwise the fallback.
int worker_count(int fallback);

}  // namespace qstab::kernels
