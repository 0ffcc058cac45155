#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial reference and an
// OpenMP version. Work is split by output row and each row is computed with the same
// operation order in both, so the two agree bitwise for every thread count. Cross-row
// reductions never happen inside a kernel; callers sum per-row results in index order.

#include "wlra/matcore.hpp"

#include <vector>

namespace wlra::kernels {

struct RowSolve {
  DenseMatrix x;                      // n x k
  std::vector<Index> singular_rows;   // rows solved with the pseudo-inverse, ascending
};

struct RowGramExtremes {
  Vector min_eig;  // per row i: lambda_min(F^T D_i F)
  Vector max_eig;  // per row i: lambda_max(F^T D_i F)
};

namespace serial {
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);
Vector matvec(const DenseMatrix& a, const Vector& x);
RowSolve weighted_ls_rows(const DenseMatrix& m, const DenseMatrix& w, const DenseMatrix& y,
                          double rank_tol);
RowGramExtremes row_gram_extremes(const DenseMatrix& w, const DenseMatrix& f);
Vector projection_terms(const DenseMatrix& w, const DenseMatrix& y, const DenseMatrix& z);
}  // namespace serial

namespace omp {
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);
Vector matvec(const DenseMatrix& a, const Vector& x);
RowSolve weighted_ls_rows(const DenseMatrix& m, const DenseMatrix& w, const DenseMatrix& y,
                          double rank_tol);
RowGramExtremes row_gram_extremes(const DenseMatrix& w, const DenseMatrix& f);
Vector projection_terms(const DenseMatrix& w, const DenseMatrix& y, const DenseMatrix& z);
}  // namespace omp

// Per-row bodies shared by both variants.
namespace row {
void solve_weighted_row(const DenseMatrix& m, const DenseMatrix& w, const DenseMatrix& y,
                        Index i, double rank_tol, DenseMatrix& x, bool& singular);
void gram_extremes(const DenseMatrix& w, const DenseMatrix& f, Index i, double& lo,
                   double& hi);
double projection_term(const DenseMatrix& w, const DenseMatrix& y, const DenseMatrix& z,
                       Index i);
double dot_row(const DenseMatrix& a, Index i, const Vector& x);
}  // namespace row

}  // namespace wlra::kernels
