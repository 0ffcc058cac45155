#include "wlra/kernels.hpp"

#include <cstdint>

namespace wlra::kernels::omp {

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), a.cols());
  const Index rows = a.rows();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) * b(i, j);
  return out;
}

Vector matvec(const DenseMatrix& a, const Vector& x) {
  Vector y(a.rows());
  const Index rows = a.rows();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) y(i) = row::dot_row(a, i, x);
  return y;
}

RowSolve weighted_ls_rows(const DenseMatrix& m, const DenseMatrix& w, const DenseMatrix& y,
                          double rank_tol) {
  RowSolve out{DenseMatrix::Zero(m.rows(), y.cols()), {}};
  const Index rows = m.rows();
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(rows), 0);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) {
    bool singular = false;
    row::solve_weighted_row(m, w, y, i, rank_tol, out.x, singular);
    flags[static_cast<std::size_t>(i)] = singular ? 1 : 0;
  }
  for (Index i = 0; i < rows; ++i)
    if (flags[static_cast<std::size_t>(i)]) out.singular_rows.push_back(i);
  return out;
}

RowGramExtremes row_gram_extremes(const DenseMatrix& w, const DenseMatrix& f) {
  RowGramExtremes out{Vector(w.rows()), Vector(w.rows())};
  const Index rows = w.rows();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) row::gram_extremes(w, f, i, out.min_eig(i), out.max_eig(i));
  return out;
}

Vector projection_terms(const DenseMatrix& w, const DenseMatrix& y, const DenseMatrix& z) {
  Vector out(w.rows());
  const Index rows = w.rows();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) out(i) = row::projection_term(w, y, z, i);
  return out;
}

}  // namespace wlra::kernels::omp
