#include "wlra/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace wlra::kernels {

namespace row {

void solve_weighted_row(const DenseMatrix& m, const DenseMatrix& w, const DenseMatrix& y,
                        Index i, double rank_tol, DenseMatrix& x, bool& singular) {
  const Index n = y.rows();
  const Index k = y.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  for (Index j = 0; j < n; ++j) {
    const double wij = w(i, j);
    if (wij == 0.0) continue;
    for (Index a = 0; a < k; ++a) {
      const double wya = wij * y(j, a);
      rhs(a) += wya * m(i, j);
      for (Index b = 0; b <= a; ++b) gram(a, b) += wya * y(j, b);
    }
  }
  for (Index a = 0; a < k; ++a)
    for (Index b = a + 1; b < k; ++b) gram(a, b) = gram(b, a);

  // Y^T D_i Y is symmetric PSD; its eigenbasis gives both the conditioning test and the
  // (pseudo-)inverse.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lmax = lambda(k - 1);
  const double cutoff = rank_tol * lmax;
  singular = !(lmax > 0.0) || lambda(0) < cutoff;

  const Eigen::VectorXd coeff = eig.eigenvectors().transpose() * rhs;
  Eigen::VectorXd scaled(k);
  for (Index a = 0; a < k; ++a)
    scaled(a) = (lmax > 0.0 && lambda(a) >= cutoff && lambda(a) > 0.0) ? coeff(a) / lambda(a)
                                                                        : 0.0;
  const Eigen::VectorXd sol = eig.eigenvectors() * scaled;
  for (Index a = 0; a < k; ++a) x(i, a) = sol(a);
}

void gram_extremes(const DenseMatrix& w, const DenseMatrix& f, Index i, double& lo,
                   double& hi) {
  const Index n = f.rows();
  const Index k = f.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
  for (Index j = 0; j < n; ++j) {
    const double wij = w(i, j);
    if (wij == 0.0) continue;
    for (Index a = 0; a < k; ++a) {
      const double wfa = wij * f(j, a);
      for (Index b = 0; b <= a; ++b) gram(a, b) += wfa * f(j, b);
    }
  }
  for (Index a = 0; a < k; ++a)
    for (Index b = a + 1; b < k; ++b) gram(a, b) = gram(b, a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  lo = eig.eigenvalues()(0);
  hi = eig.eigenvalues()(k - 1);
}

double projection_term(const DenseMatrix& w, const DenseMatrix& y, const DenseMatrix& z,
                       Index i) {
  const Index n = y.rows();
  const Index k = y.cols();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);
  for (Index j = 0; j < n; ++j) {
    const double wij = w(i, j);
    if (wij == 0.0) continue;
    for (Index a = 0; a < k; ++a) {
      const double wza = wij * z(j, a);
      for (Index b = 0; b < k; ++b) c(a, b) += wza * y(j, b);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
  const double s = svd.singularValues()(0);
  return s * s;
}

double dot_row(const DenseMatrix& a, Index i, const Vector& x) {
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j) s += a(i, j) * x(j);
  return s;
}

}  // namespace row

namespace serial {

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) * b(i, j);
  return out;
}

Vector matvec(const DenseMatrix& a, const Vector& x) {
  Vector y(a.rows());
  for (Index i = 0; i < a.rows(); ++i) y(i) = row::dot_row(a, i, x);
  return y;
}

RowSolve weighted_ls_rows(const DenseMatrix& m, const DenseMatrix& w, const DenseMatrix& y,
                          double rank_tol) {
  RowSolve out{DenseMatrix::Zero(m.rows(), y.cols()), {}};
  for (Index i = 0; i < m.rows(); ++i) {
    bool singular = false;
    row::solve_weighted_row(m, w, y, i, rank_tol, out.x, singular);
    if (singular) out.singular_rows.push_back(i);
  }
  return out;
}

RowGramExtremes row_gram_extremes(const DenseMatrix& w, const DenseMatrix& f) {
  RowGramExtremes out{Vector(w.rows()), Vector(w.rows())};
  for (Index i = 0; i < w.rows(); ++i) row::gram_extremes(w, f, i, out.min_eig(i), out.max_eig(i));
  return out;
}

Vector projection_terms(const DenseMatrix& w, const DenseMatrix& y, const DenseMatrix& z) {
  Vector out(w.rows());
  for (Index i = 0; i < w.rows(); ++i) out(i) = row::projection_term(w, y, z, i);
  return out;
}

}  // namespace serial
}  // namespace wlra::kernels
