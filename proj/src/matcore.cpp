#include "wlra/matcore.hpp"

#include "wlra/error.hpp"
#include "wlra/kernels.hpp"
#include "wlra/rng.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wlra {

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
        << b.cols();
    throw DimensionError(msg.str());
  }
}

}  // namespace

OrthonormalFactor::OrthonormalFactor(DenseMatrix m, double tolerance)
    : m_(std::move(m)), tol_(tolerance) {
  if (m_.cols() > m_.rows())
    throw DimensionError("orthonormal factor must have at least as many rows as columns");
  const double defect = orthonormality_defect(m_);
  if (!(defect <= tol_)) {
    std::ostringstream msg;
    msg << "factor is not orthonormal: ||F^T F - I||_2 = " << defect << " > " << tol_;
    throw ValidationError(msg.str());
  }
}

double OrthonormalFactor::orthonormality_defect(const DenseMatrix& m) {
  DenseMatrix gram = m.transpose() * m;
  gram -= DenseMatrix::Identity(m.cols(), m.cols());
  return detail::exact_spectral_norm(gram);
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "hadamard");
  return kernels::omp::hadamard(a, b);
}

QrResult qr_orthonormalize(const DenseMatrix& a, double rank_tol) {
  const Index n = a.rows();
  const Index k = a.cols();
  if (k == 0 || n < k) throw DimensionError("qr_orthonormalize: need rows >= cols >= 1");

  Eigen::HouseholderQR<DenseMatrix> qr(a);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(n, k);
  DenseMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

  // sigma(R) = sigma(a), so the rank test needs only the k x k factor.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(r)};
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(k - 1);
  if (!(smax > 0.0) || smin < rank_tol * smax) {
    std::ostringstream msg;
    msg << "qr_orthonormalize: rank deficient (sigma_min = " << smin
        << ", sigma_max = " << smax << ")";
    throw RankDeficientError(msg.str());
  }

  for (Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) {
      r.row(j) *= -1.0;
      q.col(j) *= -1.0;
    }
  }
  return QrResult{OrthonormalFactor(std::move(q)), std::move(r)};
}

SvdResult rank_k_svd(const DenseMatrix& a, Index k) {
  if (k < 1 || k > std::min(a.rows(), a.cols()))
    throw DimensionError("rank_k_svd: need 1 <= k <= min(rows, cols)");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  DenseMatrix u = svd.matrixU().leftCols(k);
  DenseMatrix v = svd.matrixV().leftCols(k);
  Vector sigma = svd.singularValues().head(k);

  // Pin the sign of each pair so the largest-magnitude entry of u is positive.
  for (Index j = 0; j < k; ++j) {
    Index arg = 0;
    u.col(j).cwiseAbs().maxCoeff(&arg);
    if (u(arg, j) < 0.0) {
      u.col(j) *= -1.0;
      v.col(j) *= -1.0;
    }
  }
  return SvdResult{OrthonormalFactor(std::move(u)), std::move(sigma), OrthonormalFactor(std::move(v))};
}

namespace detail {

double exact_spectral_norm(const DenseMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(a)};
  return svd.singularValues()(0);
}

double power_iteration_norm(const DenseMatrix& a) {
  const Index cols = a.cols();
  const DenseMatrix at = a.transpose();
  Vector x(cols);
  for (Index j = 0; j < cols; ++j) x(j) = rng::normal(kPowerSeed, 0, 0, static_cast<std::uint64_t>(j));
  x /= x.norm();

  double lambda = 0.0;
  for (int it = 0; it < kPowerMaxIterations; ++it) {
    const Vector y = kernels::omp::matvec(a, x);
    const double next = y.squaredNorm();
    if (!(next > 0.0)) return 0.0;
    Vector z = kernels::omp::matvec(at, y);
    const double zn = z.norm();
    if (!(zn > 0.0)) return std::sqrt(next);
    x = z / zn;
    const bool converged = it > 0 && std::abs(next - lambda) < kPowerRelTol * next;
    lambda = next;
    if (converged) break;
  }
  return std::sqrt(lambda);
}

}  // namespace detail

double spectral_norm(const DenseMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (std::min(a.rows(), a.cols()) <= detail::kExactSvdMaxDim) return detail::exact_spectral_norm(a);
  return detail::power_iteration_norm(a);
}

double weighted_frobenius_norm(const DenseMatrix& a, const DenseMatrix& w) {
  require_same_shape(a, w, "weighted_frobenius_norm");
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      const double wij = w(i, j);
      if (wij < 0.0) throw ValidationError("weighted_frobenius_norm: negative weight entry");
      s += wij * a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

SubspaceGeometry subspace_geometry(const OrthonormalFactor& y, const OrthonormalFactor& v) {
  if (y.rows() != v.rows() || y.cols() != v.cols())
    throw DimensionError("subspace_geometry: factors must have the same shape");
  const DenseMatrix& ym = y.matrix();
  const DenseMatrix& vm = v.matrix();
  const DenseMatrix c = ym.transpose() * vm;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(c), Eigen::ComputeFullU | Eigen::ComputeFullV);
  SubspaceGeometry g;
  g.cos_theta = std::clamp(svd.singularValues()(c.rows() - 1), 0.0, 1.0);

  const DenseMatrix residual = vm - ym * c;  // (I - Y Y^T) V
  g.sin_theta = std::min(spectral_norm(residual), 1.0);
  g.tan_theta = g.cos_theta > 0.0 ? g.sin_theta / g.cos_theta
                                  : std::numeric_limits<double>::infinity();

  g.aligner = svd.matrixU() * svd.matrixV().transpose();
  g.dist_c = spectral_norm(ym * g.aligner - vm);
  return g;
}

double generalized_incoherence(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw DimensionError("generalized_incoherence: empty matrix");
  const double max_row = a.rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(a.rows()) / static_cast<double>(a.cols()) * max_row;
}

DenseMatrix all_ones(Index rows, Index cols) { return DenseMatrix::Ones(rows, cols); }

bool all_finite(const DenseMatrix& a) { return a.allFinite(); }

}  // namespace wlra
