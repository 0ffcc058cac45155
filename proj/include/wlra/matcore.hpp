#pragma once

// Dense matrix carrier and the linear-algebra kernels shared by every other module.

#include <Eigen/Dense>

#include <limits>

namespace wlra {

using Index = Eigen::Index;
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr double kOrthonormalTol = 1e-10;
inline constexpr double kDefaultRankTol = 1e-12;

/// An n x k matrix with orthonormal columns, checked on construction:
/// ||F^T F - I||_2 <= tolerance.
class OrthonormalFactor {
 public:
  explicit OrthonormalFactor(DenseMatrix m, double tolerance = kOrthonormalTol);

  const DenseMatrix& matrix() const noexcept { return m_; }
  Index rows() const noexcept { return m_.rows(); }
  Index cols() const noexcept { return m_.cols(); }
  double tolerance() const noexcept { return tol_; }

  /// ||F^T F - I||_2 for an arbitrary matrix.
  static double orthonormality_defect(const DenseMatrix& m);

 private:
  DenseMatrix m_;
  double tol_;
};

struct QrResult {
  OrthonormalFactor q;
  DenseMatrix r;  // k x k upper triangular, non-negative diagonal
};

struct SvdResult {
  OrthonormalFactor u;
  Vector sigma;  // descending, non-negative
  OrthonormalFactor v;
};

struct SubspaceGeometry {
  double sin_theta = 0.0;
  double cos_theta = 1.0;
  double tan_theta = 0.0;  // +inf when cos_theta == 0
  double dist_c = 0.0;     // ||Y Q - V||_2 for the polar aligner Q; upper bound on the true minimum
  DenseMatrix aligner;     // k x k orthogonal
};

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);

/// Thin QR with the sign convention diag(R) >= 0. Throws RankDeficientError when
/// sigma_min(a) < rank_tol * ||a||_2.
QrResult qr_orthonormalize(const DenseMatrix& a, double rank_tol = kDefaultRankTol);

/// Leading k singular triplets.
SvdResult rank_k_svd(const DenseMatrix& a, Index k);

/// Largest singular value. Exact SVD when min(rows, cols) <= 64, power iteration on
/// A^T A otherwise.
double spectral_norm(const DenseMatrix& a);

/// sqrt(sum_ij w_ij a_ij^2); w must be entrywise non-negative.
double weighted_frobenius_norm(const DenseMatrix& a, const DenseMatrix& w);

SubspaceGeometry subspace_geometry(const OrthonormalFactor& y, const OrthonormalFactor& v);

/// rho(A) = max_i (n/k) ||A^i||^2.
double generalized_incoherence(const DenseMatrix& a);

/// All-ones matrix.
DenseMatrix all_ones(Index rows, Index cols);

bool all_finite(const DenseMatrix& a);

namespace detail {
inline constexpr Index kExactSvdMaxDim = 64;
inline constexpr int kPowerMaxIterations = 10000;
inline constexpr double kPowerRelTol = 1e-12;
inline constexpr unsigned long long kPowerSeed = 0x5EED;

double power_iteration_norm(const DenseMatrix& a);
double exact_spectral_norm(const DenseMatrix& a);
}  // namespace detail

}  // namespace wlra
