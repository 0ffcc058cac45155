#pragma once

#include "wlra/matcore.hpp"

namespace wlra {

/// Observation M = M* + N with a non-negative weight matrix W and target rank k.
class Problem {
 public:
  Problem(DenseMatrix m, DenseMatrix w, Index k);

  const DenseMatrix& m() const noexcept { return m_; }
  const DenseMatrix& w() const noexcept { return w_; }
  Index k() const noexcept { return k_; }
  Index n() const noexcept { return m_.rows(); }

 private:
  DenseMatrix m_;
  DenseMatrix w_;
  Index k_;
};

/// Rank-k SVD triple of M* with its condition number and incoherence.
class GroundTruth {
 public:
  GroundTruth(OrthonormalFactor u, Vector sigma, OrthonormalFactor v);

  const OrthonormalFactor& u() const noexcept { return u_; }
  const Vector& sigma() const noexcept { return sigma_; }
  const OrthonormalFactor& v() const noexcept { return v_; }
  double kappa() const noexcept { return kappa_; }
  double mu() const noexcept { return mu_; }
  Index n() const noexcept { return u_.rows(); }
  Index k() const noexcept { return u_.cols(); }

  double sigma_max() const { return sigma_(0); }
  double sigma_min() const { return sigma_(sigma_.size() - 1); }

  /// U diag(sigma) V^T.
  DenseMatrix matrix() const;

 private:
  OrthonormalFactor u_;
  Vector sigma_;
  OrthonormalFactor v_;
  double kappa_;
  double mu_;
};

}  // namespace wlra
