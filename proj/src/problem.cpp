#include "wlra/problem.hpp"

#include "wlra/diagnostics.hpp"
#include "wlra/error.hpp"

#include <sstream>

namespace wlra {

Problem::Problem(DenseMatrix m, DenseMatrix w, Index k)
    : m_(std::move(m)), w_(std::move(w)), k_(k) {
  if (m_.rows() != m_.cols()) throw DimensionError("problem: observation must be square");
  if (w_.rows() != m_.rows() || w_.cols() != m_.cols())
    throw DimensionError("problem: weight matrix must match the observation's shape");
  if (k_ < 1 || k_ > m_.rows()) {
    std::ostringstream msg;
    msg << "problem: rank k = " << k_ << " outside [1, " << m_.rows() << "]";
    throw ValidationError(msg.str());
  }
  if (!all_finite(m_) || !all_finite(w_)) throw ValidationError("problem: non-finite entry");
  if ((w_.array() < 0.0).any()) throw ValidationError("problem: weight matrix has a negative entry");
}

GroundTruth::GroundTruth(OrthonormalFactor u, Vector sigma, OrthonormalFactor v)
    : u_(std::move(u)), sigma_(std::move(sigma)), v_(std::move(v)) {
  if (u_.rows() != v_.rows() || u_.cols() != v_.cols())
    throw DimensionError("ground truth: U and V must have the same shape");
  if (sigma_.size() != u_.cols())
    throw DimensionError("ground truth: sigma length must equal the rank");
  for (Index i = 0; i < sigma_.size(); ++i) {
    if (!(sigma_(i) > 0.0)) throw ValidationError("ground truth: singular values must be positive");
    if (i > 0 && sigma_(i) > sigma_(i - 1))
      throw ValidationError("ground truth: singular values must be non-increasing");
  }
  kappa_ = sigma_(0) / sigma_(sigma_.size() - 1);
  mu_ = incoherence_mu(u_, v_);
}

DenseMatrix GroundTruth::matrix() const {
  return u_.matrix() * sigma_.asDiagonal() * v_.matrix().transpose();
}

}  // namespace wlra
