#pragma once

// Measured versions of the incoherence / spectral-gap / non-degeneracy assumptions, and the
// per-row inequalities the convergence argument relies on, as runnable probes.

#include "wlra/matcore.hpp"
#include "wlra/problem.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wlra {

/// Smallest mu with max_i {||U^i||^2, ||V^i||^2} <= mu k / n.
double incoherence_mu(const OrthonormalFactor& u, const OrthonormalFactor& v);

/// gamma = ||W - E||_2 / n.
double spectral_gap(const DenseMatrix& w);

struct LambdaBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Extreme eigenvalues of U^T D_i U and V^T D_i V over all rows i, D_i = Diag(W^i).
LambdaBounds lambda_bounds(const OrthonormalFactor& u, const OrthonormalFactor& v,
                           const DenseMatrix& w);

/// Same, restricted to the given rows. Used for large n, where the caller picks a random
/// subset; the result is then only an outer estimate of the full (lo, hi).
LambdaBounds lambda_bounds(const OrthonormalFactor& u, const OrthonormalFactor& v,
                           const DenseMatrix& w, std::span<const Index> rows);

/// |{ i : sigma_min(Y^T D_i Y) <= (1 - eps) lambda_lo }|.
Index bad_index_count(const OrthonormalFactor& y, const DenseMatrix& w, double lambda_lo,
                      double eps);

/// sum_i ||V^T (I - Y Y^T) D_i Y||_2^2.
double projection_sum(const OrthonormalFactor& y, const OrthonormalFactor& v,
                      const DenseMatrix& w);

/// ||(W - E) o (A diag(sigma) B^T)||_2 / (gamma k sigma_max sqrt(rho(A) rho(B))).
/// Expected to be <= 1. When gamma == 0 the ratio is 0 if the numerator vanishes;
/// otherwise ValidationError.
double spectral_lemma_ratio(const DenseMatrix& w, const DenseMatrix& a, const Vector& sigma,
                            const DenseMatrix& b);

/// max_i ||W^i||_1.
double max_row_l1(const DenseMatrix& w);

struct AssumptionThresholds {
  double mu_max = std::numeric_limits<double>::infinity();
  double gamma_max = 1.0;  // strict: gamma < gamma_max
};

struct Verdict {
  std::string name;
  bool pass = false;
  bool heuristic = false;
  std::string detail;
};

struct AssumptionReport {
  Index n = 0;
  Index k = 0;
  std::optional<double> mu;
  double gamma = 0.0;
  std::optional<double> lambda_lo;
  std::optional<double> lambda_hi;
  double d1 = 0.0;
  double w_inf = 0.0;
  std::optional<double> kappa;
  std::optional<double> delta;
  /// Unit-constant forms of the gap requirement (SVD init) and of the ||W||_inf bound
  /// (random init); present when the truth is known.
  std::optional<double> gamma_bound_svd_init;
  std::optional<double> w_inf_bound_random_init;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
};

AssumptionReport assumption_report(const Problem& problem, const GroundTruth* truth,
                                   const AssumptionThresholds& thresholds = {});

}  // namespace wlra
