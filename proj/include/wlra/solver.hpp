#pragma once

// Alternating minimization with row clipping for weighted low-rank recovery.
//
// Each half-step solves the weighted least-squares problem for one factor with the other
// held fixed (rows are independent), zeroes rows whose squared norm exceeds
// c * mu * k / n, and re-orthonormalizes with QR. The data are scaled by ||W o M||_2 before
// the loop and the output is scaled back.

#include "wlra/kernels.hpp"
#include "wlra/matcore.hpp"
#include "wlra/problem.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace wlra {

enum class InitMode { Svd, Random };

struct SolverConfig {
  /// T. When unset, ceil(log2(1 / eps_target)) + 4.
  std::optional<int> iterations;
  double clip_const = 2.0;
  /// Incoherence budget. When unset it is measured as the larger generalized incoherence
  /// of the top-k singular factors of W o M.
  std::optional<double> mu;
  InitMode init = InitMode::Svd;
  std::uint64_t seed = 0;
  double rank_tol = kDefaultRankTol;
  double eps_target = 1e-10;

  void validate() const;
  int resolved_iterations() const;
};

/// Iteration t consumes Y_t and produces X_{t+1}, Y_{t+1}.
struct IterationRecord {
  int t = 0;
  double weighted_residual = 0.0;  // ||M - Xbar_{t+1} Y_t^T||_W, original scale
  double kkt_residual = 0.0;       // max over both half-steps, original scale
  Index clipped_rows_x = 0;
  Index clipped_rows_y = 0;
  std::optional<double> dist_x;  // dist_c(X_{t+1}, U)
  std::optional<double> dist_y;  // dist_c(Y_t, V)
};

struct SingularRow {
  int t = 0;
  char side = 'x';  // 'x' or 'y' half-step
  Index row = 0;
};

struct SolveResult {
  DenseMatrix m_hat;       // x_final * y_final^T * sigma_scale
  DenseMatrix x_final;     // Xbar_{T+1}, clipped but not orthonormalized, scaled units
  OrthonormalFactor y_final;  // Y_T
  std::vector<IterationRecord> trace;
  double sigma_scale = 1.0;
  double mu_used = 0.0;
  double clip_threshold = 0.0;
  std::vector<SingularRow> singular_rows;
  /// Set when the truth is known and ||W o N||_2 > lambda_lo sigma_min / (200 k).
  bool outside_regime = false;
};

/// Row-wise minimizer of ||M - X Y^T||_W for fixed Y:
/// X^i = M^i D_i Y (Y^T D_i Y)^{-1}. Rows whose normal matrix has
/// lambda_min < rank_tol * lambda_max use the Moore-Penrose solution and are reported.
kernels::RowSolve weighted_ls_rows(const DenseMatrix& m, const DenseMatrix& w,
                                   const DenseMatrix& y, double rank_tol = kDefaultRankTol);

struct ClipResult {
  DenseMatrix x;
  Index zeroed = 0;
};

/// Keeps rows with ||x^i||^2 <= threshold, zeroes the rest.
ClipResult clip_rows(const DenseMatrix& x, double threshold);

/// QR(Clip(top-k right singular vectors of W o M)). Throws InitFailure when W o M has no
/// usable rank-k part or the clipped factor is rank deficient.
OrthonormalFactor svd_init(const DenseMatrix& m, const DenseMatrix& w, Index k, double threshold,
                           double rank_tol = kDefaultRankTol);

/// Entries b_ij / sqrt(n), b_ij uniform in {-1, +1}. Columns have unit norm but are not
/// orthogonal.
DenseMatrix random_init(Index n, Index k, std::uint64_t seed);

/// ||W o M||_2.
double estimate_sigma_max(const DenseMatrix& m, const DenseMatrix& w);

/// ||(W o (M - X Y^T)) Y||_F.
double kkt_residual(const DenseMatrix& m, const DenseMatrix& w, const DenseMatrix& x,
                    const DenseMatrix& y);

SolveResult alt_minimize(const Problem& problem, const SolverConfig& config,
                         const GroundTruth* truth = nullptr);

}  // namespace wlra
