#include "wlra/solver.hpp"

#include "wlra/diagnostics.hpp"
#include "wlra/error.hpp"
#include "wlra/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wlra {

namespace {

constexpr std::uint64_t kStreamRandomInit = 0x5000;

void check_finite(const DenseMatrix& a, const char* what, int t) {
  if (!all_finite(a)) {
    std::ostringstream msg;
    msg << "alt_minimize: non-finite " << what << " at iteration " << t;
    throw NumericalDivergence(msg.str(), t);
  }
}

OrthonormalFactor orthonormalize_iterate(const DenseMatrix& a, double rank_tol, const char* what,
                                         int t) {
  try {
    return qr_orthonormalize(a, rank_tol).q;
  } catch (const RankDeficientError& e) {
    std::ostringstream msg;
    msg << "alt_minimize: clipped " << what << " is rank deficient at iteration " << t << ": "
        << e.what();
    throw NumericalDivergence(msg.str(), t);
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (iterations && *iterations < 1) throw ValidationError("solver: iterations must be >= 1");
  if (!(clip_const >= 2.0)) throw ValidationError("solver: clip constant must be >= 2");
  if (mu && !(*mu > 0.0)) throw ValidationError("solver: mu must be positive");
  if (!(eps_target > 0.0)) throw ValidationError("solver: eps_target must be positive");
  if (!(rank_tol >= 0.0 && rank_tol < 1.0)) throw ValidationError("solver: rank_tol must lie in [0, 1)");
}

int SolverConfig::resolved_iterations() const {
  if (iterations) return *iterations;
  return static_cast<int>(std::ceil(std::log2(1.0 / eps_target))) + 4;
}

kernels::RowSolve weighted_ls_rows(const DenseMatrix& m, const DenseMatrix& w,
                                   const DenseMatrix& y, double rank_tol) {
  if (m.rows() != w.rows() || m.cols() != w.cols())
    throw DimensionError("weighted_ls_rows: M and W must have the same shape");
  if (y.rows() != m.cols() || y.cols() < 1)
    throw DimensionError("weighted_ls_rows: Y must be cols(M) x k with k >= 1");
  return kernels::omp::weighted_ls_rows(m, w, y, rank_tol);
}

ClipResult clip_rows(const DenseMatrix& x, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("clip_rows: threshold must be positive");
  ClipResult out{x, 0};
  for (Index i = 0; i < x.rows(); ++i) {
    if (x.row(i).squaredNorm() > threshold) {
      out.x.row(i).setZero();
      ++out.zeroed;
    }
  }
  return out;
}

OrthonormalFactor svd_init(const DenseMatrix& m, const DenseMatrix& w, Index k, double threshold,
                           double rank_tol) {
  const SvdResult svd = rank_k_svd(hadamard(w, m), k);
  const double top = svd.sigma(0);
  if (!(top > 0.0) || svd.sigma(k - 1) < rank_tol * top)
    throw InitFailure("svd_init: W o M has numerical rank below k");
  const ClipResult clipped = clip_rows(svd.v.matrix(), threshold);
  try {
    return qr_orthonormalize(clipped.x, rank_tol).q;
  } catch (const RankDeficientError& e) {
    throw InitFailure(std::string("svd_init: clipped factor is rank deficient: ") + e.what());
  }
}

DenseMatrix random_init(Index n, Index k, std::uint64_t seed) {
  if (k < 1 || k > n) throw DimensionError("random_init: need 1 <= k <= n");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  DenseMatrix y(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < k; ++j)
      y(i, j) = rng::sign(seed, kStreamRandomInit, static_cast<std::uint64_t>(i),
                          static_cast<std::uint64_t>(j)) *
                scale;
  return y;
}

double estimate_sigma_max(const DenseMatrix& m, const DenseMatrix& w) {
  return spectral_norm(hadamard(w, m));
}

double kkt_residual(const DenseMatrix& m, const DenseMatrix& w, const DenseMatrix& x,
                    const DenseMatrix& y) {
  if (m.rows() != w.rows() || m.cols() != w.cols())
    throw DimensionError("kkt_residual: M and W must have the same shape");
  if (x.rows() != m.rows() || y.rows() != m.cols() || x.cols() != y.cols())
    throw DimensionError("kkt_residual: X must be rows(M) x k and Y cols(M) x k");
  const DenseMatrix residual = m - x * y.transpose();
  return (kernels::omp::hadamard(w, residual) * y).norm();
}

SolveResult alt_minimize(const Problem& problem, const SolverConfig& config,
                         const GroundTruth* truth) {
  config.validate();
  const DenseMatrix& w = problem.w();
  const Index n = problem.n();
  const Index k = problem.k();
  if (truth && (truth->n() != n || truth->k() != k))
    throw DimensionError("alt_minimize: ground truth shape does not match the problem");

  double scale = estimate_sigma_max(problem.m(), w);
  if (!(scale > 0.0)) scale = 1.0;
  const DenseMatrix m = problem.m() / scale;
  const DenseMatrix mt = m.transpose();
  const DenseMatrix wt = w.transpose();

  double mu = 0.0;
  if (config.mu) {
    mu = *config.mu;
  } else {
    const SvdResult top = rank_k_svd(hadamard(w, m), k);
    mu = std::max(generalized_incoherence(top.u.matrix()), generalized_incoherence(top.v.matrix()));
  }
  const double threshold = config.clip_const * mu * static_cast<double>(k) / static_cast<double>(n);

  OrthonormalFactor y = config.init == InitMode::Svd
                            ? svd_init(m, w, k, threshold, config.rank_tol)
                            : qr_orthonormalize(random_init(n, k, config.seed), config.rank_tol).q;

  bool outside_regime = false;
  if (truth) {
    const double delta = spectral_norm(hadamard(w, problem.m() - truth->matrix()));
    const LambdaBounds lb = lambda_bounds(truth->u(), truth->v(), w);
    outside_regime = delta > lb.lo * truth->sigma_min() / (200.0 * static_cast<double>(k));
  }

  const int iterations = config.resolved_iterations();
  std::vector<IterationRecord> trace;
  trace.reserve(static_cast<std::size_t>(iterations));
  std::vector<SingularRow> singular;
  DenseMatrix x_final;
  std::optional<OrthonormalFactor> y_final;

  for (int t = 1; t <= iterations; ++t) {
    IterationRecord rec;
    rec.t = t;
    if (truth) rec.dist_y = subspace_geometry(y, truth->v()).dist_c;

    const kernels::RowSolve xs = kernels::omp::weighted_ls_rows(m, w, y.matrix(), config.rank_tol);
    check_finite(xs.x, "X least-squares solution", t);
    for (Index i : xs.singular_rows) singular.push_back({t, 'x', i});
    const double kkt_x = kkt_residual(m, w, xs.x, y.matrix());
    ClipResult xbar = clip_rows(xs.x, threshold);
    rec.clipped_rows_x = xbar.zeroed;
    rec.weighted_residual = weighted_frobenius_norm(m - xbar.x * y.matrix().transpose(), w) * scale;
    const OrthonormalFactor x = orthonormalize_iterate(xbar.x, config.rank_tol, "X", t);
    if (truth) rec.dist_x = subspace_geometry(x, truth->u()).dist_c;

    const kernels::RowSolve ys = kernels::omp::weighted_ls_rows(mt, wt, x.matrix(), config.rank_tol);
    check_finite(ys.x, "Y least-squares solution", t);
    for (Index i : ys.singular_rows) singular.push_back({t, 'y', i});
    const double kkt_y = kkt_residual(mt, wt, ys.x, x.matrix());
    ClipResult ybar = clip_rows(ys.x, threshold);
    rec.clipped_rows_y = ybar.zeroed;
    rec.kkt_residual = std::max(kkt_x, kkt_y) * scale;

    if (t == iterations) {
      x_final = std::move(xbar.x);
      y_final.emplace(y);
    }
    y = orthonormalize_iterate(ybar.x, config.rank_tol, "Y", t);
    trace.push_back(rec);
  }

  SolveResult out{x_final * y_final->matrix().transpose() * scale,
                  x_final,
                  std::move(*y_final),
                  std::move(trace),
                  scale,
                  mu,
                  threshold,
                  std::move(singular),
                  outside_regime};
  check_finite(out.m_hat, "output", iterations);
  return out;
}

}  // namespace wlra
