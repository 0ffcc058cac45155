#include "wlra/diagnostics.hpp"

#include "wlra/error.hpp"
#include "wlra/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wlra {

namespace {

void require_weight_shape(const DenseMatrix& w, Index n, const char* op) {
  if (w.rows() != n || w.cols() != n) {
    std::ostringstream msg;
    msg << op << ": weight matrix must be " << n << "x" << n;
    throw DimensionError(msg.str());
  }
}

void require_non_negative(const DenseMatrix& w, const char* op) {
  if ((w.array() < 0.0).any())
    throw ValidationError(std::string(op) + ": weight matrix has a negative entry");
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

}  // namespace

double incoherence_mu(const OrthonormalFactor& u, const OrthonormalFactor& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw DimensionError("incoherence_mu: factors must have the same shape");
  return std::max(generalized_incoherence(u.matrix()), generalized_incoherence(v.matrix()));
}

double spectral_gap(const DenseMatrix& w) {
  if (w.rows() != w.cols()) throw DimensionError("spectral_gap: weight matrix must be square");
  require_non_negative(w, "spectral_gap");
  const DenseMatrix centered = w - all_ones(w.rows(), w.cols());
  return spectral_norm(centered) / static_cast<double>(w.rows());
}

LambdaBounds lambda_bounds(const OrthonormalFactor& u, const OrthonormalFactor& v,
                           const DenseMatrix& w) {
  require_weight_shape(w, u.rows(), "lambda_bounds");
  if (v.rows() != u.rows() || v.cols() != u.cols())
    throw DimensionError("lambda_bounds: factors must have the same shape");
  const auto eu = kernels::omp::row_gram_extremes(w, u.matrix());
  const auto ev = kernels::omp::row_gram_extremes(w, v.matrix());
  return {std::min(eu.min_eig.minCoeff(), ev.min_eig.minCoeff()),
          std::max(eu.max_eig.maxCoeff(), ev.max_eig.maxCoeff())};
}

LambdaBounds lambda_bounds(const OrthonormalFactor& u, const OrthonormalFactor& v,
                           const DenseMatrix& w, std::span<const Index> rows) {
  require_weight_shape(w, u.rows(), "lambda_bounds");
  if (v.rows() != u.rows() || v.cols() != u.cols())
    throw DimensionError("lambda_bounds: factors must have the same shape");
  if (rows.empty()) throw ValidationError("lambda_bounds: empty row sample");
  LambdaBounds out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (Index i : rows) {
    if (i < 0 || i >= w.rows()) throw DimensionError("lambda_bounds: sampled row out of range");
    for (const DenseMatrix* f : {&u.matrix(), &v.matrix()}) {
      double lo = 0.0, hi = 0.0;
      kernels::row::gram_extremes(w, *f, i, lo, hi);
      out.lo = std::min(out.lo, lo);
      out.hi = std::max(out.hi, hi);
    }
  }
  return out;
}

Index bad_index_count(const OrthonormalFactor& y, const DenseMatrix& w, double lambda_lo,
                      double eps) {
  require_weight_shape(w, y.rows(), "bad_index_count");
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("bad_index_count: eps must lie in (0, 1)");
  const auto ext = kernels::omp::row_gram_extremes(w, y.matrix());
  const double bound = (1.0 - eps) * lambda_lo;
  Index count = 0;
  for (Index i = 0; i < ext.min_eig.size(); ++i)
    if (ext.min_eig(i) <= bound) ++count;
  return count;
}

double projection_sum(const OrthonormalFactor& y, const OrthonormalFactor& v,
                      const DenseMatrix& w) {
  require_weight_shape(w, y.rows(), "projection_sum");
  if (v.rows() != y.rows() || v.cols() != y.cols())
    throw DimensionError("projection_sum: factors must have the same shape");
  const DenseMatrix& ym = y.matrix();
  const DenseMatrix z = v.matrix() - ym * (ym.transpose() * v.matrix());  // (I - Y Y^T) V
  const Vector terms = kernels::omp::projection_terms(w, ym, z);
  double total = 0.0;
  for (Index i = 0; i < terms.size(); ++i) total += terms(i);
  return total;
}

double spectral_lemma_ratio(const DenseMatrix& w, const DenseMatrix& a, const Vector& sigma,
                            const DenseMatrix& b) {
  const Index n = w.rows();
  if (w.cols() != n) throw DimensionError("spectral_lemma_ratio: W must be square");
  if (a.rows() != n || b.rows() != n || a.cols() != b.cols() || sigma.size() != a.cols())
    throw DimensionError("spectral_lemma_ratio: need A, B n x k and sigma of length k");
  require_non_negative(w, "spectral_lemma_ratio");

  const DenseMatrix h = a * sigma.asDiagonal() * b.transpose();
  const DenseMatrix centered = w - all_ones(n, n);
  const double numerator = spectral_norm(kernels::omp::hadamard(centered, h));
  const double gamma = spectral_norm(centered) / static_cast<double>(n);
  const double k = static_cast<double>(a.cols());
  const double smax = sigma.cwiseAbs().maxCoeff();
  const double denom =
      gamma * k * smax * std::sqrt(generalized_incoherence(a) * generalized_incoherence(b));
  if (denom == 0.0) {
    if (numerator == 0.0) return 0.0;
    throw ValidationError("spectral_lemma_ratio: zero denominator with non-zero numerator");
  }
  return numerator / denom;
}

double max_row_l1(const DenseMatrix& w) { return w.cwiseAbs().rowwise().sum().maxCoeff(); }

bool AssumptionReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

AssumptionReport assumption_report(const Problem& problem, const GroundTruth* truth,
                                   const AssumptionThresholds& thresholds) {
  const DenseMatrix& w = problem.w();
  AssumptionReport r;
  r.n = problem.n();
  r.k = problem.k();
  r.gamma = spectral_gap(w);
  r.d1 = max_row_l1(w);
  r.w_inf = w.cwiseAbs().maxCoeff();

  if (truth) {
    if (truth->n() != problem.n() || truth->k() != problem.k())
      throw DimensionError("assumption_report: ground truth shape does not match the problem");
    r.mu = truth->mu();
    const LambdaBounds lb = lambda_bounds(truth->u(), truth->v(), w);
    r.lambda_lo = lb.lo;
    r.lambda_hi = lb.hi;
    r.kappa = truth->kappa();
    const DenseMatrix noise = problem.m() - truth->matrix();
    r.delta = spectral_norm(kernels::omp::hadamard(w, noise));

    const double n = static_cast<double>(r.n);
    const double k = static_cast<double>(r.k);
    const double mu = *r.mu;
    const double kappa = *r.kappa;
    const double lam = std::max(*r.lambda_lo, 0.0);
    const double first = r.d1 > 0.0 ? std::sqrt(n / r.d1) * lam / (kappa * std::pow(mu, 1.5) * k * k)
                                     : std::numeric_limits<double>::infinity();
    const double second = lam / (std::pow(kappa, 1.5) * mu * k * k);
    r.gamma_bound_svd_init = std::min(first, second);
    const double logn = std::log(n);
    r.w_inf_bound_random_init = logn > 0.0 ? lam * n / (k * k * mu * logn * logn)
                                           : std::numeric_limits<double>::infinity();
  }

  if (r.mu) {
    r.verdicts.push_back({"A1_incoherence", *r.mu <= thresholds.mu_max, false,
                          "mu = " + fmt(*r.mu) + ", budget " + fmt(thresholds.mu_max)});
  }
  r.verdicts.push_back({"A2_spectral_gap", r.gamma < thresholds.gamma_max, false,
                        "gamma = " + fmt(r.gamma) + " < " + fmt(thresholds.gamma_max)});
  if (r.lambda_lo) {
    r.verdicts.push_back({"A3_non_degenerate", *r.lambda_lo > 0.0, false,
                          "lambda_lo = " + fmt(*r.lambda_lo) + " > 0"});
  }
  if (!r.lambda_lo) {
    // Without U, V only the structural part is checkable: an empty row or column of W forces
    // lambda_min(U^T D_i U) or lambda_min(V^T D_j V) to zero for every factor.
    const bool rows_ok = (w.array() > 0.0).rowwise().any().all();
    const bool cols_ok = (w.array() > 0.0).colwise().any().all();
    r.verdicts.push_back({"A3_non_degenerate", rows_ok && cols_ok, false,
                          "structural: every row and column of W has a positive entry"});
  }
  if (r.gamma_bound_svd_init) {
    r.verdicts.push_back({"gap_requirement_svd_init", r.gamma <= *r.gamma_bound_svd_init, true,
                          "gamma = " + fmt(r.gamma) + " <= " + fmt(*r.gamma_bound_svd_init) +
                              " (unit constants)"});
  }
  return r;
}

}  // namespace wlra
