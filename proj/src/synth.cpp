#include "wlra/synth.hpp"

#include "wlra/error.hpp"
#include "wlra/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace wlra {

namespace {

// Stream tags keep the generators' draws disjoint for a shared seed.
constexpr std::uint64_t kStreamTruthU = 0x1000;
constexpr std::uint64_t kStreamTruthV = 0x2000;
constexpr std::uint64_t kStreamWeights = 0x3000;
constexpr std::uint64_t kStreamNoise = 0x4000;

DenseMatrix gaussian(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream) {
  DenseMatrix g(rows, cols);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      g(i, j) = rng::normal(seed, stream, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
  return g;
}

struct WeightFiller {
  Index n;
  std::uint64_t seed;

  DenseMatrix operator()(const weights::AllOnes&) const { return all_ones(n, n); }

  DenseMatrix operator()(const weights::BernoulliInverseP& b) const {
    if (!(b.p > 0.0 && b.p <= 1.0)) throw ValidationError("bernoulli weights: need 0 < p <= 1");
    const double value = 1.0 / b.p;
    DenseMatrix w(n, n);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        w(i, j) = rng::uniform(seed, kStreamWeights, static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(j)) < b.p
                      ? value
                      : 0.0;
    return w;
  }

  DenseMatrix operator()(const weights::DRegular& r) const {
    if (r.d < 1 || r.d > n) {
      std::ostringstream msg;
      msg << "d-regular weights: need 1 <= d <= n (d = " << r.d << ", n = " << n << ")";
      throw ValidationError(msg.str());
    }
    const double value = static_cast<double>(n) / static_cast<double>(r.d);
    DenseMatrix w = DenseMatrix::Zero(n, n);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
      // The d columns with the smallest keys form a uniform d-subset.
      std::vector<std::pair<std::uint64_t, Index>> keys(static_cast<std::size_t>(n));
      for (Index j = 0; j < n; ++j)
        keys[static_cast<std::size_t>(j)] = {
            rng::hash(seed, kStreamWeights, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)), j};
      std::nth_element(keys.begin(), keys.begin() + (r.d - 1), keys.end());
      for (Index t = 0; t < r.d; ++t) w(i, keys[static_cast<std::size_t>(t)].second) = value;
    }
    return w;
  }

  DenseMatrix operator()(const weights::TruncatedHeavyTail& h) const {
    if (!(h.alpha > 0.0) || !(h.cap >= 1.0))
      throw ValidationError("heavy-tail weights: need alpha > 0 and cap >= 1");
    const double mean = truncated_pareto_mean(h.alpha, h.cap);
    DenseMatrix w(n, n);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        const double u = rng::uniform(seed, kStreamWeights, static_cast<std::uint64_t>(i),
                                      static_cast<std::uint64_t>(j));
        w(i, j) = std::min(std::pow(u, -1.0 / h.alpha), h.cap) / mean;
      }
    }
    return w;
  }
};

}  // namespace

double truncated_pareto_mean(double alpha, double cap) {
  // E[min(X, c)] = 1 + int_1^c t^{-alpha} dt
  if (alpha == 1.0) return 1.0 + std::log(cap);
  return 1.0 + (std::pow(cap, 1.0 - alpha) - 1.0) / (1.0 - alpha);
}

GroundTruth gen_ground_truth(Index n, Index k, double kappa, double mu_cap, std::uint64_t seed) {
  if (k < 1 || k > n) throw ValidationError("gen_ground_truth: need 1 <= k <= n");
  if (!(kappa >= 1.0)) throw ValidationError("gen_ground_truth: need kappa >= 1");
  if (!(mu_cap >= 1.0)) throw ValidationError("gen_ground_truth: need mu_cap >= 1");

  Vector sigma(k);
  for (Index i = 0; i < k; ++i)
    sigma(i) = k == 1 ? 1.0 : std::pow(kappa, -static_cast<double>(i) / static_cast<double>(k - 1));

  double best = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < kMaxTruthAttempts; ++attempt) {
    const auto a = static_cast<std::uint64_t>(attempt);
    QrResult u = qr_orthonormalize(gaussian(n, k, seed, kStreamTruthU + a));
    QrResult v = qr_orthonormalize(gaussian(n, k, seed, kStreamTruthV + a));
    const double mu = std::max(generalized_incoherence(u.q.matrix()), generalized_incoherence(v.q.matrix()));
    if (mu <= mu_cap) return GroundTruth(std::move(u.q), sigma, std::move(v.q));
    best = std::min(best, mu);
  }
  std::ostringstream msg;
  msg << "gen_ground_truth: incoherence cap " << mu_cap << " not reached in " << kMaxTruthAttempts
      << " attempts (best " << best << "); try a larger cap";
  throw GenerationFailure(msg.str());
}

DenseMatrix gen_weights(Index n, const WeightSpec& spec) {
  if (n < 1) throw ValidationError("gen_weights: need n >= 1");
  return std::visit(WeightFiller{n, spec.seed}, spec.kind);
}

DenseMatrix gen_noise(Index n, const DenseMatrix& w, const NoiseSpec& spec) {
  if (w.rows() != n || w.cols() != n) throw DimensionError("gen_noise: weight matrix must be n x n");
  if (std::holds_alternative<noise::Zero>(spec.kind)) return DenseMatrix::Zero(n, n);

  const double target = std::get<noise::GaussianScaledToDelta>(spec.kind).delta_target;
  if (!(target >= 0.0)) throw ValidationError("gen_noise: delta target must be non-negative");
  if (target == 0.0) return DenseMatrix::Zero(n, n);
  DenseMatrix g = gaussian(n, n, spec.seed, kStreamNoise);
  const double current = spectral_norm(hadamard(w, g));
  if (!(current > 0.0))
    throw ValidationError("gen_noise: ||W o N||_2 = 0 for every scale; target unreachable");
  g *= target / current;
  return g;
}

Problem assemble_problem(const GroundTruth& truth, const DenseMatrix& w, const DenseMatrix& n_noise) {
  if (n_noise.rows() != truth.n() || n_noise.cols() != truth.n())
    throw DimensionError("assemble_problem: noise must be n x n");
  return Problem(truth.matrix() + n_noise, w, truth.k());
}

}  // namespace wlra
