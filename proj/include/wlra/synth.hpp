#pragma once

// Seeded generators for ground truths, weight matrices and noise. Every output is a pure
// function of (parameters, seed).

#include "wlra/matcore.hpp"
#include "wlra/problem.hpp"

#include <cstdint>
#include <variant>

namespace wlra {

namespace weights {
struct AllOnes {};
/// Entries 1/p with probability p, else 0; expectation is the all-ones matrix.
struct BernoulliInverseP {
  double p = 1.0;
};
/// Each row holds exactly d entries equal to n/d at uniformly chosen columns.
struct DRegular {
  Index d = 1;
};
/// Pareto(alpha) draws on [1, inf) truncated at cap, divided by the mean of the truncated
/// law so the expectation is the all-ones matrix.
struct TruncatedHeavyTail {
  double alpha = 2.0;
  double cap = 10.0;
};
}  // namespace weights

struct WeightSpec {
  std::variant<weights::AllOnes, weights::BernoulliInverseP, weights::DRegular,
               weights::TruncatedHeavyTail>
      kind;
  std::uint64_t seed = 0;
};

namespace noise {
struct Zero {};
/// Seeded Gaussian rescaled so that ||W o N||_2 equals the target.
struct GaussianScaledToDelta {
  double delta_target = 0.0;
};
}  // namespace noise

struct NoiseSpec {
  std::variant<noise::Zero, noise::GaussianScaledToDelta> kind;
  std::uint64_t seed = 0;
};

inline constexpr int kMaxTruthAttempts = 100;

/// U, V orthonormalized seeded Gaussians, resampled until the measured incoherence is at
/// most mu_cap; sigma geometric from 1 down to 1/kappa.
GroundTruth gen_ground_truth(Index n, Index k, double kappa, double mu_cap, std::uint64_t seed);

DenseMatrix gen_weights(Index n, const WeightSpec& spec);

DenseMatrix gen_noise(Index n, const DenseMatrix& w, const NoiseSpec& spec);

/// M = U diag(sigma) V^T + N.
Problem assemble_problem(const GroundTruth& truth, const DenseMatrix& w, const DenseMatrix& n_noise);

/// Mean of min(X, cap) for X ~ Pareto(alpha) with unit scale.
double truncated_pareto_mean(double alpha, double cap);

}  // namespace wlra
