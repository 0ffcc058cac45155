#pragma once

// Counter-based randomness: every draw is a pure function of (seed, stream, row, col),
// so generators can fill entries in any order or in parallel and stay reproducible.

#include <cstdint>

namespace wlra::rng {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

std::uint64_t hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t row,
                   std::uint64_t col) noexcept;

/// Uniform in the open interval (0, 1).
double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t row,
               std::uint64_t col) noexcept;

/// Standard normal via Box-Muller on two independent counters.
double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t row,
              std::uint64_t col) noexcept;

/// +1 or -1 with equal probability.
double sign(std::uint64_t seed, std::uint64_t stream, std::uint64_t row,
            std::uint64_t col) noexcept;

}  // namespace wlra::rng
