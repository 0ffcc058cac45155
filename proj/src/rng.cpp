#include "wlra/rng.hpp"

#include <cmath>
#include <numbers>

namespace wlra::rng {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t row,
                   std::uint64_t col) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ row);
  return splitmix64(h ^ col);
}

double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t row,
               std::uint64_t col) noexcept {
  const std::uint64_t bits = hash(seed, stream, row, col) >> 11;  // 53 bits
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t row,
              std::uint64_t col) noexcept {
  // Two sub-streams per entry; the low bit of the column slot selects which.
  const double u1 = uniform(seed, stream, row, col << 1);
  const double u2 = uniform(seed, stream, row, (col << 1) | 1U);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sign(std::uint64_t seed, std::uint64_t stream, std::uint64_t row,
            std::uint64_t col) noexcept {
  return (hash(seed, stream, row, col) >> 63) ? 1.0 : -1.0;
}

}  // namespace wlra::rng
