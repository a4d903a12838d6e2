#pragma once

#include <cstdint>

namespace subsample::rng {

// Counter-based generator: every draw is a pure function of (seed, counter),
// so realizations can be produced in any order or in parallel without
// changing the stream.

inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t keyed(std::uint64_t seed, std::uint64_t counter) noexcept {
  return mix64(seed + 0x9E3779B97F4A7C15ull * (counter + 1));
}

// Derives the seed of an indexed substream (one per Monte Carlo realization).
inline std::uint64_t substream(std::uint64_t master,
                               std::uint64_t index) noexcept {
  return mix64(master ^ (0xD6E8FEB86659FD93ull * (index + 1)));
}

// Uniform draw in the open interval (0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t counter) noexcept {
  return (static_cast<double>(keyed(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse of the standard normal CDF, accurate to full double precision.
double normal_quantile(double p);

inline double gaussian(std::uint64_t seed, std::uint64_t counter) {
  return normal_quantile(uniform01(seed, counter));
}

}  // namespace subsample::rng
