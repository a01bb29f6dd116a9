#pragma once

#include <cstdint>
#include <random>

namespace fogalloc {

/// Engine used by every stochastic component. Draws are converted to floating
/// point by hand below so that streams are identical across standard libraries.
using Rng = std::mt19937_64;

/// Derives an independent child seed from a master seed and a stream index
/// (splitmix64 finalizer over both words).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

inline Rng make_rng(std::uint64_t master, std::uint64_t index) {
  return Rng(derive_seed(master, index));
}

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Exponential with unit mean.
double exponential1(Rng& rng);

}  // namespace fogalloc
