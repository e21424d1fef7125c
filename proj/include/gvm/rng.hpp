#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gvm::rng {

// Counter-based generator built on the splitmix64 finalizer. Every variate is
// a pure function of (master seed, stream, counter), so simulations are
// reproducible for a fixed master seed regardless of thread count or the
// order in which paths are visited.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Decorrelates per-path streams from the master seed. The +1 offsets keep
// stream 0 / counter 0 away from the identity-ish fixed point at zero.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(master + kGolden * (stream + 1));
}

// Uniform on (0,1), symmetric and bounded away from both endpoints.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = mix64(seed + kGolden * (counter + 1));
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal from two counter slots (Box-Muller, cosine branch).
inline double gaussian(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = uniform01(seed, 2 * counter);
  const double u2 = uniform01(seed, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gvm::rng
