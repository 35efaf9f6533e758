#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace recon {

/// Seeded random stream used by every stochastic routine in the library.
///
/// Uniforms are built from the raw 64-bit Mersenne Twister output and
/// normals from the inverse normal CDF, so a seed yields the same stream on
/// any standard library (the std:: distributions are implementation defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform integer on [0, n); n > 0.
  std::size_t index(std::size_t n);

  double normal();

  /// +1 or -1 with equal probability.
  double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; turns (seed + k) into well-separated engine seeds.
std::uint64_t mix_seed(std::uint64_t seed);

/// Inverse of the standard normal CDF, accurate to ~1e-15 on (0, 1).
double normal_quantile(double p);

}  // namespace recon
