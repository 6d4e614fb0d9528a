#pragma once

// Deterministic random streams. Everything random in the library is a pure
// function of a 64-bit seed: SplitMix64 (Steele, Lea & Flood 2014) serves both
// as the mixing hash used to derive sub-seeds and as the stream generator.
// Conversions to doubles are done here rather than through <random>
// distributions, whose outputs differ between standard libraries.

#include <cstdint>
#include <initializer_list>
#include <span>

namespace coordsim {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Order-sensitive hash of a master seed and a list of indices.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller, one draw per call).
  double normal();
  /// Index drawn from a PMF by inverse CDF. Zero-mass entries are never drawn.
  std::size_t categorical(std::span<const double> pmf);

 private:
  std::uint64_t state_;
};

}  // namespace coordsim
