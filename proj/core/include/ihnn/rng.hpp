#pragma once

#include <cstdint>
#include <cstddef>

namespace ihnn {

/// Deterministic pseudo-random stream (splitmix64 core). Unlike the <random>
/// distributions, every draw here is fully specified, so identical seeds give
/// identical streams across compilers and standard libraries.
///
/// A master seed fans out to independent substreams via `substream(id)`, so
/// features, splits, samplers and parameter inits can be varied in isolation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);

  /// Standard normal via Box-Muller (one value per call, no cached state).
  double normal();

  /// Poisson-distributed count (Knuth's method; fine for small means).
  std::uint64_t poisson(double mean);

  /// Independent stream derived from this stream's seed and `id`.
  Rng substream(std::uint64_t id) const;

  /// Current stream state; usable as a seed for another component.
  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace ihnn
