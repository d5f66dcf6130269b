#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pse/common.hpp"

namespace pse {

/// Counter-based generator: the state is a pure function of (seed, stream
/// keys), so draws keyed by sample index are reproducible regardless of
/// thread scheduling.
class CounterRng {
 public:
  static uint64_t mix(uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static uint64_t key(uint64_t seed, uint64_t s1 = 0, uint64_t s2 = 0, uint64_t s3 = 0) {
    uint64_t z = mix(seed);
    z = mix(z ^ s1);
    z = mix(z ^ s2);
    z = mix(z ^ s3);
    return z;
  }

  explicit CounterRng(uint64_t seed, uint64_t s1 = 0, uint64_t s2 = 0, uint64_t s3 = 0)
      : state_(key(seed, s1, s2, s3)) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  /// Uniform angle in [0, 2*pi).
  double angle() { return uniform(0.0, 2.0 * kPi); }

  Vec in_box(const Box& b) {
    Vec v;
    for (int i = 0; i < b.dim; ++i) v[i] = uniform(b.lo[i], b.hi[i]);
    return v;
  }

  /// Rejection sampling from the bounding box; the loop length depends only
  /// on the stream, not on the caller.
  Vec in_ball(const Vec& center, double radius, int dim) {
    for (;;) {
      Vec v;
      for (int i = 0; i < dim; ++i) v[i] = uniform(-radius, radius);
      if (norm2(v) <= radius * radius) return v + center;
    }
  }

  /// Index draw from a finite distribution (probabilities need not be
  /// normalised exactly; the remainder lands on the last cell).
  int categorical(const std::vector<double>& probs) {
    double u = next_double();
    double acc = 0.0;
    for (size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  uint64_t state_;
};

}  // namespace pse
