#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace caclab {

/// splitmix64 finalizer. Used to turn (master seed, stream id) pairs into
/// well-separated engine seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
  return mix64(master ^ mix64(stream_id));
}

/// Reproducible random stream: a 64-bit Mersenne engine with hand-rolled
/// variate transforms, so the sample sequences depend only on the seed and
/// not on the standard library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream derive(std::uint64_t master, std::uint64_t stream_id) {
    return RandomStream(derive_seed(master, stream_id));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Exponential with the given rate (mean 1/rate) by inverse CDF.
  /// rate <= 0 yields +infinity (a stream that never fires).
  double exponential(double rate) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-uniform01()) / rate;
  }

  /// Box-Muller without caching; two uniforms per draw.
  double normal(double mean, double stddev) {
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double z = std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + stddev * z;
  }

  /// Rejection-sampled truncated normal on [lo, hi].
  double truncated_normal(double mean, double stddev, double lo, double hi) {
    for (;;) {
      double v = normal(mean, stddev);
      if (v >= lo && v <= hi) return v;
    }
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) %
           n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace caclab
