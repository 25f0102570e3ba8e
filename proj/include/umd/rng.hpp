#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace umd {

/// Deterministic random source. All variates are produced from raw
/// mt19937_64 output with fixed arithmetic, so streams are reproducible
/// across platforms and standard library implementations (std::*_distribution
/// is not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller. Consumes two draws per call.
  double normal() {
    double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = gen_();
      if (r >= threshold) return r % n;
    }
  }

  /// Random sign, +1 or -1.
  int sign() { return (gen_() & 1) ? 1 : -1; }

  /// Stable stream splitting: derive(master, stream, index) gives
  /// decorrelated seeds that do not depend on call order.
  static std::uint64_t derive(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) {
    return mix(mix(master + kGolden * (stream + 1)) + kGolden * (index + 1));
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::mt19937_64 gen_;
};

}  // namespace umd
