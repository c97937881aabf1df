#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mpcg {

/// Deterministic PRNG used everywhere randomness is needed.
///
/// mt19937_64 has a fixed standard-defined sequence; the distribution
/// transforms below are hand-rolled so that generated problems, training
/// runs, and reports are reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n). Rejection-free modulo is fine here: n is
  /// tiny relative to 2^64, the bias is far below anything observable.
  std::uint64_t uniform_index(std::uint64_t n) { return engine_() % n; }

  /// Standard normal via Box-Muller; one value per two uniform draws so
  /// the draw sequence stays simple to reason about.
  double normal() {
    double u1 = uniform();
    const double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mpcg
