#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace dmglue {

// Deterministic random source. The engine (mt19937_64) is bit-exact across
// platforms per the standard; the double mapping below is ours because the
// standard distributions are implementation-defined. Same seed, same stream,
// everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1) with 53 random mantissa bits
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::complex<double> complex_in_box(double half_width) {
    double re = uniform(-half_width, half_width);
    double im = uniform(-half_width, half_width);
    return {re, im};
  }

  // standard normal via Box-Muller (both values derived from our uniforms)
  double normal() {
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    double u2 = uniform01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dmglue
