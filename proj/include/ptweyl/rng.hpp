#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ptweyl {

// 64-bit Mersenne Twister (std::mt19937_64, whose output sequence is fixed
// by the standard) with hand-written transforms: the standard library's
// distributions are implementation-defined and would break cross-platform
// reproducibility.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  // Standard normal via Box-Muller; one draw per pair of uniforms.
  double normal() {
    const double u1 = uniform_open0();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 engine_;
};

inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
  return base_seed + trial_index;
}

}  // namespace ptweyl
