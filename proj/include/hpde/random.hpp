#pragma once

// Portable draws on top of std::mt19937_64, whose output sequence is fixed by
// the standard. The std distributions are implementation-defined, so the
// conversions are done here.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hpde {

using Rng = std::mt19937_64;

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; one value per call.
inline double standard_normal(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace hpde
