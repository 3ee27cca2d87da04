#pragma once

#include <cstdint>
#include <random>

namespace confrate {

/// Uniform draw in the open interval (0, 1) from the top 53 bits of a
/// mt19937_64 word. Unlike std::uniform_real_distribution the stream is the
/// same under every standard library.
inline double uniform_open01(std::mt19937_64& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace confrate
