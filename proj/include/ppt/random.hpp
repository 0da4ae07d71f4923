#pragma once

#include <cstdint>
#include <random>

namespace ppt {

// Per-task engine derived from (base seed, task index) so that results do not
// depend on scheduling.
inline std::mt19937_64 task_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Uniform in [lo, hi) from the top 53 bits; identical on every standard library.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace ppt
