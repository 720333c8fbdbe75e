#pragma once

#include <cstdint>
#include <random>

namespace pmtm {

using Rng = std::mt19937_64;

// Named purposes for streams derived from one experiment seed, so that e.g.
// the starting point of repetition r is shared by every sampler.
enum class StreamPurpose : std::uint64_t {
  chain = 1,
  start_point = 2,
};

std::uint64_t splitmix64(std::uint64_t x);

// Stream derivation rule: the engine for (seed, repetition, purpose) is
// seeded with splitmix64(splitmix64(seed ^ splitmix64(repetition)) + purpose).
// Draws inside a chain are then fixed by the sequential order of the kernel,
// so a repetition is reproducible regardless of which worker runs it.
Rng make_stream(std::uint64_t seed, std::uint64_t repetition,
                StreamPurpose purpose = StreamPurpose::chain);

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace pmtm
