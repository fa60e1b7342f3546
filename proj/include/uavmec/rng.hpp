#ifndef UAVMEC__RNG_HPP_
#define UAVMEC__RNG_HPP_

#include <cstdint>
#include <random>

namespace uavmec {

/// Named random streams derived from one master seed.
enum class Stream : std::uint32_t { Mobility = 1, Arrivals = 2, Testing = 99 };

using Rng = std::mt19937_64;

/// Independent generator for `stream`. Policies sharing a seed see the same draws.
inline Rng make_stream(std::uint64_t master_seed, Stream stream)
{
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

}  // namespace uavmec

#endif  // UAVMEC__RNG_HPP_
