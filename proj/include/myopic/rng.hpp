#pragma once

#include <cstdint>
#include <random>

namespace myopic {

using Rng = std::mt19937_64;

// Purpose tags keep streams for different consumers disjoint even when they
// share a seed and index.
enum class StreamTag : std::uint32_t {
  codebook = 1,
  trial = 2,
  survey = 3,
  census = 4,
  attack = 5,
  covering = 6,
  selftest = 7,
};

// Independent stream for (seed, tag, index). Any trial can be replayed in
// isolation, so the harness may run trials in any order.
inline Rng make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace myopic
