// Deterministic RNG stream derivation. Every random draw in a run descends
// from a config seed through named substreams, so identical configs replay
// bit-identically.
#pragma once

#include <cstdint>
#include <random>

namespace ranslice {

// splitmix64 finalizer; good avalanche for combining seed material.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b));
}

inline std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return combine_seed(combine_seed(a, b), c);
}

inline std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                  std::uint64_t d) {
  return combine_seed(combine_seed(a, b, c), d);
}

// Substream tags keep independent purposes (channel, traffic, policy, ...)
// from colliding even when their numeric indexes coincide.
enum class StreamTag : std::uint64_t {
  kScenario = 0x5343454eULL,   // scenario generation
  kChannel = 0x4348414eULL,    // trajectories + fading
  kTraffic = 0x54524146ULL,    // packet arrivals
  kPolicy = 0x504f4c49ULL,     // network init + action sampling
  kShuffle = 0x53485546ULL,    // minibatch shuffling
};

inline std::mt19937_64 make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0,
                                   std::uint64_t b = 0) {
  return std::mt19937_64(combine_seed(seed, static_cast<std::uint64_t>(tag), a, b));
}

}  // namespace ranslice
