#pragma once

#include <cstdint>
#include <random>

namespace freezetree {

/// Engine used by every sampler in the library. Callers own the engine and
/// pass it by reference; nothing in the library keeps a hidden global stream.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used only to derive independent child seeds from a
/// (seed, stream, index) triple so replicate results do not depend on the
/// order in which workers pick them up.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) + index);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

// Uniform integer in [0, bound). bound must be positive.
template <class Int>
inline Int uniform_index(Rng& rng, Int bound) {
  return std::uniform_int_distribution<Int>(0, bound - 1)(rng);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace freezetree
