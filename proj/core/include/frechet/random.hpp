#ifndef FRECHET_RANDOM_HPP
#define FRECHET_RANDOM_HPP

#include <cstdint>
#include <random>

namespace frechet {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based child seed: the seed of item `index` in stream `stream`
/// depends only on (root, stream, index), so adding items never perturbs
/// the ones already drawn.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(mix64(root) ^ stream) ^ index);
}

inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

}  // namespace frechet

#endif  // FRECHET_RANDOM_HPP
