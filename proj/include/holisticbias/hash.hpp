#pragma once

#include <cstdint>
#include <string_view>

namespace hb {

// Mock fixtures and variant sampling hash with 64-bit FNV-1a over the UTF-8
// bytes, finalized with the SplitMix64 mixer. Both are fixed, published
// algorithms so fixtures port across implementations.
inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = kFnvOffsetBasis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// hash(key, seed, stream) = splitmix64(fnv1a64(key) ^ splitmix64(seed ^ stream))
constexpr std::uint64_t stable_hash(std::string_view key, std::uint64_t seed,
                                    std::uint64_t stream = 0) {
  return splitmix64(fnv1a64(key) ^ splitmix64(seed ^ (stream * 0xd1b54a32d192ed03ULL)));
}

/// Maps a hash onto the open interval (0, 1) using its top 53 bits.
constexpr double unit_interval(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

/// Standard normal deviate from two independent hashes (Box-Muller).
double standard_normal(std::uint64_t h1, std::uint64_t h2);

}  // namespace hb
