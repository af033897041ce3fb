#pragma once

#include <cstdint>

namespace varw {

// SplitMix64 finalizer; the building block for all stream derivation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of an independent stream identified by (seed, tag, a, b).
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag, std::uint64_t a,
                                   std::uint64_t b) noexcept {
  std::uint64_t h = mix64(seed ^ mix64(tag));
  h = mix64(h ^ a);
  return mix64(h ^ (b * 0xd1342543de82ef95ULL));
}

/// j-th raw word of the stream with the given key (SplitMix64 at position j).
constexpr std::uint64_t stream_word(std::uint64_t key, std::uint64_t j) noexcept {
  return mix64(key + j * 0x9e3779b97f4a7c15ULL);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t word) noexcept {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by multiply-shift.
constexpr std::uint64_t to_below(std::uint64_t word, std::uint64_t bound) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(word) * bound) >> 64);
}

}  // namespace varw
