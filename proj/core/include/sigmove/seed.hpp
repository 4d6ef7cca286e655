#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace sigmove {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Stable FNV-1a hash of a byte string, finalized with mix64.
std::uint64_t hash_string(std::string_view text) noexcept;

// Derives an independent stream seed from a parent seed and a list of tags.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace sigmove
