#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace libredense::detail {

  // splitmix64 finalizer
  constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  constexpr std::uint64_t hash_combine(std::uint64_t seed,
                                       std::uint64_t value) noexcept {
    return mix64(seed ^ (value + 0x9E3779B97F4A7C15ULL + (seed << 6)
                         + (seed >> 2)));
  }

  // Two values per multiply, one full mix at the end.
  inline std::uint64_t hash_u32s(std::span<std::uint32_t const> values) noexcept {
    std::uint64_t h = values.size();
    std::size_t   i = 0;
    for (; i + 1 < values.size(); i += 2) {
      std::uint64_t const pair = (std::uint64_t{values[i]} << 32) | values[i + 1];
      h = (h ^ pair) * 0x9E3779B97F4A7C15ULL;
      h ^= h >> 29;
    }
    if (i < values.size()) {
      h = (h ^ values[i]) * 0x9E3779B97F4A7C15ULL;
    }
    return mix64(h);
  }

}  // namespace libredense::detail
