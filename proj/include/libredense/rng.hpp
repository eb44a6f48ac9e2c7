#pragma once

// The library's only source of randomness: std::mt19937_64, whose output
// sequence is fixed by the C++ standard, with bounded integers drawn by
// rejection sampling here rather than through std::uniform_int_distribution
// (whose algorithm differs between standard libraries). Equal seeds give
// equal streams on every platform.

#include <cstdint>
#include <random>

#include "libredense/detail/hash.hpp"

namespace libredense {

  class Rng {
   public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    // Independent stream for (seed, stream index), e.g. one per trial.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
      return Rng(detail::mix64(seed ^ detail::mix64(stream + 1)));
    }

    std::uint64_t next() {
      return engine_();
    }

    // Uniform on [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
      std::uint64_t const threshold = (0 - bound) % bound;
      while (true) {
        std::uint64_t const r = engine_();
        if (r >= threshold) {
          return r % bound;
        }
      }
    }

    // Uniform on [lo, hi]
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
      return lo + below(hi - lo + 1);
    }

   private:
    std::mt19937_64 engine_;
  };

}  // namespace libredense
