#pragma once

#include <array>
#include <cstdint>

namespace qmcts {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw
/// is a pure function of (key, counter), so streams can be split across
/// threads without changing results.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

/// Identifies independent uses of the generator under one seed.
enum class RandomStream : std::uint32_t {
  shifts = 1,
  monte_carlo = 2,
};

inline constexpr const char* kRngId = "philox4x32-10";

/// Uniform double in [0, 1) with 53 random bits: draw `index` of `stream`.
double uniform_closed_open(std::uint64_t seed, RandomStream stream, std::uint64_t index) noexcept;

/// Uniform double in (0, 1): the midpoint of a 52-bit cell, never 0 or 1.
double uniform_open(std::uint64_t seed, RandomStream stream, std::uint64_t index) noexcept;

}  // namespace qmcts
