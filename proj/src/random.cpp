#include "qmcts/random.hpp"

namespace qmcts {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// One 64-bit word from draw `index`: each Philox block yields two words.
std::uint64_t draw_bits(std::uint64_t seed, RandomStream stream, std::uint64_t index) noexcept {
  const std::uint64_t block_index = index >> 1;
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(block_index),
                                   static_cast<std::uint32_t>(block_index >> 32),
                                   static_cast<std::uint32_t>(stream), 0u};
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed),
                               static_cast<std::uint32_t>(seed >> 32)};
  const auto out = Philox4x32::block(ctr, key);
  const std::size_t w = (index & 1u) * 2;
  return (static_cast<std::uint64_t>(out[w]) << 32) | out[w + 1];
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double uniform_closed_open(std::uint64_t seed, RandomStream stream, std::uint64_t index) noexcept {
  return static_cast<double>(draw_bits(seed, stream, index) >> 11) * 0x1.0p-53;
}

double uniform_open(std::uint64_t seed, RandomStream stream, std::uint64_t index) noexcept {
  // 52 bits so that k + 0.5 stays exact and the result never rounds to 1.
  return (static_cast<double>(draw_bits(seed, stream, index) >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace qmcts
