#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace vlmc {

/// Identifies one independent random stream: a 64-bit seed plus two stream
/// coordinates (the harness uses grid index and replica index).
struct StreamId {
  std::uint64_t seed = 0;
  std::uint32_t major = 0;
  std::uint32_t minor = 0;
};

/// One Philox4x32-10 block: ten rounds over `counter` under `key`.
std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> counter,
                                          std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based Philox4x32-10 generator. Output block i of stream
/// (seed, major, minor) is philox(key = seed, counter = (i, major, minor)),
/// so streams never overlap and any replica can be regenerated in isolation.
///
/// Satisfies UniformRandomBitGenerator.
class Philox {
 public:
  using result_type = std::uint32_t;

  explicit Philox(StreamId id = {}) noexcept;
  Philox(std::uint64_t seed, std::uint32_t major, std::uint32_t minor = 0) noexcept
      : Philox(StreamId{seed, major, minor}) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (index_ == 4) refill();
    return buffer_[index_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    const std::uint64_t hi = (*this)() >> 5;  // 27 bits
    const std::uint64_t lo = (*this)() >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
  }

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> buffer_{};
  unsigned index_ = 4;
};

}  // namespace vlmc
