#pragma once

#include <array>
#include <cstdint>

namespace gmeasure {

// Philox4x32-10 (Salmon et al., SC'11).  Keyed by (seed, stream); step t of a
// stream reads counter block t, so any draw can be recomputed without replaying.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static Block bijection(Block ctr, std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
      ctr = one_round(ctr, key);
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }

  Block block(std::uint64_t t) const noexcept {
    return bijection({static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32),
                      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                     key_);
  }

  /// Uniform in [0,1) with 53 random bits, one per time step.
  double uniform(std::uint64_t t) const noexcept {
    const Block b = block(t);
    const std::uint64_t hi = b[0] >> 5;  // 27 bits
    const std::uint64_t lo = b[1] >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static Block one_round(const Block& c, const std::array<std::uint32_t, 2>& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
};

/// Sequential draws from one stream.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t stream) noexcept : gen_(seed, stream) {}
  double next() noexcept { return gen_.uniform(t_++); }
  std::uint64_t position() const noexcept { return t_; }

 private:
  Philox4x32 gen_;
  std::uint64_t t_ = 0;
};

}  // namespace gmeasure
