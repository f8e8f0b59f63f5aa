#pragma once

#include <array>
#include <cstdint>

namespace gpptest {

using Seed = std::uint64_t;

// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit
// counter under a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Reproducible random stream identified by (seed, stream id).
///
/// The 256-bit xoshiro256++ state is produced by the Philox block function
/// keyed with the master seed and counting over the stream id, so stream k
/// of seed s is a pure function of (s, k) and can be created on any thread
/// in any order. Replication r of an experiment uses stream id r.
class RandomStream {
 public:
  RandomStream(Seed seed, std::uint64_t stream_id);

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  Seed seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
  Seed seed_;
  std::uint64_t stream_id_;
};

// Stream id for replication `rep` of experiment cell `cell` (e.g. the
// index of xi in a power curve). Cells get disjoint 2^40-wide id ranges.
constexpr std::uint64_t cell_stream_id(std::uint64_t cell, std::uint64_t rep) {
  return (cell << 40) | rep;
}

}  // namespace gpptest
