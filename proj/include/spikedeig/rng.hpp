#pragma once

#include <array>
#include <cstdint>

namespace spikedeig::rng {

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al. counter-based generator).
Block philox4x32_10(Block counter, Key key) noexcept;

Key key_from_seed(std::uint64_t seed) noexcept;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of replicate `index` under `master`; order-free, so replicates can run
// in any order or in parallel.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

// 53-bit uniform on [0, 1) from two 32-bit words.
inline double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

// Standard normal pair by Box-Muller from one Philox block.
std::array<double, 2> box_muller(const Block& words) noexcept;

// Sequential stream on top of Philox. Each stream is keyed by the seed and
// tagged with a 32-bit stream id, so different consumers of one seed never
// share counters.
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint32_t stream_id = 0) noexcept;

  std::uint32_t next_u32() noexcept;
  double uniform() noexcept;
  double normal() noexcept;

 private:
  void refill() noexcept;

  Key key_;
  std::uint32_t stream_id_;
  std::uint64_t counter_ = 0;
  Block buffer_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spikedeig::rng
