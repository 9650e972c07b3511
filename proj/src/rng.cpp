#include "spikedeig/rng.hpp"

#include <cmath>
#include <numbers>

namespace spikedeig::rng {

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

}  // namespace

Block philox4x32_10(Block ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

Key key_from_seed(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index ^ 0x6A09E667F3BCC909ull));
}

std::array<double, 2> box_muller(const Block& w) noexcept {
  // 1 - u lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - to_unit(w[0], w[1]);
  const double u2 = to_unit(w[2], w[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

Stream::Stream(std::uint64_t seed, std::uint32_t stream_id) noexcept
    : key_(key_from_seed(seed)), stream_id_(stream_id) {}

void Stream::refill() noexcept {
  const Block ctr = {static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                     stream_id_, 0x5354524Du};
  buffer_ = philox4x32_10(ctr, key_);
  ++counter_;
  pos_ = 0;
}

std::uint32_t Stream::next_u32() noexcept {
  if (pos_ >= 4) refill();
  return buffer_[pos_++];
}

double Stream::uniform() noexcept {
  const std::uint32_t hi = next_u32();
  const std::uint32_t lo = next_u32();
  return to_unit(hi, lo);
}

double Stream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  Block w;
  for (auto& x : w) x = next_u32();
  const auto z = box_muller(w);
  spare_ = z[1];
  has_spare_ = true;
  return z[0];
}

}  // namespace spikedeig::rng
