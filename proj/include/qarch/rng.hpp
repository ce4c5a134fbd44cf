#pragma once

#include <cstdint>

namespace qarch::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Stafford mix 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based stream keyed by (seed, replicate, substream).  Variates are
// addressed by (time, k): integer time index of the simulation (negative
// during burn-in) and draw index k within that time step.  Random access, so
// two runs that share a time index see identical draws regardless of burn-in
// length or thread schedule.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint32_t replicate, std::uint32_t substream)
      : key_(mix64(mix64(seed + kGolden) +
                   ((static_cast<std::uint64_t>(replicate) << 32) | substream) * kGolden)) {}

  std::uint64_t bits(std::int64_t time, std::uint32_t k) const {
    const auto t32 = static_cast<std::uint32_t>(static_cast<std::int32_t>(time));
    const std::uint64_t ctr = (static_cast<std::uint64_t>(t32) << 32) | k;
    return mix64(key_ + ctr * kGolden);
  }

  // Uniform in [0, 1), 53-bit mantissa.
  double uniform(std::int64_t time, std::uint32_t k) const {
    return static_cast<double>(bits(time, k) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

// Sequential view of the per-time draw sequence; samplers with rejection
// steps pull as many uniforms as they need.
class Draw {
 public:
  Draw(const Stream& s, std::int64_t time) : s_(&s), time_(time) {}
  double next() { return s_->uniform(time_, k_++); }

 private:
  const Stream* s_;
  std::int64_t time_;
  std::uint32_t k_ = 0;
};

}  // namespace qarch::rng
