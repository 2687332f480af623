// mdm/rng.hpp - Counter-based splittable random streams
#pragma once

#include <cstdint>

namespace mdm
{

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64: output k is mix64(seed + k * golden gamma), so a stream is
/// fully determined by its seed and independent streams are cheap to derive.
class Rng
{
public:
  explicit constexpr Rng(std::uint64_t seed) : state_(seed) {}

  /// Stream for trace `index` of a run with master seed `master`; independent
  /// of how traces are scheduled onto workers.
  static constexpr Rng for_trace(std::uint64_t master, std::uint64_t index)
  {
    return Rng(mix64(master ^ mix64(index + kGamma)));
  }

  constexpr std::uint64_t next_u64()
  {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the closed range [lo, hi] (real).
  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform on the closed range [lo, hi] (integer), without modulo bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi)
  {
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == ~std::uint64_t{0}) return static_cast<std::int64_t>(next_u64());
    const std::uint64_t range = span + 1;
    const std::uint64_t threshold = (0 - range) % range;
    while (true) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) {
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + r % range);
      }
    }
  }

private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

}  // namespace mdm
