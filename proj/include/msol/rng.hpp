#pragma once

#include <cstdint>

namespace msol {

/// SplitMix64 finalizer.
inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based SplitMix64: the i-th draw of a stream is
/// mix(key + (i + 1) * 0x9e3779b97f4a7c15), with key = mix(seed ^ mix(stream)).
/// Streams are independent of each other and of draw order elsewhere.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(splitmix64_mix(seed ^ splitmix64_mix(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t at(std::uint64_t i) const noexcept { return splitmix64_mix(key_ + (i + 1) * 0x9e3779b97f4a7c15ULL); }
  std::uint64_t next() noexcept { return at(counter_++); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) noexcept { return a + (b - a) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }
  CounterRng split(std::uint64_t stream) const noexcept { return CounterRng(key_, stream); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace msol
