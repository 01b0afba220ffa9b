#pragma once

#include <cstdint>
#include <limits>

namespace qseal {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator so it plugs into
/// the <random> distributions. Used for short per-window substreams, where
/// seeding cost dominates and a 64-bit state is plenty.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Finalizer-quality 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Independent stream for one (master seed, window) pair. Windows can be
/// simulated in any order and still reproduce the same events.
inline SplitMix64 window_stream(std::uint64_t master_seed, std::int64_t window_index) noexcept {
  const auto w = static_cast<std::uint64_t>(window_index);
  return SplitMix64(mix64(mix64(master_seed ^ 0x5EA15EA15EA15EA1ULL) + mix64(w + 0x632BE59BD9B4E019ULL)));
}

}  // namespace qseal
