#pragma once

#include <cstdint>
#include <limits>

namespace hsl {

// SplitMix64 finalizer; the mixing core for the counter-based generator below.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based generator: each output is a hash of (key, counter), so streams
// can be split by index and results do not depend on scheduling order.
// Not cryptographic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(mix64(seed) ^ mix64(stream * 0xd1342543de82ef95ULL + 1))) {}

  std::uint64_t next_u64() {
    std::uint64_t out = mix64(key_ ^ (counter_ * 0xda942042e4dd58b5ULL));
    ++counter_;
    return out;
  }

  // Unbiased integer in [0, n) via rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Uniform double in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Independent substream; deterministic in (seed of *this, index).
  Rng split(std::uint64_t index) const { return Rng(key_, index + 1); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hsl
