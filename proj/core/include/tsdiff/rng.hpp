#pragma once

#include <cstdint>
#include <random>

namespace tsdiff {

/// SplitMix64 finalizer. Used to derive independent seeds from (seed, counter).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream. Every sampling routine in the library takes one
/// of these by reference; there is no global generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Counter-based split: stream `index` of master `seed`. Streams for
  /// different (seed, index, tag) triples are statistically independent and
  /// do not depend on how many draws other streams made.
  static Rng substream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag = 0) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL * (tag + 1))));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  /// Uniform on the closed integer range [lo, hi].
  long long uniform_int(long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(engine_);
  }

  bool coin() { return uniform_int(0, 1) == 1; }

  double normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace tsdiff
