#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sketchlab {

/// Stream identifiers. Every random quantity in an experiment is drawn from
/// a stream keyed by (master seed, stream, index), so results do not depend
/// on the order in which instances, splits or runs are generated.
enum class Stream : std::uint64_t {
  kTrueSignal = 1,  // shared low-rank signal of a dataset
  kNoise = 2,       // per-instance noise, index = instance
  kSplit = 3,       // per-trial permutation, index = trial
  kTrainer = 4,     // per-run initialization and sampling
  kTest = 5,        // free for tests and tools
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_key(std::uint64_t seed, Stream stream, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))) + index);
}

/// Counter-based generator: output i is a fixed bijective mix of (key, i).
/// Uniform and normal variates are computed with explicit formulas rather
/// than <random> distributions, whose algorithms are implementation-defined.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t seed, Stream stream, std::uint64_t index)
      : key_(derive_key(seed, stream, index)) {}

  constexpr std::uint64_t next_u64() {
    return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * (++counter_));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  bool coin() { return (next_u64() >> 63) != 0; }

  /// Standard normal by Box–Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sketchlab
