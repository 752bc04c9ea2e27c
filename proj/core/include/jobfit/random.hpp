#pragma once

#include <cstdint>

namespace jobfit {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Maps 64 random bits to the open interval (0, 1).
constexpr double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Counter-based stream: every variate is a pure function of
// (seed, trial, slot), so draws can be addressed directly (for common random
// numbers) or consumed sequentially.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t trial)
      : key_(mix64(seed ^ mix64(trial ^ 0xD1B54A32D192ED03ULL))) {}

  double uniform_at(std::uint64_t slot) const { return to_unit_open(mix64(key_ ^ mix64(slot))); }

  double next_uniform() { return uniform_at(kSequentialBase + counter_++); }

  std::uint64_t key() const { return key_; }

 private:
  static constexpr std::uint64_t kSequentialBase = 1ULL << 62;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace jobfit
