#pragma once

#include <cstdint>

namespace reyeweb {

/// SplitMix64 generator. Small state, trivially splittable, which is what the
/// batch kernels need: every work item derives its own stream from (seed, index)
/// so results do not depend on the thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97f4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi] inclusive.
  long next_int(long lo, long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(next_u64() % span);
  }

  /// Independent child stream for work item `index`; reproducible regardless of
  /// how items are scheduled across threads.
  Rng split(std::uint64_t index) const {
    Rng mixer(state_ ^ (0x9E3779B97f4A7C15ull * (index + 1)));
    return Rng(mixer.next_u64());
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace reyeweb
