#pragma once

// Counter-based pseudo-random numbers (Philox4x32-10, Salmon et al. 2011).
//
// Every draw is a pure function of (seed, repetition, round, draw index), so a
// repetition or a single round can be regenerated without replaying the ones
// before it, and parallel repetitions never share generator state.

#include <array>
#include <cstdint>
#include <span>

namespace pace {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

/// A substream addressed by (seed, repetition, round). Successive calls to
/// next_u64 / uniform walk the draw index inside that substream.
class Substream {
 public:
  Substream(std::uint64_t seed, std::uint32_t repetition, std::uint64_t round)
      : seed_(seed), repetition_(repetition), round_(round) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint32_t repetition_;
  std::uint64_t round_;
  std::uint32_t draw_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
};

/// Inverse-CDF pick from a probability vector (entries >= 0, summing to ~1).
/// Falls back to the last positive entry when rounding leaves u above the
/// cumulative total.
std::size_t sample_index(std::span<const double> probs, double u);

}  // namespace pace
