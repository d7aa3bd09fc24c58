// Counter-keyed random streams: every trial owns an independent SplitMix64
// stream derived from (seed, trial_id), so trials can be generated in any
// order or in parallel and still reproduce the sequential output.

#pragma once

#include <cstdint>
#include <limits>

namespace swapsim {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class TrialStream {
 public:
  using result_type = std::uint64_t;

  constexpr TrialStream(std::uint64_t seed, std::uint64_t trial_id)
      : state_(splitmix64_mix(seed ^ splitmix64_mix(trial_id + kGolden)) ^ kStreamSalt) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += kGolden;
    return splitmix64_mix(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  constexpr int bit() { return static_cast<int>((*this)() >> 63); }

  /// Uniform integer in [0, n).
  constexpr int below(int n) { return static_cast<int>(uniform() * n); }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0x5EED5EED5EED5EEDULL;
  std::uint64_t state_;
};

}  // namespace swapsim
