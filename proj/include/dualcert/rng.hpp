#pragma once

#include <cmath>
#include <cstdint>

namespace dualcert::rng {

inline std::uint64_t avalanche(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// SplitMix64 step: advances the state and returns the next output word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  return avalanche(state += 0x9E3779B97F4A7C15ULL);
}

/// Derives a child seed from (seed, stream). This is the one mixing function
/// used everywhere substreams are needed: per-column map streams, per-trial
/// seeds h(base, trial) = mix(base, trial), and per-cell sweep seeds
/// h(base, cell, trial) = mix(mix(base, cell), trial). The multiplier is odd,
/// so distinct stream ids map to distinct pre-avalanche states.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  return avalanche(seed +
                   0x9E3779B97F4A7C15ULL * (stream + 0x632BE59BD9B4E019ULL));
}

/// Deterministic value stream over a SplitMix64 state. Normals come from the
/// Box-Muller transform on pairs of uniforms, so a stream's output depends
/// only on its seed and the draw sequence.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform draw in (0, 1]; never returns 0, so log() is always finite.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

  double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  /// Unbiased uniform integer in [0, n), by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (-n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace dualcert::rng
