#ifndef SIMREG_RNG_HPP
#define SIMREG_RNG_HPP

#include <cmath>
#include <cstdint>

namespace simreg {

/// Counter-based 64-bit generator. Every output is a SplitMix64 finalizer
/// applied to key + counter*phi, where the key is derived from (seed, stream).
/// Distinct (seed, stream) pairs land at far-apart offsets of one master
/// sequence, so per-replication and per-curve noise streams can be drawn
/// independently while reruns stay bit-identical.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(derive_key(seed, stream)) {}

  std::uint64_t next_u64() noexcept { return mix(key_ + (++counter_) * kPhi); }

  /// Uniform on [0, 1), 53-bit resolution.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_double(); }

  /// Standard normal via Marsaglia's polar method; the paired value is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

private:
  static constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix(seed + kPhi) ^ mix(stream * kPhi + 0xD1B54A32D192ED03ull);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace simreg

#endif
