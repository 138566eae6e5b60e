#ifndef ALIGNPPL_RNG_HPP
#define ALIGNPPL_RNG_HPP

#include <cstdint>

namespace alignppl {

/// Counter-based splittable PRNG. A stream is a 128-bit key plus a draw
/// counter; `child` derives statistically independent streams from labels, so
/// per-particle and per-step substreams are reproducible regardless of
/// scheduling order.
class Rng {
 public:
  Rng() = default;

  static Rng fromSeed(uint64_t seed) {
    Rng r;
    r.k0_ = mix64(seed ^ 0x9E3779B97F4A7C15ull);
    r.k1_ = mix64(seed + 0xBF58476D1CE4E5B9ull);
    return r;
  }

  Rng child(uint64_t a, uint64_t b = 0) const {
    Rng r;
    r.k0_ = mix64(k0_ ^ mix64(a + 0x94D049BB133111EBull));
    r.k1_ = mix64(k1_ + mix64(b ^ 0xD6E8FEB86659FD93ull));
    return r;
  }

  uint64_t nextU64() {
    uint64_t h = mix64(k0_ ^ (ctr_ * 0x9E3779B97F4A7C15ull));
    ++ctr_;
    return mix64(h + k1_);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double nextDouble() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n); n must be > 0.
  uint64_t nextBelow(uint64_t n) {
    // multiply-shift; bias is negligible for n << 2^64
    unsigned __int128 m = static_cast<unsigned __int128>(nextU64()) * n;
    return static_cast<uint64_t>(m >> 64);
  }

  uint64_t counter() const { return ctr_; }

 private:
  static uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  uint64_t k0_ = 0x853C49E6748FEA9Bull;
  uint64_t k1_ = 0xDA3E39CB94B95BDBull;
  uint64_t ctr_ = 0;
};

}  // namespace alignppl

#endif
