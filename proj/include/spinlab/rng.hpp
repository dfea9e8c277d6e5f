#pragma once

// Counter-based random numbers. Each stream is a pure function of
// (seed, stream id, counter), so chains and worker threads can draw
// independently and any run is reproducible from the seed alone.

#include <cmath>
#include <cstdint>

namespace spinlab {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(scramble(seed * 0x9E3779B97F4A7C15ull ^
                      scramble(stream + 0x632BE59BD9B4E019ull))) {}

  std::uint64_t next_u64() { return scramble(key_ + (++n_) * 0x9E3779B97F4A7C15ull); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  double gaussian() {
    for (;;) {
      double u = 2.0 * uniform() - 1.0;
      double v = 2.0 * uniform() - 1.0;
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  static std::uint64_t scramble(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

 private:
  std::uint64_t key_;
  std::uint64_t n_ = 0;
};

// Deterministic +/-1 sign for an unordered site pair.
inline int pair_sign(std::uint64_t seed, long i, long j) {
  if (i > j) { long t = i; i = j; j = t; }
  std::uint64_t h = CounterRng::scramble(seed ^ CounterRng::scramble(
      (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j + 0x7fffffffl)));
  return (h & 1) ? 1 : -1;
}

}  // namespace spinlab
