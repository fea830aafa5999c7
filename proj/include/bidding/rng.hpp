#pragma once

#include <cstdint>

namespace bidding {

// Counter-based randomness: every draw is a pure function of
// (base_seed, trial, step, draw_index). No stream objects are handed
// between workers, so trials can run in any order, on any thread, and
// reproduce bit-identically.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct RngKey {
  uint64_t base_seed = 0;
  uint64_t trial = 0;
};

/// 64 random bits for (key, step, draw_index).
inline uint64_t rng_bits(const RngKey& key, uint64_t step, uint64_t draw_index) {
  uint64_t h = splitmix64(key.base_seed);
  h = splitmix64(h ^ (0xa0761d6478bd642fULL * (key.trial + 1)));
  h = splitmix64(h ^ (0xe7037ed1a0b428dbULL * (step + 1)));
  h = splitmix64(h ^ (0x8ebc6af09c88c6e3ULL * (draw_index + 1)));
  return h;
}

/// Uniform double in [0, 1) at 53-bit resolution.
inline double rng_uniform01(const RngKey& key, uint64_t step, uint64_t draw_index) {
  return static_cast<double>(rng_bits(key, step, draw_index) >> 11) * 0x1.0p-53;
}

/// Per-step view with an auto-incrementing draw index.
class StepRng {
 public:
  StepRng(const RngKey& key, uint64_t step) : key_(key), step_(step) {}

  double uniform01() { return rng_uniform01(key_, step_, next_++); }
  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  RngKey key_;
  uint64_t step_;
  uint64_t next_ = 0;
};

}  // namespace bidding
