#pragma once

#include <cstdint>
#include <random>

namespace necorr {

// Deterministic RNG wrapper. std::mt19937_64 is fully specified by the
// standard, but std::uniform_int_distribution is not, so bounded draws are
// derived here by rejection sampling to keep outputs identical across
// platforms and standard libraries.
class SeededRng {
public:
  explicit SeededRng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform draw in [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  // Uniform double in [0, 1) with 53 bits of randomness.
  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool chance(double p) { return unit() < p; }

private:
  std::mt19937_64 engine_;
};

}  // namespace necorr
