#pragma once

#include <cstdint>
#include <random>

namespace mpbo {

// Seeded random stream. Bounded draws use rejection sampling instead of
// std::uniform_int_distribution, whose output is implementation-defined;
// every draw here is fully determined by the seed and the call sequence.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on {0, ..., bound-1}. bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mpbo
