#pragma once

#include <cstdint>
#include <random>

namespace observatory {

// std::mt19937_64 has a fully specified output sequence, but the standard
// distributions do not. All seeded draws go through this wrapper so plans and
// samples are bit-identical across standard libraries.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace observatory
