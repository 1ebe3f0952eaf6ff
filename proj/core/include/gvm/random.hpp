#pragma once

#include <cstdint>

#include "gvm/rotmath.hpp"

namespace gvm {

// Deterministic PRNG (splitmix64-seeded xoshiro256++) with hand-rolled
// distributions, so that seeded outputs are identical across platforms and
// standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // standard normal, Box-Muller
  Vec3 unit_vector();

 private:
  std::uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gvm
