#pragma once

#include <cstdint>

namespace ghostqc {

// Seedable, splittable pseudo-random generator. split(stream) derives an
// independent child keyed on the *construction* seed, so the derivation does
// not depend on how many values were drawn in between. All draws go through
// our own bit manipulation (no std::*_distribution), which keeps streams
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent child generator for the given stream id.
  Rng split(std::uint64_t stream) const;

  std::uint64_t next_u64();
  double uniform();                          // [0, 1)
  double uniform(double lo, double hi);      // [lo, hi)
  double normal();                           // N(0, 1), Box-Muller
  double normal(double mean, double stddev);
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];  // xoshiro256**
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stateless 64-bit mixing of a seed with a stream id, the same combination
// Rng::split uses. Handy for deriving file- or cell-level seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace ghostqc
