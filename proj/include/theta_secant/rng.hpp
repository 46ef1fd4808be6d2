#pragma once

#include <cstdint>

#include "theta_secant/linalg.hpp"

namespace theta_secant {

// xoshiro256** (Blackman & Vigna) with its state filled by splitmix64 from a
// single 64-bit seed. uniform() uses the top 53 bits: (x >> 11) * 2^-53.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // Box-Muller
  cplx complex_uniform(double half_width);  // re, im in [-w, w)
  CVector complex_vector(int n, double half_width);

 private:
  std::uint64_t s_[4];
};

// Independent stream derived from (seed, stream) by splitmix64 mixing.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace theta_secant
