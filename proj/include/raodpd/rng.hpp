#pragma once

#include <cstdint>

namespace raodpd {

// Keyed counter-based generator (splitmix64 output function over an
// affine counter). Streams keyed by up to three indices are independent
// of each other and of evaluation order, so parallel reductions over
// replications are schedule-invariant. Normal variates use the inverse
// CDF: each draw consumes exactly one uniform.
class CounterRng {
public:
  explicit CounterRng(uint64_t seed, uint64_t key1 = 0, uint64_t key2 = 0,
                      uint64_t key3 = 0);

  uint64_t next_u64();
  double next_uniform();               // strictly inside (0, 1)
  double next_normal();                // standard normal
  double next_normal(double mean, double sd);

private:
  uint64_t state_;
};

}  // namespace raodpd
