#pragma once

#include <span>
#include <vector>

namespace raodpd {

// An i.i.d. sample of real observations. Construction validates that the
// sample is nonempty and every entry is finite.
class Sample {
public:
  explicit Sample(std::vector<double> observations);

  int size() const { return static_cast<int>(obs_.size()); }
  double operator[](int i) const { return obs_[static_cast<size_t>(i)]; }
  std::span<const double> observations() const { return obs_; }

  auto begin() const { return obs_.begin(); }
  auto end() const { return obs_.end(); }

private:
  std::vector<double> obs_;
};

// Sum of a set of addends independent of their original order: the values
// are sorted before accumulation, so any permutation of the same multiset
// produces the bit-identical result. Used for all data sums so that the
// statistics are exactly permutation invariant.
double sum_sorted(std::vector<double> values);

}  // namespace raodpd
