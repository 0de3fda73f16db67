// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace olab {

// Neumaier-compensated running sum.
class KahanSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double log_factorial(std::int64_t n);
double log_choose(std::int64_t n, std::int64_t k);
std::int64_t choose_exact(std::int64_t n, std::int64_t k);  // throws on overflow

// Sums term(i) for i in [0, count) split into `partitions` contiguous
// chunks; chunk sums are combined by a fixed pairwise tree so the result
// depends only on the partition count. Chunks run on threads when
// `threads` > 1.
double partitioned_sum(std::int64_t count, int partitions, int threads,
                       const std::function<double(std::int64_t)>& term);

// Visits every k-subset of {0..n-1} in lexicographic order.
void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn);

}  // namespace olab
