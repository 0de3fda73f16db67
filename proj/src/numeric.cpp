// SPDX-License-Identifier: Apache-2.0

#include "offlinelab/numeric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace olab {

void KahanSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double log_factorial(std::int64_t n) {
  if (n < 0) throw std::domain_error("log_factorial of negative");
  if (n < 2) return 0.0;
  int sign = 0;
  // lgamma_r does not touch the global signgam, so it is safe on threads.
  return lgamma_r(static_cast<double>(n) + 1.0, &sign);
}

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

std::int64_t choose_exact(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __int128 r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::int64_t>::max()) throw std::overflow_error("binomial overflow");
  }
  return static_cast<std::int64_t>(r);
}

double partitioned_sum(std::int64_t count, int partitions, int threads,
                       const std::function<double(std::int64_t)>& term) {
  if (count <= 0) return 0.0;
  const int parts = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(partitions, count)));
  std::vector<double> chunk(parts, 0.0);
  auto run = [&](int p) {
    const std::int64_t lo = count * p / parts, hi = count * (p + 1) / parts;
    KahanSum k;
    for (std::int64_t i = lo; i < hi; ++i) k.add(term(i));
    chunk[p] = k.value();
  };
  if (threads > 1 && parts > 1) {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads && t < parts; ++t) {
      pool.emplace_back([&, t] {
        for (int p = t; p < parts; p += threads) run(p);
      });
    }
    for (auto& th : pool) th.join();
  } else {
    for (int p = 0; p < parts; ++p) run(p);
  }
  while (chunk.size() > 1) {
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < chunk.size(); i += 2) next.push_back(chunk[i] + chunk[i + 1]);
    if (chunk.size() % 2) next.push_back(chunk.back());
    chunk.swap(next);
  }
  return chunk[0];
}

void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace olab
