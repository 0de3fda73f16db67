// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstring>

#include "offlinelab/instance_io.hpp"
#include "offlinelab/offline.hpp"

namespace olab {

PairSampler::PairSampler(const DataDistribution& mu) {
  cdf_.resize(mu.probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.probs.size(); ++i) {
    if (mu.probs[i] < 0.0) throw ValidationError("data distribution has a negative entry");
    acc += mu.probs[i];
    cdf_[i] = acc;
  }
  if (!(acc > 0.0)) throw ValidationError("data distribution has no mass");
}

std::int64_t PairSampler::sample(Rng& rng) const {
  const double u = uniform01(rng) * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) {
    // Rounding pushed u to the total; take the last entry with mass.
    it = std::lower_bound(cdf_.begin(), cdf_.end(), cdf_.back());
  }
  return static_cast<std::int64_t>(it - cdf_.begin());
}

std::int32_t sample_next(const TabularMdp& mdp, std::int64_t s, int a, Rng& rng) {
  const auto row = mdp.row(s, a);
  const double u = uniform01(rng);
  double acc = 0.0;
  for (const auto& t : row) {
    acc += t.prob;
    if (u < acc) return t.next;
  }
  return row.back().next;
}

OfflineDataset sample_dataset(const TabularMdp& mdp, const PairSampler& sampler, std::int64_t n, Rng& rng) {
  if (n < 0) throw ValidationError("dataset size must be non-negative");
  OfflineDataset d;
  d.records.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t idx = sampler.sample(rng);
    const std::int64_t s = idx / 2;
    const int a = static_cast<int>(idx % 2);
    Record r;
    r.s = static_cast<std::int32_t>(s);
    r.a = static_cast<std::int8_t>(a);
    r.r = mdp.reward(s, a);
    r.tag = mdp.reward_tag(s, a);
    r.next = sample_next(mdp, s, a, rng);
    d.records.push_back(r);
  }
  return d;
}

OfflineDataset sample_dataset(const TabularMdp& mdp, const DataDistribution& mu, std::int64_t n,
                              std::uint64_t seed) {
  if (mu.probs.size() != static_cast<std::size_t>(2 * mdp.num_states())) {
    throw ValidationError("data distribution does not match the MDP size");
  }
  Rng rng = make_stream(seed, 0);
  OfflineDataset d = sample_dataset(mdp, PairSampler(mu), n, rng);
  d.seed = seed;
  d.mu_hash = hash_distribution(mu);
  return d;
}

std::string hash_distribution(const DataDistribution& mu) {
  std::string bytes(mu.probs.size() * sizeof(double), '\0');
  if (!mu.probs.empty()) std::memcpy(bytes.data(), mu.probs.data(), bytes.size());
  return hex64(fnv1a64(bytes));
}

}  // namespace olab
