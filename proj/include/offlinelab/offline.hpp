// SPDX-License-Identifier: Apache-2.0
//
// Offline datasets, the two-function learners, the exact Bayes test for
// the single-layer family, and seeded regret experiments.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "offlinelab/mdp.hpp"
#include "offlinelab/rng.hpp"
#include "offlinelab/theorem1.hpp"

namespace olab {

struct Record {
  std::int32_t s = 0;
  std::int8_t a = 0;
  double r = 0.0;
  RewardTag tag = RewardTag::kZero;
  std::int32_t next = 0;
};

struct OfflineDataset {
  std::vector<Record> records;
  std::string instance_hash;
  std::string mu_hash;
  std::uint64_t seed = 0;
};

// Inverse-CDF sampler over (s,a) pairs; index = 2*s + a.
class PairSampler {
 public:
  explicit PairSampler(const DataDistribution& mu);
  std::int64_t sample(Rng& rng) const;

 private:
  std::vector<double> cdf_;
};

std::int32_t sample_next(const TabularMdp& mdp, std::int64_t s, int a, Rng& rng);

OfflineDataset sample_dataset(const TabularMdp& mdp, const DataDistribution& mu, std::int64_t n,
                              std::uint64_t seed);
OfflineDataset sample_dataset(const TabularMdp& mdp, const PairSampler& sampler, std::int64_t n, Rng& rng);

std::string hash_distribution(const DataDistribution& mu);

// Empirical squared Bellman residual of f on the dataset.
double bellman_loss(const QTable& f, const OfflineDataset& d, double gamma);
// Regression loss of f against targets built from f_prev.
double regression_loss(const QTable& f, const QTable& f_prev, const OfflineDataset& d, double gamma);

// Returns 1 or 2; ties go to 1.
int brm_select(const QTable& f1, const QTable& f2, const OfflineDataset& d, double gamma);

struct FqiResult {
  int index = 1;
  int iterations = 0;
  bool fixpoint = false;
  bool oscillation = false;
};
FqiResult fqi(const QTable& f1, const QTable& f2, const OfflineDataset& d, double gamma, int iterations);

struct BayesResult {
  double log_odds = 0.0;  // log P1(D) - log P2(D); +inf or -inf when one side is impossible
  double log_l1 = 0.0;
  double log_l2 = 0.0;
  std::int64_t cells = 0;
  std::string method;  // "grouped" or "bruteforce"
  int decision() const { return log_odds >= 0.0 ? 1 : 2; }
};
// Exact mixture likelihoods over uniformly random planted sets.
BayesResult bayes_distinguisher(const T1FamilySpec& spec, const OfflineDataset& d);
// Direct average over every planted set; S1 <= 16 only.
BayesResult bayes_bruteforce(const T1FamilySpec& spec, const OfflineDataset& d);

enum class Algorithm { kBrm, kFqi, kBayes };
std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct ExperimentConfig {
  std::int64_t S = 1000005;
  double gamma = 0.9;
  std::int64_t n = 5;
  int trials = 200;
  std::uint64_t seed = 0;
  std::vector<Algorithm> algorithms{Algorithm::kBrm, Algorithm::kFqi, Algorithm::kBayes};
  int threads = 1;
  int fqi_iterations = 50;
};

struct TrialRow {
  int trial = 0;
  int family = 0;
  std::string instance_hash;
  Algorithm algorithm = Algorithm::kBrm;
  int action = 0;       // 1 or 2 at the start state
  double regret = 0.0;
  bool correct = false;
  double log_odds = 0.0;  // Bayes only
  bool fqi_fixpoint = false;
  bool fqi_oscillation = false;
};

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::kBrm;
  int trials = 0;
  double mean_regret = 0.0;
  double regret_ci = 0.0;  // 95% normal half-width
  double error_rate = 0.0;
  double error_ci = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::int64_t S = 0;  // after rounding
  double gap = 0.0;    // gamma^2 / (8 (1-gamma))
  bool regret_structure_ok = true;  // every regret is 0 or the gap
  std::vector<TrialRow> rows;
  std::vector<AlgorithmSummary> summary;
};

ExperimentResult run_distinguishing_experiment(const ExperimentConfig& cfg);

}  // namespace olab
