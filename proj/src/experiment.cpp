// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <thread>

#include "offlinelab/instance_io.hpp"
#include "offlinelab/numeric.hpp"
#include "offlinelab/offline.hpp"

namespace olab {

namespace {

struct Shared {
  T1FamilySpec spec;
  QTable f[2];
  PairSampler sampler;
  double gap;
};

// Regret of playing `action` at the start state and the optimal policy
// elsewhere, computed on the instance by exact evaluation.
double regret_for(const TabularMdp& m, const OptimalResult& opt, int action) {
  const double best = exact_v(m, opt.policy)[0];
  std::vector<int> acts(static_cast<std::size_t>(m.num_states()));
  for (std::int64_t s = 0; s < m.num_states(); ++s) acts[s] = opt.policy.action(s);
  acts[0] = action;
  return best - exact_v(m, Policy::deterministic(acts))[0];
}

void run_trial(const Shared& sh, const ExperimentConfig& cfg, int t, std::vector<TrialRow>& out) {
  Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(t));
  const int family = 1 + static_cast<int>(uniform_index(rng, 2));
  const PlantedInstance inst = sample_t1_instance(sh.spec, family, rng);
  const TabularMdp m = build_t1(sh.spec, inst);
  const std::string hash = instance_hash(instance_json(sh.spec, inst, cfg.seed));
  OfflineDataset d = sample_dataset(m, sh.sampler, cfg.n, rng);
  d.instance_hash = hash;
  const OptimalResult opt = optimal_policy(m);

  for (std::size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
    const Algorithm alg = cfg.algorithms[ai];
    TrialRow row;
    row.trial = t;
    row.family = family;
    row.instance_hash = hash;
    row.algorithm = alg;
    int guess = 1;
    switch (alg) {
      case Algorithm::kBrm:
        guess = d.records.empty() ? 1 : brm_select(sh.f[0], sh.f[1], d, sh.spec.gamma);
        break;
      case Algorithm::kFqi: {
        const FqiResult r = fqi(sh.f[0], sh.f[1], d, sh.spec.gamma, cfg.fqi_iterations);
        guess = r.index;
        row.fqi_fixpoint = r.fixpoint;
        row.fqi_oscillation = r.oscillation;
        break;
      }
      case Algorithm::kBayes: {
        const BayesResult b = bayes_distinguisher(sh.spec, d);
        guess = b.decision();
        row.log_odds = b.log_odds;
        break;
      }
    }
    row.action = greedy_action(sh.f[guess - 1], 0) + 1;
    row.regret = regret_for(m, opt, row.action - 1);
    row.correct = guess == family;
    out[static_cast<std::size_t>(t) * cfg.algorithms.size() + ai] = row;
  }
}

}  // namespace

ExperimentResult run_distinguishing_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw ValidationError("trials must be at least 1");
  if (cfg.n < 0) throw ValidationError("n must be non-negative");
  if (cfg.algorithms.empty()) throw ValidationError("no algorithms selected");
  Shared sh{make_t1_spec(cfg.S, cfg.gamma), {}, PairSampler(DataDistribution{{1.0}}), 0.0};
  sh.f[0] = f_values(sh.spec, 1);
  sh.f[1] = f_values(sh.spec, 2);
  sh.sampler = PairSampler(mu_theorem1(sh.spec));
  sh.gap = cfg.gamma * cfg.gamma / (8.0 * (1.0 - cfg.gamma));

  ExperimentResult res;
  res.config = cfg;
  res.S = sh.spec.S;
  res.gap = sh.gap;
  res.rows.resize(static_cast<std::size_t>(cfg.trials) * cfg.algorithms.size());

  const int threads = std::max(1, std::min(cfg.threads, cfg.trials));
  if (threads == 1) {
    for (int t = 0; t < cfg.trials; ++t) run_trial(sh, cfg, t, res.rows);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int t = w; t < cfg.trials; t += threads) run_trial(sh, cfg, t, res.rows);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (const auto& r : res.rows) {
    if (std::abs(r.regret) > 1e-9 && std::abs(r.regret - sh.gap) > 1e-9) res.regret_structure_ok = false;
  }
  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    AlgorithmSummary s;
    s.algorithm = cfg.algorithms[a];
    s.trials = cfg.trials;
    KahanSum sum, sq;
    int errors = 0;
    for (int t = 0; t < cfg.trials; ++t) {
      const auto& r = res.rows[static_cast<std::size_t>(t) * cfg.algorithms.size() + a];
      sum.add(r.regret);
      sq.add(r.regret * r.regret);
      errors += r.correct ? 0 : 1;
    }
    const double n = cfg.trials;
    s.mean_regret = sum.value() / n;
    const double var = n > 1 ? std::max(0.0, (sq.value() - n * s.mean_regret * s.mean_regret) / (n - 1)) : 0.0;
    s.regret_ci = 1.96 * std::sqrt(var / n);
    s.error_rate = errors / n;
    s.error_ci = 1.96 * std::sqrt(s.error_rate * (1.0 - s.error_rate) / n);
    res.summary.push_back(s);
  }
  return res;
}

}  // namespace olab
