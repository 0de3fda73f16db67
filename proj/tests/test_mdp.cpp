// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "offlinelab/mdp.hpp"
#include "offlinelab/rng.hpp"
#include "offlinelab/verify.hpp"

using namespace olab;

namespace {

// Random dense MDP with a few absorbing states so SCCs vary in size.
TabularMdp random_mdp(std::int64_t S, double gamma, Rng& rng) {
  MdpBuilder b(S, gamma);
  for (std::int64_t s = 0; s < S; ++s) {
    b.set_state(s, StateRole::kGeneric);
    for (int a = 0; a < 2; ++a) {
      std::vector<Transition> row;
      if (s >= S - 2) {
        row.push_back({static_cast<std::int32_t>(s), 1.0});
      } else {
        double total = 0.0;
        for (std::int64_t t = 0; t < S; ++t) {
          if (uniform01(rng) < 0.4) {
            const double w = uniform01(rng) + 0.01;
            row.push_back({static_cast<std::int32_t>(t), w});
            total += w;
          }
        }
        if (row.empty()) {
          row.push_back({static_cast<std::int32_t>(S - 1), 1.0});
          total = 1.0;
        }
        for (auto& t : row) t.prob /= total;
      }
      b.add_row(row, uniform01(rng), RewardTag::kGeneric);
    }
  }
  std::vector<double> d0(S, 0.0);
  d0[0] = 1.0;
  b.set_initial(d0);
  return b.build();
}

double max_diff(const QTable& a, const QTable& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(ExactEvaluation, MatchesIterativeEvaluation) {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const auto m = random_mdp(12, 0.8, rng);
    const Policy pi = random_policy(m.num_states(), rng);
    EXPECT_LT(max_diff(exact_q(m, pi), iterative_q(m, pi, 1e-14, 100000)), 1e-10);
    EXPECT_LT(evaluation_residual(m, pi, exact_q(m, pi)), 1e-10);
  }
}

TEST(ExactEvaluation, NonStationaryPolicyFallsBackToLastStep) {
  Rng rng(3);
  const auto m = random_mdp(6, 0.5, rng);
  std::vector<double> probs(2 * 6 * 2);
  for (std::size_t i = 0; i < probs.size(); i += 2) {
    probs[i] = 1.0;
    probs[i + 1] = 0.0;
  }
  const Policy ns = Policy::non_stationary(6, 2, probs);
  const Policy det = Policy::deterministic(std::vector<int>(6, 0));
  EXPECT_NEAR(rollout_value(m, ns, 200), exact_v(m, det)[0], 1e-10);
}

TEST(OptimalPolicy, MatchesValueIteration) {
  Rng rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const auto m = random_mdp(15, 0.9, rng);
    const auto opt = optimal_policy(m);
    EXPECT_LT(max_diff(opt.q, value_iteration(m, 1e-13, 100000)), 1e-9);
    EXPECT_LT(optimality_residual(m, opt.q), 1e-10);
  }
}

TEST(Occupancy, IsADistributionAtEveryStep) {
  Rng rng(8);
  const auto m = random_mdp(10, 0.7, rng);
  const Policy pi = Policy::uniform(10);
  for (int h = 0; h < 5; ++h) {
    const auto occ = occupancy_at_step(m, pi, h);
    EXPECT_NEAR(std::accumulate(occ.probs.begin(), occ.probs.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(Rollout, ConvergesToExactValue) {
  Rng rng(9);
  const auto m = random_mdp(8, 0.6, rng);
  const Policy pi = random_policy(8, rng);
  EXPECT_NEAR(rollout_value(m, pi, 120), expected_return(m, pi), 1e-10);
}

// Two-step chain: 0 -> {1 w.p. 1/2, 2 w.p. 1/2} under action 0, 0 -> 2 under action 1.
TEST(Concentrability, HandComputedChain) {
  MdpBuilder b(3, 0.5);
  b.set_state(0, StateRole::kInitial);
  b.add_row({{1, 0.5}, {2, 0.5}}, 0.0, RewardTag::kZero);
  b.add_row({{2, 1.0}}, 0.0, RewardTag::kZero);
  b.set_state(1, StateRole::kGeneric);
  b.add_state_rows(std::vector<Transition>{{1, 1.0}}, 0.0, RewardTag::kZero);
  b.set_state(2, StateRole::kGeneric);
  b.add_state_rows(std::vector<Transition>{{2, 1.0}}, 1.0, RewardTag::kOne);
  b.set_initial({1.0, 0.0, 0.0});
  const auto m = b.build();
  DataDistribution mu;
  mu.probs = {0.25, 0.25, 0.125, 0.125, 0.125, 0.125};
  const auto rep = concentrability(m, mu);
  // Reach(2) = 1 by action 1, so the worst ratio is 1 / 0.125 = 8.
  EXPECT_FALSE(rep.infinite);
  EXPECT_NEAR(rep.value, 8.0, 1e-12);
  EXPECT_EQ(rep.arg_state, 2);
  EXPECT_TRUE(rep.fixpoint);

  mu.probs = {0.5, 0.5, 0.0, 0.0, 0.0, 0.0};
  EXPECT_TRUE(concentrability(m, mu).infinite);
}

TEST(Invariants, BrokenRowIsNamed) {
  MdpBuilder b(2, 0.9);
  b.set_state(0, StateRole::kInitial);
  b.add_state_rows(std::vector<Transition>{{1, 0.7}}, 0.0, RewardTag::kZero);
  b.set_state(1, StateRole::kTerminalY);
  b.add_state_rows(std::vector<Transition>{{1, 1.0}}, 0.0, RewardTag::kZero);
  b.set_initial({1.0, 0.0});
  const auto m = b.build_unchecked();
  const auto broken = m.check_invariants();
  EXPECT_NE(std::find(broken.begin(), broken.end(), "row_sums"), broken.end());
  EXPECT_THROW(m.validate(), InvariantError);
}

TEST(Invariants, WideUniformRowPasses) {
  // 1/k summed k times drifts by ~1e-11 without compensation.
  const std::int64_t k = 500000;
  MdpBuilder b(k + 1, 0.9);
  std::vector<Transition> row;
  for (std::int64_t i = 1; i <= k; ++i) row.push_back({static_cast<std::int32_t>(i), 1.0 / k});
  b.set_state(0, StateRole::kInitial);
  b.add_state_rows(row, 0.0, RewardTag::kZero);
  for (std::int64_t i = 1; i <= k; ++i) {
    b.set_state(i, StateRole::kGeneric);
    b.add_state_rows(std::vector<Transition>{{static_cast<std::int32_t>(i), 1.0}}, 0.0, RewardTag::kZero);
  }
  std::vector<double> d0(k + 1, 0.0);
  d0[0] = 1.0;
  b.set_initial(d0);
  EXPECT_NO_THROW(b.build());
}

TEST(Policy, ValidationRejectsBadRows) {
  EXPECT_THROW(validate_policy(Policy::stochastic(1, {0.7, 0.7})), ValidationError);
  EXPECT_NO_THROW(validate_policy(Policy::stochastic(1, {0.25, 0.75})));
}

TEST(Rng, DerivedStreamsAreReproducible) {
  Rng a = make_stream(42, 3), b = make_stream(42, 3), c = make_stream(42, 4);
  EXPECT_EQ(a(), b());
  EXPECT_NE(make_stream(42, 3)(), c());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(r);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(uniform_index(r, 7), 7u);
  }
}
