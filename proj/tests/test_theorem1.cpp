// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "offlinelab/theorem1.hpp"
#include "offlinelab/verify.hpp"

using namespace olab;

TEST(T1Spec, RoundsSizeUp) {
  const auto spec = make_t1_spec(1026, 0.9);
  EXPECT_EQ(spec.S, 1029);
  EXPECT_EQ(spec.S1, 1024);
  EXPECT_EQ(spec.requested_S, 1026);
  EXPECT_EQ(spec.family(1).planted_count, 512);
  EXPECT_EQ(spec.family(2).planted_count, 256);
}

TEST(T1Spec, SchemeValidator) {
  EXPECT_TRUE(validate_scheme(standard_scheme(0.9), 0.9).empty());
  auto t = standard_scheme(0.9);
  t.alpha1 = 0.3;
  const auto bad = validate_scheme(t, 0.9);
  EXPECT_NE(std::find(bad.begin(), bad.end(), "marginal"), bad.end());
  EXPECT_THROW(make_t1_spec(9, 0.9, t), ValidationError);
  t = standard_scheme(0.9);
  t.beta1 = 1.0;
  t.beta2 = 1.0;  // keeps nothing consistent and leaves the open interval
  const auto bad2 = validate_scheme(t, 0.9);
  EXPECT_NE(std::find(bad2.begin(), bad2.end(), "interior"), bad2.end());
}

TEST(T1Spec, SubsetSamplerIsSortedAndUniform) {
  Rng rng(1);
  std::vector<int> hits(8, 0);
  for (int k = 0; k < 4000; ++k) {
    const auto sub = sample_subset(8, 3, rng);
    ASSERT_TRUE(std::is_sorted(sub.begin(), sub.end()));
    ASSERT_EQ(std::set<std::int64_t>(sub.begin(), sub.end()).size(), 3u);
    for (auto i : sub) ++hits[i];
  }
  for (int h : hits) EXPECT_NEAR(h / 4000.0, 3.0 / 8.0, 0.04);
}

class T1Model : public ::testing::TestWithParam<double> {};

TEST_P(T1Model, EveryPolicyHasTheClosedFormQ) {
  const double gamma = GetParam();
  const auto spec = make_t1_spec(45, gamma);
  Rng rng(7);
  for (int family = 1; family <= 2; ++family) {
    const auto inst = sample_t1_instance(spec, family, rng);
    const auto m = build_t1(spec, inst);
    const auto f = f_values(spec, family);
    for (int k = 0; k < 10; ++k) {
      const auto q = exact_q(m, random_policy(m.num_states(), rng));
      for (std::size_t i = 0; i < q.size(); ++i) ASSERT_NEAR(q[i], f[i], 1e-10) << "entry " << i;
    }
  }
}

TEST_P(T1Model, ConcentrabilityIsSixteen) {
  const auto spec = make_t1_spec(45, GetParam());
  Rng rng(2);
  for (int family = 1; family <= 2; ++family) {
    const auto m = build_t1(spec, sample_t1_instance(spec, family, rng));
    const auto rep = concentrability(m, mu_theorem1(spec));
    EXPECT_NEAR(rep.value, 16.0, 1e-9);
  }
}

TEST_P(T1Model, GapAndOptimalActionFlip) {
  const double g = GetParam();
  const auto spec = make_t1_spec(45, g);
  Rng rng(3);
  int best[2];
  for (int family = 1; family <= 2; ++family) {
    const auto m = build_t1(spec, sample_t1_instance(spec, family, rng));
    const auto opt = optimal_policy(m);
    EXPECT_NEAR(std::abs(opt.q[0] - opt.q[1]), g * g / (8 * (1 - g)), 1e-10);
    best[family - 1] = greedy_action(opt.q, 0);
  }
  EXPECT_NE(best[0], best[1]);
}

INSTANTIATE_TEST_SUITE_P(Discounts, T1Model, ::testing::Values(0.6, 0.9));

TEST(T1Model, DataNeverCoversZ) {
  const auto spec = make_t1_spec(45, 0.9);
  const auto mu = mu_theorem1(spec);
  EXPECT_EQ(mu.mass(spec.Z(), 0), 0.0);
  EXPECT_EQ(mu.mass(spec.Z(), 1), 0.0);
  EXPECT_NEAR(mu.total(), 1.0, 1e-12);
}

TEST(T1Model, ReferenceMdpIsValid) {
  const auto spec = make_t1_spec(45, 0.9);
  const auto ref = reference_mdp_t1(spec);
  EXPECT_TRUE(ref.check_invariants().empty());
  EXPECT_EQ(ref.reward(spec.Z(), 0), 0.0);
}

TEST(T1Model, DilutionKeepsStartValues) {
  const auto spec = make_t1_spec(45, 0.9);
  Rng rng(4);
  const auto inst = sample_t1_instance(spec, 2, rng);
  const auto base = build_t1(spec, inst);
  const auto dil = dilute(spec, inst, 0.1);
  EXPECT_EQ(dil.mdp.num_states(), spec.S + 1);
  EXPECT_NEAR(dil.mu.total(), 1.0, 1e-12);
  const auto qa = optimal_policy(base).q, qb = optimal_policy(dil.mdp).q;
  EXPECT_NEAR(qa[0], qb[0], 1e-12);
  EXPECT_NEAR(qa[1], qb[1], 1e-12);
  EXPECT_NEAR(dil.mdp.initial_dist()[0], 0.1, 1e-15);
}

TEST(T1Model, FeaturesReproduceBothFunctions) {
  const auto spec = make_t1_spec(45, 0.9);
  const auto phi = linear_features(spec);
  const auto f1 = f_values(spec, 1), f2 = f_values(spec, 2);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    EXPECT_EQ(phi[i][0], f1[i]);
    EXPECT_EQ(phi[i][1], f2[i]);
  }
  const auto gram = feature_gram(spec);
  EXPECT_DOUBLE_EQ(gram[1], gram[2]);
  EXPECT_GT(gram[0] * gram[3] - gram[1] * gram[2], 0.0);
}

TEST(T1Model, InstanceValidation) {
  const auto spec = make_t1_spec(45, 0.9);
  PlantedInstance bad{1, {0, 1}};
  EXPECT_THROW(validate_instance(spec, bad), ValidationError);
  PlantedInstance dup{2, {3, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
  EXPECT_THROW(validate_instance(spec, dup), ValidationError);
}
