// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "offlinelab/divergence.hpp"
#include "offlinelab/theorem2.hpp"
#include "offlinelab/verify.hpp"

using namespace olab;

TEST(T2Params, LayerSizesAndCounts) {
  const auto p = make_t2_params(2, 23, 0.9);
  EXPECT_EQ(p.S, 23);
  ASSERT_EQ(p.layer_size.size(), 2u);
  EXPECT_EQ(p.layer_size[0], 12);
  EXPECT_EQ(p.layer_size[1], 6);
  EXPECT_EQ(p.planted_count[0], (std::vector<std::int64_t>{4, 3}));
  EXPECT_EQ(p.planted_count[1], (std::vector<std::int64_t>{3, 2}));
  EXPECT_EQ(p.Z(), 22);
}

TEST(T2Params, RoundsUpToDivisibleSize) {
  const auto p = make_t2_params(3, 40, 0.9);
  EXPECT_GE(p.S, 40);
  EXPECT_EQ((p.S - 5) % layer_divisor(3), 0);
  EXPECT_EQ(p.requested_S, 40);
}

TEST(T2Params, ContinuationIsDisplayedValueMinusQuarter) {
  const auto p = make_t2_params(3, 52, 0.8);
  for (double a : {p.alpha[0], p.alpha[1]}) EXPECT_NEAR(continuation_value(p, a), v_alpha(p, a) - 0.25, 1e-15);
}

class T2Model : public ::testing::TestWithParam<int> {};

TEST_P(T2Model, EveryPolicyHasTheClosedFormQ) {
  const int L = GetParam();
  const auto p = make_t2_params(L, L == 2 ? 23 : 52, 0.8);
  Rng rng(13);
  for (int family = 1; family <= 2; ++family) {
    const auto inst = sample_t2_instance(p, family, rng);
    const auto m = build_t2(p, inst);
    const auto f = f_values_t2(p, family);
    for (int k = 0; k < 10; ++k) {
      const auto q = exact_q(m, random_policy(m.num_states(), rng));
      for (std::size_t i = 0; i < q.size(); ++i) ASSERT_NEAR(q[i], f[i], 1e-10) << "entry " << i;
    }
  }
}

TEST_P(T2Model, GapFormulaAndFloor) {
  const int L = GetParam();
  const double g = 0.8;
  const auto p = make_t2_params(L, L == 2 ? 23 : 52, g);
  Rng rng(17);
  const double want = g * std::abs(v_alpha(p, p.alpha[0]) - v_alpha(p, p.alpha[1])) / (2 * (1 - g));
  for (int family = 1; family <= 2; ++family) {
    const auto m = build_t2(p, sample_t2_instance(p, family, rng));
    const auto q = optimal_policy(m).q;
    EXPECT_NEAR(std::abs(q[0] - q[1]), want, 1e-10);
    EXPECT_GE(std::abs(q[0] - q[1]), std::pow(g, L + 1) / (24.0 * L * (1 - g)));
  }
}

TEST_P(T2Model, ConcentrabilityWithinLinearBound) {
  const int L = GetParam();
  const auto p = make_t2_params(L, L == 2 ? 23 : 52, 0.8);
  const auto cert = concentrability_certificate_t2(p, 99, 2);
  EXPECT_TRUE(cert.within_bound);
  EXPECT_LE(cert.coefficient, 32.0 * L);
  EXPECT_FALSE(cert.classes.empty());
  EXPECT_FALSE(cert.binding_class.empty());
}

INSTANTIATE_TEST_SUITE_P(Layers, T2Model, ::testing::Values(2, 3));

TEST(T2Model, DataDistributionSumsToOne) {
  const auto p = make_t2_params(3, 52, 0.9);
  EXPECT_NEAR(mu_theorem2(p).total(), 1.0, 1e-12);
}

TEST(T2Model, ReferenceModelsAreValid) {
  const auto p = make_t2_params(2, 23, 0.9);
  for (int family = 1; family <= 2; ++family) EXPECT_TRUE(reference_mdp_t2(p, family).check_invariants().empty());
}

TEST(T2Model, ReferenceTvClosedFormMatchesEnumeration) {
  const auto p = make_t2_params(2, 23, 0.9);
  for (int n = 1; n <= 2; ++n) {
    EXPECT_NEAR(tv_reference_t2_bruteforce(p, n), tv_reference_t2_exact(p, n), 1e-12);
    EXPECT_LE(tv_reference_t2_exact(p, n), n / (8.0 * 4.0) + 1e-15);
  }
}

TEST(T2Model, StateClassesCoverLayout) {
  const auto p = make_t2_params(2, 23, 0.9);
  Rng rng(1);
  const auto inst = sample_t2_instance(p, 1, rng);
  EXPECT_EQ(t2_state_class(p, inst, 0), "start");
  EXPECT_EQ(t2_state_class(p, inst, p.Z()), "Z");
  EXPECT_EQ(t2_state_class(p, inst, p.layer_state(1, inst.planted[0][0])), "I^1");
}
