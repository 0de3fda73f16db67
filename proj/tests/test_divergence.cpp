// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "offlinelab/divergence.hpp"
#include "offlinelab/numeric.hpp"
#include "offlinelab/theorem1.hpp"
#include "offlinelab/theorem2.hpp"

using namespace olab;

TEST(Hypergeom, TableMatchesDirectPmf) {
  const HypergeomTable tab(20, 60, 25);
  double total = 0.0;
  for (std::int64_t t = tab.lo(); t <= tab.hi(); ++t) {
    EXPECT_NEAR(tab.pmf(t), hypergeom_pmf(t, 20, 60, 25), 1e-13);
    total += tab.pmf(t);
  }
  EXPECT_NEAR(total, 1.0, 1e-13);
}

TEST(Hypergeom, DirectPmfMatchesCounting) {
  // C(K,t) C(N-K,N'-t) / C(N,N') with exact integers.
  for (std::int64_t t = 0; t <= 5; ++t) {
    const double want = static_cast<double>(choose_exact(8, t) * choose_exact(12, 5 - t)) /
                        static_cast<double>(choose_exact(20, 5));
    EXPECT_NEAR(hypergeom_pmf(t, 8, 20, 5), want, 1e-14);
  }
}

TEST(Hypergeom, WindowDropsNegligibleMass) {
  const HypergeomTable full(250000, 1000000, 500000), win(250000, 1000000, 500000, true);
  EXPECT_LT(win.size(), full.size());
  for (std::int64_t t = win.lo(); t <= win.hi(); t += 97) EXPECT_NEAR(win.pmf(t), full.pmf(t), 1e-15);
}

TEST(Hypergeom, TailBoundHolds) {
  const std::int64_t S1 = 400;
  for (double theta : {0.25, 0.5}) {
    const std::int64_t K = static_cast<std::int64_t>(theta * S1);
    const HypergeomTable tab(K, S1, K);
    for (double eps : {0.05, 0.1, 0.2}) {
      EXPECT_LE(tab.upper_tail((theta + eps) * K), hypergeom_tail(eps, theta, S1) + 1e-15);
    }
  }
}

TEST(Chi2, ExactMatchesEnumerationOnTinyInstance) {
  const auto spec = make_t1_spec(9, 0.6);
  for (int family = 1; family <= 2; ++family) {
    for (int n = 1; n <= 2; ++n) {
      EXPECT_NEAR(chi2_exact_t1(spec, family, n).value, chi2_bruteforce_t1(spec, family, n), 1e-10);
    }
  }
}

TEST(Chi2, PartitionCountDoesNotChangeTheValueMuch) {
  const auto spec = make_t1_spec(100005, 0.9);
  SumOptions one, many;
  many.partitions = 7;
  const double a = chi2_exact_t1(spec, 1, 4, one).value;
  const double b = chi2_exact_t1(spec, 1, 4, many).value;
  EXPECT_NEAR(a, b, 1e-15 + 1e-12 * std::abs(a));
  // Same partition count, same bits.
  EXPECT_EQ(b, chi2_exact_t1(spec, 1, 4, many).value);
}

TEST(Tv, BruteForceBelowAnalyticUpperBound) {
  const auto spec = make_t1_spec(9, 0.6);
  for (int n = 1; n <= 2; ++n) EXPECT_LE(tv_bruteforce_t1(spec, n), tv_upper_t1(spec, n).tv_upper + 1e-12);
  EXPECT_NEAR(tv_bruteforce_t1(spec, 1), 0.0, 1e-15);
}

TEST(Tv, TruncatedBoundDominatesExactValue) {
  const auto spec = make_t1_spec(1000005, 0.9);
  for (int family = 1; family <= 2; ++family) {
    const auto tb = truncated_bound_t1(spec, family, 5);
    EXPECT_GE(tb.bound + 1e-15, chi2_exact_t1(spec, family, 5).value);
  }
}

TEST(Tv, EnumerationRefusesLargeInstances) {
  const auto spec = make_t1_spec(1029, 0.9);
  EXPECT_THROW(tv_bruteforce_t1(spec, 2), SizeGuardError);
}

TEST(DensityRatio, AnalyticMatchesDirect) {
  const auto spec = make_t1_spec(17, 0.9);
  Rng rng(21);
  for (int k = 0; k < 100; ++k) {
    const int family = 1 + k % 2;
    const auto I = sample_t1_instance(spec, family, rng), J = sample_t1_instance(spec, family, rng);
    const auto t = overlap_count(I.planted, J.planted);
    EXPECT_NEAR(density_ratio_direct_t1(spec, I, J), density_ratio_analytic_t1(spec, family, t), 1e-12);
    EXPECT_NEAR(initial_ratio_direct_t1(spec, I, J), initial_ratio_analytic_t1(spec, family, t), 1e-12);
  }
}

TEST(DensityRatio, LayeredBoundHolds) {
  const auto p = make_t2_params(2, 23, 0.9);
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const int family = 1 + k % 2;
    const auto I = sample_t2_instance(p, family, rng), J = sample_t2_instance(p, family, rng);
    for (int l = 1; l <= p.L; ++l) {
      const auto tl = overlap_count(I.planted[l - 1], J.planted[l - 1]);
      const auto tn = l < p.L ? overlap_count(I.planted[l], J.planted[l]) : 0;
      EXPECT_LE(density_ratio_direct_t2(p, I, J, l), density_ratio_bound_t2(p, family, l, tl, tn) + 1e-12);
    }
  }
}

TEST(Pipeline, CertifiedInRegime) {
  const int L = 3, n = 5;
  const auto p = make_t2_params(L, pipeline_regime_S(L, n), 0.9);
  const auto r = tv_pipeline_t2(p, n);
  EXPECT_TRUE(r.in_regime);
  EXPECT_LE(r.tv_bound, 0.5 + 5.0 / 64.0);
  EXPECT_TRUE(r.certified);
  EXPECT_LE(r.tv_bound_expectation, r.tv_bound + 1e-12);
}

TEST(RegretBounds, ClosedForms) {
  EXPECT_NEAR(regret_lower_bound_t1(0.9, 0.0), 0.81 / 1.6, 1e-12);
  EXPECT_NEAR(regret_lower_bound_t2(3, 0.9, 0.0), std::pow(0.9, 4) / 48.0 / 0.1, 1e-12);
  EXPECT_NEAR(regret_lower_bound_t2_chain(3, 0.9, 0.0), std::pow(0.9, 4) / 144.0 / 0.1, 1e-12);
}

TEST(Numeric, PartitionedSumIsThreadCountInvariant) {
  auto term = [](std::int64_t i) { return 1.0 / static_cast<double>((i + 1) * (i + 1)); };
  const double a = partitioned_sum(100000, 8, 1, term);
  const double b = partitioned_sum(100000, 8, 4, term);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(a, M_PI * M_PI / 6.0, 1e-4);
}
