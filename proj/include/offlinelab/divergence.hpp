// SPDX-License-Identifier: Apache-2.0
//
// Chi-square and total-variation computations between dataset laws:
// closed-form sums for the single-layer family, the upper-bound pipeline
// for the layered family, and enumeration oracles for tiny instances.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "offlinelab/mdp.hpp"
#include "offlinelab/theorem1.hpp"
#include "offlinelab/theorem2.hpp"

namespace olab {

// Raised when a brute-force request exceeds its enumeration budget.
class SizeGuardError : public std::runtime_error {
 public:
  explicit SizeGuardError(const std::string& what) : std::runtime_error(what) {}
};

double phi(double theta, double alpha, double beta);

// Hyper(t; K, N, N'): t blue balls among N' draws from N balls, K blue.
double hypergeom_log_pmf(std::int64_t t, std::int64_t K, std::int64_t N, std::int64_t Nprime);
double hypergeom_pmf(std::int64_t t, std::int64_t K, std::int64_t N, std::int64_t Nprime);
// exp(-2 eps^2 theta S1), the bound on Pr[t >= (theta + eps) theta S1].
double hypergeom_tail(double eps, double theta, std::int64_t S1);

// Normalized pmf over a contiguous range of t. Weights come from the
// ratio recurrence in log space, anchored at the mode, so the table sums
// to one up to rounding. With `windowed` the range is cut to the mode
// +- 40 standard deviations (plus slack), where the dropped mass is far
// below double precision.
class HypergeomTable {
 public:
  HypergeomTable(std::int64_t K, std::int64_t N, std::int64_t Nprime, bool windowed = false);
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  std::int64_t support_lo() const { return support_lo_; }
  std::int64_t support_hi() const { return support_hi_; }
  double pmf(std::int64_t t) const { return (t < lo_ || t > hi_) ? 0.0 : p_[t - lo_]; }
  std::int64_t size() const { return hi_ - lo_ + 1; }
  // Exact mass of {t >= threshold}, accumulated from the far tail inward.
  double upper_tail(double threshold) const;

 private:
  std::int64_t lo_ = 0, hi_ = 0, support_lo_ = 0, support_hi_ = 0;
  std::vector<double> p_;
};

struct SumOptions {
  int partitions = 1;
  int threads = 1;
  bool keep_trace = false;
  bool windowed = false;
};

struct TermRow {
  std::int64_t t;
  double pmf;
  double g;
  double contribution;  // pmf * (g - 1)
};

struct Chi2Result {
  double value = 0.0;
  std::int64_t terms = 0;
  int partitions = 1;
  double pmf_mass = 0.0;
  bool g_monotone = true;  // g nondecreasing over the summed range
  std::vector<TermRow> trace;
};

// g(t; n) for the single-layer family.
double g_t1(double t, double theta, std::int64_t S1, double phi_value, int n);

// Exact chi-square between the family-i mixture law and the reference law.
Chi2Result chi2_exact_t1(const T1FamilySpec& spec, int family, int n, const SumOptions& opt = {});

// Split-sum bound with eps = 2c(1-theta)theta/n. Marked as a bound, not a value.
struct TruncatedBound {
  double eps = 0.0;
  double first = 0.0;   // g((theta+eps) theta S1)
  double second = 0.0;  // exp(-2 eps^2 theta S1) g(theta S1)
  double bound = 0.0;   // first + second - 1
  double relaxed = 0.0; // (1 + eps/(2(1-theta)theta))^n + exp(n/(2 theta) - 2 eps^2 theta S1) - 1
};
TruncatedBound truncated_bound_t1(const T1FamilySpec& spec, int family, int n, double c = 0.1);

struct DivergenceReportT1 {
  int n = 0;
  std::int64_t S = 0;
  double gamma = 0.0;
  std::array<Chi2Result, 2> chi2;
  std::array<TruncatedBound, 2> truncated;
  double tv_upper = 0.0;
  double regime_n_max = 0.0;  // cube root of (S - 5), over 20
  bool in_regime = false;
  bool le_half = false;
  bool le_three_quarters = false;
  std::optional<double> tv_bruteforce;
};
DivergenceReportT1 tv_upper_t1(const T1FamilySpec& spec, int n, const SumOptions& opt = {});

// ---------------------------------------------------------------------------
// Enumeration oracles

struct Outcome {
  std::int32_t s;
  std::int8_t a;
  RewardTag tag;
  std::int32_t next;
  bool operator<(const Outcome& o) const;
  bool operator==(const Outcome& o) const;
};

// Per-record outcome probabilities mu(s,a) 1{tag} P(s'|s,a) for each model,
// over the union of supports.
struct OutcomeTable {
  std::vector<Outcome> outcomes;
  std::vector<std::vector<double>> probs;  // [model][outcome]
};
OutcomeTable outcome_table(const std::vector<TabularMdp>& models, const DataDistribution& mu);

// Laws of n-record datasets as uniform mixtures over model groups.
double mixture_tv(const OutcomeTable& tab, const std::vector<int>& group_a, const std::vector<int>& group_b,
                  int n, double budget = 1e6);
double mixture_chi2(const OutcomeTable& tab, const std::vector<int>& group, const std::vector<int>& reference,
                    int n, double budget = 1e6);

// Every planted set of a family, in lexicographic order.
std::vector<PlantedInstance> all_t1_instances(const T1FamilySpec& spec, int family, std::int64_t cap = 100000);
std::vector<T2Instance> all_t2_instances(const T2Params& p, int family, std::int64_t cap = 100000);

double tv_bruteforce_t1(const T1FamilySpec& spec, int n);
double chi2_bruteforce_t1(const T1FamilySpec& spec, int family, int n);
double tv_bruteforce_t2(const T2Params& p, int n);
// TV between the two reference laws (averaged dynamics, family rewards).
double tv_reference_t2_bruteforce(const T2Params& p, int n);
// 1 - (1 - mu(Z))^n, the closed form of the quantity above.
double tv_reference_t2_exact(const T2Params& p, int n);

// ---------------------------------------------------------------------------
// Density-ratio identities

// sum_{s'} P_a(s'|s,a) P_b(s'|s,a) / P_0(s'|s,a); +inf if P_0 misses mass.
double row_ratio(const TabularMdp& ma, const TabularMdp& mb, const TabularMdp& m0, std::int64_t s, int a);

std::int64_t overlap_count(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b);

// E over s ~ Unif(intermediate), s' ~ P_0 of P_I P_J / P_0^2, by direct sum.
double density_ratio_direct_t1(const T1FamilySpec& spec, const PlantedInstance& I, const PlantedInstance& J);
double density_ratio_analytic_t1(const T1FamilySpec& spec, int family, std::int64_t overlap);
double initial_ratio_direct_t1(const T1FamilySpec& spec, const PlantedInstance& I, const PlantedInstance& J);
double initial_ratio_analytic_t1(const T1FamilySpec& spec, int family, std::int64_t overlap);

// Layered analogues, for layer l.
double density_ratio_direct_t2(const T2Params& p, const T2Instance& I, const T2Instance& J, int l);
double density_ratio_bound_t2(const T2Params& p, int family, int l, std::int64_t t_l, std::int64_t t_next);

// ---------------------------------------------------------------------------
// Layered pipeline

struct T2LayerTerm {
  int l = 0;
  std::int64_t S_l = 0;
  std::int64_t planted = 0;
  double theta = 0.0;
  double alpha_l = 0.0;
  double phi = 0.0;
  double coef = 0.0;  // (phi/8 + 1/4) / 2^l
  double eps = 0.0;
  std::int64_t window_terms = 0;
};

struct T2FamilyBound {
  int family = 0;
  std::vector<T2LayerTerm> layers;
  double expectation = 0.0;  // E[(1 + sum_l coef_l (x_l - 1)_+)^n]
  double chi2_expectation = 0.0;
  double first = 0.0;        // (1 + sum eps_l / (2^{l+1} theta_l (1-theta_l)))^n
  double tail = 0.0;         // sum_l exp(n sum_j 1/(2^{j+1} theta_j) - 2 eps_l^2 theta_l S_l)
  double chi2_witheps = 0.0;
};

struct T2PipelineReport {
  int n = 0;
  int L = 0;
  std::int64_t S = 0;
  double gamma = 0.0;
  double c = 0.1;
  std::array<T2FamilyBound, 2> family;
  double ref_term = 0.0;        // n / (8 2^L)
  double ref_exact = 0.0;       // 1 - (1 - 2^-L / 8)^n
  double tv_bound = 0.0;        // from the eps-split bounds
  double tv_bound_expectation = 0.0;
  double target = 0.0;          // 1/2 + n / (8 2^L)
  bool in_regime = false;       // n >= 5 and S - 5 > 3200 n^3 L^6
  bool certified = false;
};
T2PipelineReport tv_pipeline_t2(const T2Params& p, int n, double c = 0.1);

// Smallest valid S for L with S - 5 > 3200 n^3 L^6.
std::int64_t pipeline_regime_S(int L, int n);

// ---------------------------------------------------------------------------
// Regret lower bounds

double regret_lower_bound_t1(double gamma, double tv);
// gamma^{L+1} / (16 L (1-gamma)) (1 - tv), as stated for the layered family.
double regret_lower_bound_t2(int L, double gamma, double tv);
// gamma^{L+1} / (48 L (1-gamma)) (1 - tv), the constant the proof reaches.
double regret_lower_bound_t2_chain(int L, double gamma, double tv);

}  // namespace olab
