// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. `acceptance` runs all of them, `acceptance K` runs
// criterion K. Each prints exactly one PASS/FAIL line.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "offlinelab/divergence.hpp"
#include "offlinelab/offline.hpp"
#include "offlinelab/theorem1.hpp"
#include "offlinelab/theorem2.hpp"
#include "offlinelab/verify.hpp"

using namespace olab;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Verdict realizability() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  Rng rng = make_stream(2024, 1);
  for (int k = 0; k < 20; ++k) {
    const double gamma = k < 10 ? 0.6 : 0.9;
    const auto spec = make_t1_spec(1029, gamma);
    const int family = 1 + k % 2;
    const auto m = build_t1(spec, sample_t1_instance(spec, family, rng));
    const auto f = f_values(spec, family);
    for (int j = 0; j < 100; ++j) {
      const auto q = exact_q(m, random_policy(m.num_states(), rng));
      for (std::size_t i = 0; i < q.size(); ++i) worst = std::max(worst, std::abs(q[i] - f[i]));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 10.0,
          "max |Q^pi - f| = " + fmt("%.3g", worst) + " over 20 instances x 100 policies, " + fmt("%.2f s", secs)};
}

Verdict concentrability_check() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng = make_stream(2024, 2);
  double t1_worst = 0.0;
  for (double gamma : {0.6, 0.9}) {
    const auto spec = make_t1_spec(1029, gamma);
    for (int family = 1; family <= 2; ++family) {
      const auto m = build_t1(spec, sample_t1_instance(spec, family, rng));
      t1_worst = std::max(t1_worst, std::abs(concentrability(m, mu_theorem1(spec)).value - 16.0));
    }
  }
  bool ok = t1_worst <= 1e-9;
  std::string detail = "single-layer |C - 16| = " + fmt("%.2g", t1_worst);
  for (int L : {2, 3}) {
    const auto p = make_t2_params(L, L == 2 ? 23 : 52, 0.9);
    const auto cert = concentrability_certificate_t2(p, 7, 2);
    int exceeded = 0;
    std::fprintf(stderr, "  layered L=%d case table (class, family, exact ratio @ step, case ratio @ steps):\n", L);
    for (const auto& c : cert.classes) {
      std::fprintf(stderr, "    %-8s f%d  %10.4f @ %d   %10.4f @ %s%s\n", c.cls.c_str(), c.family, c.exact_ratio,
                  c.exact_step, c.case_ratio, c.case_steps.c_str(), c.exceeds_case ? "  (exact above case bound)" : "");
      exceeded += c.exceeds_case ? 1 : 0;
    }
    ok = ok && cert.within_bound && !cert.classes.empty();
    detail += "; L=" + std::to_string(L) + " C = " + fmt("%.4g", cert.coefficient) + " <= " +
              fmt("%.0f", cert.bound) + " (binding " + cert.binding_class + ", " + std::to_string(exceeded) +
              " case rows exceeded)";
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 5.0, detail + ", " + fmt("%.2f s", secs)};
}

Verdict gap_check() {
  Rng rng = make_stream(2024, 3);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double g = k < 10 ? 0.6 : 0.9;
    const auto spec = make_t1_spec(1029, g);
    const auto m = build_t1(spec, sample_t1_instance(spec, 1 + k % 2, rng));
    const auto q = optimal_policy(m).q;
    worst = std::max(worst, std::abs(std::abs(q[0] - q[1]) - g * g / (8 * (1 - g))));
  }
  double worst2 = 0.0, min_margin = INFINITY;
  for (int L : {2, 3}) {
    for (double g : {0.6, 0.9}) {
      const auto p = make_t2_params(L, L == 2 ? 23 : 52, g);
      const double want = g * std::abs(v_alpha(p, p.alpha[0]) - v_alpha(p, p.alpha[1])) / (2 * (1 - g));
      const double floor = std::pow(g, L + 1) / (24.0 * L * (1 - g));
      for (int family = 1; family <= 2; ++family) {
        const auto q = optimal_policy(build_t2(p, sample_t2_instance(p, family, rng))).q;
        const double gap = std::abs(q[0] - q[1]);
        worst2 = std::max(worst2, std::abs(gap - want));
        min_margin = std::min(min_margin, gap - floor);
      }
    }
  }
  return {worst <= 1e-10 && worst2 <= 1e-10 && min_margin >= 0.0,
          "single-layer gap error " + fmt("%.2g", worst) + "; layered gap error " + fmt("%.2g", worst2) +
              ", min(gap - floor) = " + fmt("%.4g", min_margin)};
}

Verdict oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto spec = make_t1_spec(9, 0.6);
  double worst = 0.0;
  bool tv_ok = true;
  std::string tvs;
  for (int n = 1; n <= 2; ++n) {
    for (int family = 1; family <= 2; ++family) {
      worst = std::max(worst, std::abs(chi2_exact_t1(spec, family, n).value - chi2_bruteforce_t1(spec, family, n)));
    }
    const double tb = tv_bruteforce_t1(spec, n), tu = tv_upper_t1(spec, n).tv_upper;
    tv_ok = tv_ok && tb <= tu;
    tvs += " n=" + std::to_string(n) + ": tv " + fmt("%.6g", tb) + " <= " + fmt("%.6g", tu);
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && tv_ok && secs < 60.0,
          "max |chi2 exact - enumeration| = " + fmt("%.2g", worst) + ";" + tvs + ", " + fmt("%.2f s", secs)};
}

Verdict tv_bound_at_scale() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto spec = make_t1_spec(1000005, 0.9);
  SumOptions so;  // full support, single thread
  const auto r = tv_upper_t1(spec, 5, so);
  const double secs = seconds_since(t0);
  const std::int64_t terms = r.chi2[0].terms + r.chi2[1].terms;
  return {r.le_three_quarters && r.in_regime && secs < 30.0,
          "tv_upper = " + fmt("%.4g", r.tv_upper) + " (<= 0.75 certified: " + (r.le_three_quarters ? "yes" : "no") +
              ", <= 0.5: " + (r.le_half ? "yes" : "no") + "), " + std::to_string(terms) + " terms, " +
              fmt("%.2f s", secs)};
}

Verdict density_ratios() {
  const auto spec = make_t1_spec(17, 0.9);  // 12 intermediate states
  Rng rng = make_stream(2024, 6);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int family = 1 + k % 2;
    const auto I = sample_t1_instance(spec, family, rng), J = sample_t1_instance(spec, family, rng);
    const auto t = overlap_count(I.planted, J.planted);
    worst = std::max(worst, std::abs(density_ratio_direct_t1(spec, I, J) - density_ratio_analytic_t1(spec, family, t)));
    worst = std::max(worst, std::abs(initial_ratio_direct_t1(spec, I, J) - initial_ratio_analytic_t1(spec, family, t)));
  }
  return {worst <= 1e-12, "max |analytic - direct| = " + fmt("%.2g", worst) + " over 1000 pairs, S1 = 12"};
}

Verdict tail_bound() {
  Rng rng = make_stream(2024, 7);
  int violations = 0;
  double worst_ratio = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::int64_t S1 = 20 + static_cast<std::int64_t>(uniform_index(rng, 1981));
    const std::int64_t K = 1 + static_cast<std::int64_t>(uniform_index(rng, S1 - 1));
    const double theta = static_cast<double>(K) / S1;
    const double eps = 0.01 + 0.49 * uniform01(rng);
    const HypergeomTable tab(K, S1, K);
    const double mass = tab.upper_tail((theta + eps) * K);
    const double bound = hypergeom_tail(eps, theta, S1);
    if (mass > bound) ++violations;
    if (bound > 0) worst_ratio = std::max(worst_ratio, mass / bound);
  }
  return {violations == 0, std::to_string(violations) + " violations in 100 configurations, max mass/bound = " +
                               fmt("%.3g", worst_ratio)};
}

Verdict empirical_hardness() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.S = 1000005;
  cfg.gamma = 0.9;
  cfg.n = 5;
  cfg.trials = 200;
  cfg.seed = 20240001;
  const auto r = run_distinguishing_experiment(cfg);
  const double floor = 0.81 / (64 * 0.1);
  bool ok = r.regret_structure_ok;
  std::string detail;
  for (const auto& s : r.summary) {
    ok = ok && s.mean_regret >= floor - s.regret_ci;
    detail += algorithm_name(s.algorithm) + " " + fmt("%.4f", s.mean_regret) + " +- " + fmt("%.4f", s.regret_ci) + "; ";
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 300.0, "mean regret " + detail + "floor " + fmt("%.4f", floor) + ", " + fmt("%.1f s", secs)};
}

Verdict generous_n() {
  ExperimentConfig cfg;
  cfg.S = 69;  // 64 intermediate states
  cfg.gamma = 0.9;
  cfg.n = 20 * 64;
  cfg.trials = 100;
  cfg.seed = 20240002;
  cfg.algorithms = {Algorithm::kBayes, Algorithm::kBrm};
  const auto r = run_distinguishing_experiment(cfg);
  const double bayes = r.summary[0].error_rate, brm = r.summary[1].error_rate;
  return {bayes <= 0.05 && brm <= 0.10,
          "bayes error " + fmt("%.3f", bayes) + " (<= 0.05), brm error " + fmt("%.3f", brm) + " (<= 0.10)"};
}

Verdict pipeline() {
  const auto t0 = std::chrono::steady_clock::now();
  const int L = 3, n = 5;
  const auto p = make_t2_params(L, pipeline_regime_S(L, n), 0.9);
  const auto r = tv_pipeline_t2(p, n);
  const double target = 0.5 + 5.0 / 64.0;
  const auto tiny = make_t2_params(2, 23, 0.9);
  bool ref_ok = true;
  std::string refs;
  for (int m = 1; m <= 2; ++m) {
    const double tv = tv_reference_t2_bruteforce(tiny, m);
    ref_ok = ref_ok && tv <= m / (8.0 * 4.0);
    refs += " n=" + std::to_string(m) + ": " + fmt("%.6g", tv) + " <= " + fmt("%.6g", m / 32.0);
  }
  const double secs = seconds_since(t0);
  return {r.tv_bound <= target && ref_ok && secs < 120.0,
          "S = " + std::to_string(p.S) + ", tv bound " + fmt("%.4f", r.tv_bound) + " <= " + fmt("%.6f", target) +
              "; reference TV (L=2)" + refs + ", " + fmt("%.2f s", secs)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::function<Verdict()> checks[] = {realizability,  concentrability_check, gap_check,   oracle_equivalence,
                                             tv_bound_at_scale, density_ratios,        tail_bound,  empirical_hardness,
                                             generous_n,     pipeline};
  int first = 1, last = 10;
  if (argc > 1) first = last = std::atoi(argv[1]);
  if (first < 1 || last > 10) {
    std::fprintf(stderr, "usage: acceptance [1-10]\n");
    return 2;
  }
  bool all = true;
  for (int k = first; k <= last; ++k) {
    Verdict o{false, ""};
    try {
      o = checks[k - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s: %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
