// SPDX-License-Identifier: Apache-2.0

#include "offlinelab/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "offlinelab/numeric.hpp"

namespace olab {

double phi(double theta, double alpha, double beta) {
  for (double x : {theta, alpha, beta}) {
    if (!(x > 0.0 && x < 1.0)) throw ValidationError("phi arguments must lie in (0,1)");
  }
  const double d = beta - alpha;
  return theta * theta * (d * d / (theta * d + 1.0 - beta) + (theta * d + alpha) / (theta * (1.0 - theta)));
}

// ---------------------------------------------------------------------------
// Hypergeometric

namespace {

void check_hyper(std::int64_t K, std::int64_t N, std::int64_t Nprime) {
  if (N < 0 || K < 0 || Nprime < 0 || K > N || Nprime > N) {
    throw ValidationError("hypergeometric parameters out of range");
  }
}

}  // namespace

double hypergeom_log_pmf(std::int64_t t, std::int64_t K, std::int64_t N, std::int64_t Nprime) {
  check_hyper(K, N, Nprime);
  if (t < std::max<std::int64_t>(0, K + Nprime - N) || t > std::min(K, Nprime)) {
    return -std::numeric_limits<double>::infinity();
  }
  return log_choose(K, t) + log_choose(N - K, Nprime - t) - log_choose(N, Nprime);
}

double hypergeom_pmf(std::int64_t t, std::int64_t K, std::int64_t N, std::int64_t Nprime) {
  return std::exp(hypergeom_log_pmf(t, K, N, Nprime));
}

double hypergeom_tail(double eps, double theta, std::int64_t S1) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0,1)");
  return std::exp(-2.0 * eps * eps * theta * static_cast<double>(S1));
}

HypergeomTable::HypergeomTable(std::int64_t K, std::int64_t N, std::int64_t Nprime, bool windowed) {
  check_hyper(K, N, Nprime);
  support_lo_ = std::max<std::int64_t>(0, K + Nprime - N);
  support_hi_ = std::min(K, Nprime);
  const double Kd = K, Nd = N, Md = Nprime;
  std::int64_t mode = static_cast<std::int64_t>(std::floor((Md + 1.0) * (Kd + 1.0) / (Nd + 2.0)));
  mode = std::clamp(mode, support_lo_, support_hi_);
  lo_ = support_lo_;
  hi_ = support_hi_;
  if (windowed && N > 1) {
    const double var = Md * (Kd / Nd) * (1.0 - Kd / Nd) * (Nd - Md) / (Nd - 1.0);
    const auto half = static_cast<std::int64_t>(std::ceil(40.0 * std::sqrt(var) + 50.0));
    lo_ = std::max(lo_, mode - half);
    hi_ = std::min(hi_, mode + half);
  }
  // Log-weights relative to the mode via
  // w(t+1)/w(t) = (K-t)(N'-t) / ((t+1)(N-K-N'+t+1)).
  std::vector<double> lw(hi_ - lo_ + 1, 0.0);
  const double base = Nd - Kd - Md;
  for (std::int64_t t = mode; t < hi_; ++t) {
    const double td = static_cast<double>(t);
    lw[t + 1 - lo_] = lw[t - lo_] + std::log((Kd - td) * (Md - td)) - std::log((td + 1.0) * (base + td + 1.0));
  }
  for (std::int64_t t = mode; t > lo_; --t) {
    const double td = static_cast<double>(t - 1);
    lw[t - 1 - lo_] = lw[t - lo_] - std::log((Kd - td) * (Md - td)) + std::log((td + 1.0) * (base + td + 1.0));
  }
  KahanSum z;
  for (double v : lw) z.add(std::exp(v));
  const double logz = std::log(z.value());
  p_.resize(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) p_[i] = std::exp(lw[i] - logz);
}

double HypergeomTable::upper_tail(double threshold) const {
  const auto from = std::max<std::int64_t>(lo_, static_cast<std::int64_t>(std::ceil(threshold - 1e-9)));
  KahanSum s;
  for (std::int64_t t = hi_; t >= from; --t) s.add(p_[t - lo_]);
  return s.value();
}

// ---------------------------------------------------------------------------
// Single-layer chi-square

double g_t1(double t, double theta, std::int64_t S1, double phi_value, int n) {
  const double x = t / (theta * theta * static_cast<double>(S1));
  const double base = 1.0 + (x - 1.0) * (8.0 * phi_value + 1.0) / 16.0;
  return std::pow(base, n);
}

Chi2Result chi2_exact_t1(const T1FamilySpec& spec, int family, int n, const SumOptions& opt) {
  if (n < 0) throw ValidationError("n must be nonnegative");
  const auto& p = spec.family(family);
  Chi2Result res;
  res.partitions = std::max(1, opt.partitions);
  if (n == 0) return res;
  const double ph = phi(p.theta, p.alpha, p.beta);
  const double c = (8.0 * ph + 1.0) / 16.0;
  const double denom = p.theta * p.theta * static_cast<double>(spec.S1);
  const HypergeomTable tab(p.planted_count, spec.S1, p.planted_count, opt.windowed);
  res.terms = tab.size();
  // g - 1 = expm1(n log1p(c (x - 1))) keeps precision where g is near 1.
  auto gm1 = [&](std::int64_t t) {
    const double u = c * (static_cast<double>(t) / denom - 1.0);
    return std::expm1(n * std::log1p(u));
  };
  res.value = partitioned_sum(res.terms, res.partitions, opt.threads, [&](std::int64_t i) {
    const std::int64_t t = tab.lo() + i;
    return tab.pmf(t) * gm1(t);
  });
  // The exact value is nonnegative; clip rounding residue at n = 1.
  if (res.value < 0.0 && res.value > -1e-14) res.value = 0.0;
  KahanSum mass;
  double prev = -std::numeric_limits<double>::infinity();
  for (std::int64_t t = tab.lo(); t <= tab.hi(); ++t) {
    mass.add(tab.pmf(t));
    const double g = 1.0 + gm1(t);
    if (g < prev) res.g_monotone = false;
    prev = g;
    if (opt.keep_trace) res.trace.push_back({t, tab.pmf(t), g, tab.pmf(t) * (g - 1.0)});
  }
  res.pmf_mass = mass.value();
  return res;
}

TruncatedBound truncated_bound_t1(const T1FamilySpec& spec, int family, int n, double c) {
  const auto& p = spec.family(family);
  const double th = p.theta, S1 = static_cast<double>(spec.S1);
  const double ph = phi(p.theta, p.alpha, p.beta);
  TruncatedBound b;
  if (n <= 0) return b;
  b.eps = 2.0 * c * (1.0 - th) * th / n;
  b.first = g_t1((th + b.eps) * th * S1, th, spec.S1, ph, n);
  b.second = std::exp(-2.0 * b.eps * b.eps * th * S1) * g_t1(th * S1, th, spec.S1, ph, n);
  b.bound = b.first + b.second - 1.0;
  b.relaxed = std::pow(1.0 + b.eps / (2.0 * (1.0 - th) * th), n) +
              std::exp(n / (2.0 * th) - 2.0 * b.eps * b.eps * th * S1) - 1.0;
  return b;
}

DivergenceReportT1 tv_upper_t1(const T1FamilySpec& spec, int n, const SumOptions& opt) {
  DivergenceReportT1 r;
  r.n = n;
  r.S = spec.S;
  r.gamma = spec.gamma;
  for (int i = 1; i <= 2; ++i) {
    r.chi2[i - 1] = chi2_exact_t1(spec, i, n, opt);
    r.truncated[i - 1] = truncated_bound_t1(spec, i, n);
  }
  r.tv_upper = 0.5 * std::sqrt(std::max(0.0, r.chi2[0].value)) + 0.5 * std::sqrt(std::max(0.0, r.chi2[1].value));
  r.regime_n_max = std::cbrt(static_cast<double>(spec.S1)) / 20.0;
  r.in_regime = n <= r.regime_n_max + 1e-9;
  r.le_half = r.tv_upper <= 0.5;
  r.le_three_quarters = r.tv_upper <= 0.75;
  return r;
}

// ---------------------------------------------------------------------------
// Enumeration

bool Outcome::operator<(const Outcome& o) const {
  if (s != o.s) return s < o.s;
  if (a != o.a) return a < o.a;
  if (tag != o.tag) return tag < o.tag;
  return next < o.next;
}

bool Outcome::operator==(const Outcome& o) const {
  return s == o.s && a == o.a && tag == o.tag && next == o.next;
}

OutcomeTable outcome_table(const std::vector<TabularMdp>& models, const DataDistribution& mu) {
  std::map<Outcome, int> index;
  for (const auto& m : models) {
    for (std::int64_t s = 0; s < m.num_states(); ++s) {
      for (int a = 0; a < kNumActions; ++a) {
        if (mu.mass(s, a) <= 0.0) continue;
        for (const Transition& t : m.row(s, a)) {
          if (t.prob <= 0.0) continue;
          index.emplace(Outcome{static_cast<std::int32_t>(s), static_cast<std::int8_t>(a), m.reward_tag(s, a), t.next}, 0);
        }
      }
    }
  }
  OutcomeTable tab;
  int k = 0;
  for (auto& [o, i] : index) {
    i = k++;
    tab.outcomes.push_back(o);
  }
  tab.probs.assign(models.size(), std::vector<double>(tab.outcomes.size(), 0.0));
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    const auto& m = models[mi];
    for (std::int64_t s = 0; s < m.num_states(); ++s) {
      for (int a = 0; a < kNumActions; ++a) {
        const double w = mu.mass(s, a);
        if (w <= 0.0) continue;
        for (const Transition& t : m.row(s, a)) {
          if (t.prob <= 0.0) continue;
          const Outcome o{static_cast<std::int32_t>(s), static_cast<std::int8_t>(a), m.reward_tag(s, a), t.next};
          tab.probs[mi][index.at(o)] += w * t.prob;
        }
      }
    }
  }
  return tab;
}

namespace {

// Calls fn(PA, PB) for every dataset of length n, with PA, PB the
// group-mixture probabilities.
template <typename Fn>
void enumerate_datasets(const OutcomeTable& tab, const std::vector<int>& A, const std::vector<int>& B, int n,
                        double budget, Fn&& fn) {
  const std::size_t m = tab.outcomes.size();
  const double count = std::pow(static_cast<double>(m), n);
  if (count > budget) {
    throw SizeGuardError("enumeration needs " + std::to_string(count) + " datasets; budget is " +
                         std::to_string(budget));
  }
  if (n == 0) {
    fn(1.0, 1.0);
    return;
  }
  if (n == 2) {
    // Gram matrices: P(o1, o2) = mean over models of p(o1) p(o2).
    auto gram = [&](const std::vector<int>& G) {
      std::vector<double> g(m * m, 0.0);
      for (int mi : G) {
        const auto& p = tab.probs[mi];
        for (std::size_t i = 0; i < m; ++i) {
          if (p[i] == 0.0) continue;
          double* row = g.data() + i * m;
          for (std::size_t j = 0; j < m; ++j) row[j] += p[i] * p[j];
        }
      }
      for (double& v : g) v /= static_cast<double>(G.size());
      return g;
    };
    const auto ga = gram(A), gb = gram(B);
    for (std::size_t i = 0; i < m * m; ++i) fn(ga[i], gb[i]);
    return;
  }
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    auto mix = [&](const std::vector<int>& G) {
      double acc = 0.0;
      for (int mi : G) {
        double prod = 1.0;
        for (int k = 0; k < n && prod != 0.0; ++k) prod *= tab.probs[mi][idx[k]];
        acc += prod;
      }
      return acc / static_cast<double>(G.size());
    };
    fn(mix(A), mix(B));
    int k = n - 1;
    while (k >= 0 && ++idx[k] == m) idx[k--] = 0;
    if (k < 0) break;
  }
}

}  // namespace

double mixture_tv(const OutcomeTable& tab, const std::vector<int>& A, const std::vector<int>& B, int n,
                  double budget) {
  KahanSum s;
  enumerate_datasets(tab, A, B, n, budget, [&](double pa, double pb) { s.add(std::abs(pa - pb)); });
  return 0.5 * s.value();
}

double mixture_chi2(const OutcomeTable& tab, const std::vector<int>& A, const std::vector<int>& R, int n,
                    double budget) {
  KahanSum s;
  bool infinite = false;
  enumerate_datasets(tab, A, R, n, budget, [&](double pa, double pr) {
    if (pa == 0.0) return;
    if (pr == 0.0) {
      infinite = true;
      return;
    }
    s.add(pa * pa / pr);
  });
  if (infinite) return std::numeric_limits<double>::infinity();
  return s.value() - 1.0;
}

std::vector<PlantedInstance> all_t1_instances(const T1FamilySpec& spec, int family, std::int64_t cap) {
  const std::int64_t k = spec.family(family).planted_count;
  if (spec.S1 > 62 || choose_exact(spec.S1, k) > cap) {
    throw SizeGuardError("too many planted sets to enumerate");
  }
  std::vector<PlantedInstance> out;
  for_each_subset(static_cast<int>(spec.S1), static_cast<int>(k), [&](const std::vector<int>& idx) {
    PlantedInstance inst;
    inst.family = family;
    inst.planted.assign(idx.begin(), idx.end());
    out.push_back(std::move(inst));
  });
  return out;
}

std::vector<T2Instance> all_t2_instances(const T2Params& p, int family, std::int64_t cap) {
  std::int64_t total = 1;
  std::vector<std::vector<std::vector<std::int64_t>>> per_layer(p.L);
  for (int l = 1; l <= p.L; ++l) {
    const std::int64_t n = p.layer_size[l - 1], k = p.planted_count[family - 1][l - 1];
    if (n > 62) throw SizeGuardError("layer too large to enumerate");
    const std::int64_t c = choose_exact(n, k);
    if (c > cap || total > cap / c) throw SizeGuardError("too many planted sets to enumerate");
    total *= c;
    for_each_subset(static_cast<int>(n), static_cast<int>(k), [&](const std::vector<int>& idx) {
      per_layer[l - 1].emplace_back(idx.begin(), idx.end());
    });
  }
  std::vector<T2Instance> out;
  std::vector<std::size_t> pick(p.L, 0);
  for (;;) {
    T2Instance inst;
    inst.family = family;
    for (int l = 0; l < p.L; ++l) inst.planted.push_back(per_layer[l][pick[l]]);
    out.push_back(std::move(inst));
    int l = p.L - 1;
    while (l >= 0 && ++pick[l] == per_layer[l].size()) pick[l--] = 0;
    if (l < 0) break;
  }
  return out;
}

namespace {

std::vector<int> range_ids(int from, int to) {
  std::vector<int> v;
  for (int i = from; i < to; ++i) v.push_back(i);
  return v;
}

}  // namespace

double tv_bruteforce_t1(const T1FamilySpec& spec, int n) {
  std::vector<TabularMdp> models;
  for (int f = 1; f <= 2; ++f) {
    for (const auto& inst : all_t1_instances(spec, f)) models.push_back(build_t1(spec, inst));
  }
  const int n1 = static_cast<int>(all_t1_instances(spec, 1).size());
  const auto tab = outcome_table(models, mu_theorem1(spec));
  return mixture_tv(tab, range_ids(0, n1), range_ids(n1, static_cast<int>(models.size())), n);
}

double chi2_bruteforce_t1(const T1FamilySpec& spec, int family, int n) {
  std::vector<TabularMdp> models;
  for (const auto& inst : all_t1_instances(spec, family)) models.push_back(build_t1(spec, inst));
  const int k = static_cast<int>(models.size());
  models.push_back(reference_mdp_t1(spec));
  const auto tab = outcome_table(models, mu_theorem1(spec));
  return mixture_chi2(tab, range_ids(0, k), {k}, n);
}

double tv_bruteforce_t2(const T2Params& p, int n) {
  std::vector<TabularMdp> models;
  int n1 = 0;
  for (int f = 1; f <= 2; ++f) {
    for (const auto& inst : all_t2_instances(p, f)) models.push_back(build_t2(p, inst));
    if (f == 1) n1 = static_cast<int>(models.size());
  }
  const auto tab = outcome_table(models, mu_theorem2(p));
  const double work = std::pow(static_cast<double>(tab.outcomes.size()), n) * models.size();
  if (work > 5e9) throw SizeGuardError("layered brute force too large");
  return mixture_tv(tab, range_ids(0, n1), range_ids(n1, static_cast<int>(models.size())), n);
}

double tv_reference_t2_bruteforce(const T2Params& p, int n) {
  std::vector<TabularMdp> models{reference_mdp_t2(p, 1), reference_mdp_t2(p, 2)};
  const auto tab = outcome_table(models, mu_theorem2(p));
  return mixture_tv(tab, {0}, {1}, n);
}

double tv_reference_t2_exact(const T2Params& p, int n) {
  const double mz = std::ldexp(1.0 / 8.0, -p.L);
  return -std::expm1(n * std::log1p(-mz));
}

// ---------------------------------------------------------------------------
// Density ratios

double row_ratio(const TabularMdp& ma, const TabularMdp& mb, const TabularMdp& m0, std::int64_t s, int a) {
  std::map<std::int32_t, double> pa, pb, p0;
  for (const auto& t : ma.row(s, a)) pa[t.next] += t.prob;
  for (const auto& t : mb.row(s, a)) pb[t.next] += t.prob;
  for (const auto& t : m0.row(s, a)) p0[t.next] += t.prob;
  KahanSum acc;
  for (const auto& [next, x] : pa) {
    const auto it = pb.find(next);
    if (it == pb.end()) continue;
    const auto z = p0.find(next);
    if (z == p0.end() || z->second <= 0.0) return std::numeric_limits<double>::infinity();
    acc.add(x * it->second / z->second);
  }
  return acc.value();
}

std::int64_t overlap_count(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  std::int64_t k = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++k;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return k;
}

double density_ratio_direct_t1(const T1FamilySpec& spec, const PlantedInstance& I, const PlantedInstance& J) {
  const auto mi = build_t1(spec, I), mj = build_t1(spec, J), m0 = reference_mdp_t1(spec);
  KahanSum acc;
  for (std::int64_t k = 0; k < spec.S1; ++k) acc.add(row_ratio(mi, mj, m0, spec.intermediate(k), 0));
  return acc.value() / static_cast<double>(spec.S1);
}

double density_ratio_analytic_t1(const T1FamilySpec& spec, int family, std::int64_t t) {
  const auto& p = spec.family(family);
  const double x = static_cast<double>(t) / (p.theta * p.theta * static_cast<double>(spec.S1));
  return 1.0 + phi(p.theta, p.alpha, p.beta) * (x - 1.0);
}

double initial_ratio_direct_t1(const T1FamilySpec& spec, const PlantedInstance& I, const PlantedInstance& J) {
  const auto mi = build_t1(spec, I), mj = build_t1(spec, J), m0 = reference_mdp_t1(spec);
  return row_ratio(mi, mj, m0, 0, 1);
}

double initial_ratio_analytic_t1(const T1FamilySpec& spec, int family, std::int64_t t) {
  const auto& p = spec.family(family);
  return static_cast<double>(t) / (p.theta * p.theta * static_cast<double>(spec.S1));
}

double density_ratio_direct_t2(const T2Params& p, const T2Instance& I, const T2Instance& J, int l) {
  const auto mi = build_t2(p, I), mj = build_t2(p, J), m0 = reference_mdp_t2(p, I.family);
  KahanSum acc;
  for (std::int64_t k = 0; k < p.layer_size[l - 1]; ++k) acc.add(row_ratio(mi, mj, m0, p.layer_state(l, k), 0));
  return acc.value() / static_cast<double>(p.layer_size[l - 1]);
}

namespace {

T2LayerTerm layer_term(const T2Params& p, int family, int l, int n, double c) {
  T2LayerTerm t;
  t.l = l;
  t.S_l = p.layer_size[l - 1];
  t.planted = p.planted_count[family - 1][l - 1];
  t.theta = p.theta[family - 1][l - 1];
  t.alpha_l = planted_x_prob(p, l, p.alpha_of(family));
  t.phi = phi(t.theta, t.alpha_l, 1.0 - t.alpha_l);
  t.coef = (t.phi / 8.0 + 0.25) * std::ldexp(1.0, -l);
  t.eps = n > 0 ? 2.0 * c * (1.0 - t.theta) * t.theta / n : 0.0;
  return t;
}

double centered(const T2LayerTerm& t, std::int64_t overlap_count) {
  return static_cast<double>(overlap_count) / (t.theta * t.theta * static_cast<double>(t.S_l)) - 1.0;
}

}  // namespace

double density_ratio_bound_t2(const T2Params& p, int family, int l, std::int64_t t_l, std::int64_t t_next) {
  const auto term = layer_term(p, family, l, 1, 0.1);
  double b = 1.0 + term.phi * centered(term, t_l);
  if (l < p.L) b += std::max(0.0, centered(layer_term(p, family, l + 1, 1, 0.1), t_next));
  return b;
}

T2PipelineReport tv_pipeline_t2(const T2Params& p, int n, double c) {
  if (n < 0) throw ValidationError("n must be nonnegative");
  T2PipelineReport r;
  r.n = n;
  r.L = p.L;
  r.S = p.S;
  r.gamma = p.gamma;
  r.c = c;
  const double two_L = std::ldexp(1.0, p.L);
  r.ref_term = n / (8.0 * two_L);
  r.ref_exact = tv_reference_t2_exact(p, n);
  r.target = 0.5 + r.ref_term;
  r.in_regime = n >= 5 && static_cast<double>(p.S - 5) > 3200.0 * std::pow(n, 3) * std::pow(p.L, 6);

  std::vector<double> binom(n + 1);
  for (int family = 1; family <= 2; ++family) {
    T2FamilyBound fb;
    fb.family = family;
    // M[j] = E[(1 + sum over processed layers of Y_l)^j], j = 0..n.
    std::vector<double> M(n + 1, 1.0);
    double first_sum = 0.0, inv_sum = 0.0;
    for (int l = 1; l <= p.L; ++l) {
      T2LayerTerm t = layer_term(p, family, l, n, c);
      const HypergeomTable tab(t.planted, t.S_l, t.planted, true);
      t.window_terms = tab.size();
      std::vector<KahanSum> mom(n + 1);
      for (std::int64_t k = tab.lo(); k <= tab.hi(); ++k) {
        const double y = t.coef * std::max(0.0, centered(t, k));
        if (y == 0.0) continue;
        const double w = tab.pmf(k);
        double pw = w;
        for (int j = 1; j <= n; ++j) {
          pw *= y;
          mom[j].add(pw);
        }
      }
      std::vector<double> m(n + 1, 1.0);
      for (int j = 1; j <= n; ++j) m[j] = mom[j].value();
      std::vector<double> next(n + 1, 0.0);
      for (int j = 0; j <= n; ++j) {
        double acc = 0.0, b = 1.0;  // b = C(j, k)
        for (int k = 0; k <= j; ++k) {
          acc += b * M[k] * m[j - k];
          b = b * (j - k) / (k + 1);
        }
        next[j] = acc;
      }
      M.swap(next);
      first_sum += t.eps / (std::ldexp(2.0, l) * t.theta * (1.0 - t.theta));
      inv_sum += 1.0 / (std::ldexp(2.0, l) * t.theta);
      fb.layers.push_back(t);
    }
    fb.expectation = M[n];
    fb.chi2_expectation = M[n] - 1.0;
    fb.first = std::pow(1.0 + first_sum, n);
    for (const auto& t : fb.layers) {
      fb.tail += std::exp(n * inv_sum - 2.0 * t.eps * t.eps * t.theta * static_cast<double>(t.S_l));
    }
    fb.chi2_witheps = fb.first + fb.tail - 1.0;
    r.family[family - 1] = fb;
  }
  auto half_root = [](double x) { return 0.5 * std::sqrt(std::max(0.0, x)); };
  r.tv_bound = half_root(r.family[0].chi2_witheps) + half_root(r.family[1].chi2_witheps) + r.ref_term;
  r.tv_bound_expectation =
      half_root(r.family[0].chi2_expectation) + half_root(r.family[1].chi2_expectation) + r.ref_term;
  r.certified = r.tv_bound <= r.target;
  return r;
}

std::int64_t pipeline_regime_S(int L, int n) {
  const double need = 3200.0 * std::pow(n, 3) * std::pow(L, 6);
  const std::int64_t d = layer_divisor(L);
  const auto k = static_cast<std::int64_t>(std::floor(need / static_cast<double>(d))) + 1;
  return 5 + k * d;
}

// ---------------------------------------------------------------------------

double regret_lower_bound_t1(double gamma, double tv) {
  if (!(tv >= 0.0 && tv <= 1.0)) throw ValidationError("tv must lie in [0,1]");
  return gamma * gamma / (16.0 * (1.0 - gamma)) * (1.0 - tv);
}

double regret_lower_bound_t2(int L, double gamma, double tv) {
  if (!(tv >= 0.0 && tv <= 1.0)) throw ValidationError("tv must lie in [0,1]");
  return std::pow(gamma, L + 1) / (16.0 * L * (1.0 - gamma)) * (1.0 - tv);
}

double regret_lower_bound_t2_chain(int L, double gamma, double tv) {
  if (!(tv >= 0.0 && tv <= 1.0)) throw ValidationError("tv must lie in [0,1]");
  return std::pow(gamma, L + 1) / (48.0 * L * (1.0 - gamma)) * (1.0 - tv);
}

}  // namespace olab
