// SPDX-License-Identifier: Apache-2.0
//
// BRM and FQI are restricted to the two-element class {f1, f2}. The
// estimators are our own instantiations: plain plug-in squared residuals.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "offlinelab/divergence.hpp"
#include "offlinelab/numeric.hpp"
#include "offlinelab/offline.hpp"

namespace olab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double vmax(const QTable& f, std::int32_t s) { return std::max(f[2 * s], f[2 * s + 1]); }

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

}  // namespace

double bellman_loss(const QTable& f, const OfflineDataset& d, double gamma) {
  return regression_loss(f, f, d, gamma);
}

double regression_loss(const QTable& f, const QTable& f_prev, const OfflineDataset& d, double gamma) {
  // Sorting the per-record terms makes the sum independent of record order.
  std::vector<double> terms;
  terms.reserve(d.records.size());
  for (const auto& r : d.records) {
    const double e = f[2 * r.s + r.a] - r.r - gamma * vmax(f_prev, r.next);
    terms.push_back(e * e);
  }
  std::sort(terms.begin(), terms.end());
  KahanSum sum;
  for (double t : terms) sum.add(t);
  return d.records.empty() ? 0.0 : sum.value() / static_cast<double>(d.records.size());
}

int brm_select(const QTable& f1, const QTable& f2, const OfflineDataset& d, double gamma) {
  if (d.records.empty()) throw ValidationError("BRM needs a non-empty dataset");
  return bellman_loss(f2, d, gamma) < bellman_loss(f1, d, gamma) ? 2 : 1;
}

FqiResult fqi(const QTable& f1, const QTable& f2, const OfflineDataset& d, double gamma, int iterations) {
  if (iterations < 1) throw ValidationError("FQI needs at least one iteration");
  const QTable* cls[2] = {&f1, &f2};
  // The fitted index depends only on the previous index, so the whole
  // trajectory is determined by two regressions.
  int step[2];
  for (int prev = 0; prev < 2; ++prev) {
    const double l1 = regression_loss(f1, *cls[prev], d, gamma);
    const double l2 = regression_loss(f2, *cls[prev], d, gamma);
    step[prev] = l2 < l1 ? 1 : 0;
  }
  FqiResult out;
  int cur = 0;
  for (int k = 0; k < iterations; ++k) {
    const int next = step[cur];
    out.iterations = k + 1;
    if (next == cur) {
      out.fixpoint = true;
      break;
    }
    if (step[next] == cur) out.oscillation = true;
    cur = next;
  }
  out.index = cur + 1;
  return out;
}

namespace {

// Log-probability of records whose law does not depend on the planted set.
double fixed_record_log_prob(const T1FamilySpec& spec, const Record& r, int family) {
  const std::int64_t s = r.s;
  auto self = [&](RewardTag tag) { return r.next == s && r.tag == tag ? 0.0 : kNegInf; };
  if (s == spec.start() && r.a == 0) return r.next == spec.W() && r.tag == RewardTag::kZero ? 0.0 : kNegInf;
  if (s == spec.W()) return self(RewardTag::kW);
  if (s == spec.X()) return self(RewardTag::kOne);
  if (s == spec.Y()) return self(RewardTag::kZero);
  if (s == spec.Z()) return self(family == 1 ? RewardTag::kZFamily1 : RewardTag::kZFamily2);
  return kNegInf;
}

bool is_intermediate(const T1FamilySpec& spec, std::int64_t s) { return s >= 1 && s <= spec.S1; }

struct Signature {
  std::int64_t x = 0, y = 0, z = 0, arrivals = 0;
  bool bad = false;  // an outcome no intermediate state can produce
  auto key() const { return std::tie(x, y, z, arrivals, bad); }
  bool operator<(const Signature& o) const { return key() < o.key(); }
};

}  // namespace

BayesResult bayes_distinguisher(const T1FamilySpec& spec, const OfflineDataset& d) {
  std::map<std::int64_t, Signature> sig;
  double fixed[2] = {0.0, 0.0};
  std::int64_t arrivals = 0;
  bool impossible = false;
  for (const auto& r : d.records) {
    if (r.s < 0 || r.s >= spec.S || r.next < 0 || r.next >= spec.S) {
      throw ValidationError("dataset record outside the state space");
    }
    if (r.s == spec.start() && r.a == 1) {
      if (!is_intermediate(spec, r.next) || r.tag != RewardTag::kZero) {
        impossible = true;
      } else {
        ++arrivals;
        ++sig[r.next].arrivals;
      }
    } else if (is_intermediate(spec, r.s)) {
      auto& g = sig[r.s];
      if (r.tag != RewardTag::kZero) g.bad = true;
      else if (r.next == spec.X()) ++g.x;
      else if (r.next == spec.Y()) ++g.y;
      else if (r.next == spec.Z()) ++g.z;
      else g.bad = true;
    } else {
      for (int i = 0; i < 2; ++i) fixed[i] += fixed_record_log_prob(spec, r, i + 1);
    }
  }
  std::map<Signature, std::int64_t> cells;
  for (const auto& [s, g] : sig) ++cells[g];

  const auto S1 = static_cast<std::int64_t>(spec.S1);
  const auto occupied = static_cast<std::int64_t>(sig.size());
  constexpr std::int64_t kMaxCells = 1000;
  if (static_cast<std::int64_t>(cells.size()) > kMaxCells) {
    if (S1 <= 16) return bayes_bruteforce(spec, d);
    throw SizeGuardError("too many signature cells for the grouped likelihood");
  }

  BayesResult out;
  out.method = "grouped";
  out.cells = static_cast<std::int64_t>(cells.size());
  double logl[2];
  for (int i = 0; i < 2; ++i) {
    const auto& p = spec.params[i];
    const std::int64_t k = p.planted_count;
    // coef[K] = log of the sum over ways to mark K occupied states planted.
    std::vector<double> coef{0.0};
    for (const auto& [g, count] : cells) {
      double lp = kNegInf, lu = kNegInf;
      if (!g.bad && g.z == 0) lp = g.x * safe_log(p.alpha) + g.y * safe_log(1.0 - p.alpha);
      if (!g.bad && g.x == 0 && g.arrivals == 0) lu = g.z * safe_log(p.beta) + g.y * safe_log(1.0 - p.beta);
      std::vector<double> next(coef.size() + count, kNegInf);
      for (std::size_t K = 0; K < coef.size(); ++K) {
        if (coef[K] == kNegInf) continue;
        for (std::int64_t j = 0; j <= count; ++j) {
          const double tp = j == 0 ? 0.0 : j * lp;
          const double tu = j == count ? 0.0 : (count - j) * lu;
          if (tp == kNegInf || tu == kNegInf) continue;
          next[K + j] = log_add(next[K + j], coef[K] + log_choose(count, j) + tp + tu);
        }
      }
      coef.swap(next);
    }
    double total = kNegInf;
    const std::int64_t free_states = S1 - occupied;
    for (std::int64_t K = 0; K < static_cast<std::int64_t>(coef.size()); ++K) {
      if (K > k || k - K > free_states || coef[K] == kNegInf) continue;
      total = log_add(total, coef[K] + log_choose(free_states, k - K));
    }
    if (total != kNegInf) {
      total += -static_cast<double>(arrivals) * std::log(static_cast<double>(k)) - log_choose(S1, k);
    }
    logl[i] = impossible ? kNegInf : total + fixed[i];
  }
  out.log_l1 = logl[0];
  out.log_l2 = logl[1];
  if (logl[0] == kNegInf && logl[1] == kNegInf) out.log_odds = 0.0;
  else out.log_odds = logl[0] - logl[1];
  return out;
}

BayesResult bayes_bruteforce(const T1FamilySpec& spec, const OfflineDataset& d) {
  if (spec.S1 > 16) throw SizeGuardError("brute-force Bayes test needs S1 <= 16");
  BayesResult out;
  out.method = "bruteforce";
  double logl[2];
  for (int i = 0; i < 2; ++i) {
    const int k = static_cast<int>(spec.params[i].planted_count);
    double total = kNegInf;
    std::int64_t subsets = 0;
    for_each_subset(static_cast<int>(spec.S1), k, [&](const std::vector<int>& sub) {
      ++subsets;
      PlantedInstance inst{i + 1, std::vector<std::int64_t>(sub.begin(), sub.end())};
      const TabularMdp m = build_t1(spec, inst);
      double ll = 0.0;
      for (const auto& r : d.records) {
        if (r.tag != m.reward_tag(r.s, r.a)) {
          ll = kNegInf;
          break;
        }
        double pr = 0.0;
        for (const auto& t : m.row(r.s, r.a)) {
          if (t.next == r.next) pr += t.prob;
        }
        ll += safe_log(pr);
        if (ll == kNegInf) break;
      }
      total = log_add(total, ll);
    });
    logl[i] = total == kNegInf ? kNegInf : total - std::log(static_cast<double>(subsets));
  }
  out.cells = 0;
  out.log_l1 = logl[0];
  out.log_l2 = logl[1];
  if (logl[0] == kNegInf && logl[1] == kNegInf) out.log_odds = 0.0;
  else out.log_odds = logl[0] - logl[1];
  return out;
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kBrm: return "brm";
    case Algorithm::kFqi: return "fqi";
    case Algorithm::kBayes: return "bayes";
  }
  return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "brm") return Algorithm::kBrm;
  if (name == "fqi") return Algorithm::kFqi;
  if (name == "bayes") return Algorithm::kBayes;
  throw ValidationError("unknown algorithm '" + name + "'");
}

}  // namespace olab
