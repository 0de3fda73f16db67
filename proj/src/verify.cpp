// SPDX-License-Identifier: Apache-2.0

#include "offlinelab/verify.hpp"

#include <cmath>

#include "offlinelab/theorem1.hpp"
#include "offlinelab/theorem2.hpp"

namespace olab {

namespace {

constexpr double kTol = 1e-10;

double max_abs_diff(const QTable& a, const QTable& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

CheckResult check_le(std::string name, double value, double bound, std::string detail = {}) {
  return {std::move(name), value <= bound, value, bound, std::move(detail)};
}

// Structural checks on the MDP actually stored or rebuilt.
void invariant_checks(const TabularMdp& m, std::vector<CheckResult>& out) {
  const auto broken = m.check_invariants();
  if (broken.empty()) {
    out.push_back({"mdp_invariants", true, 0.0, 0.0, "all structural invariants hold"});
    return;
  }
  for (const auto& b : broken) out.push_back({"mdp_invariants." + b, false, 1.0, 0.0, "violated"});
}

bool same_mdp(const TabularMdp& a, const TabularMdp& b) {
  if (a.num_states() != b.num_states() || a.num_entries() != b.num_entries()) return false;
  for (std::int64_t s = 0; s < a.num_states(); ++s) {
    for (int x = 0; x < kNumActions; ++x) {
      const auto ra = a.row(s, x), rb = b.row(s, x);
      if (ra.size() != rb.size() || a.reward(s, x) != b.reward(s, x)) return false;
      for (std::size_t i = 0; i < ra.size(); ++i) {
        if (ra[i].next != rb[i].next || ra[i].prob != rb[i].prob) return false;
      }
    }
  }
  return a.initial_dist() == b.initial_dist();
}

double realizability(const TabularMdp& m, const QTable& f, int policies, Rng& rng) {
  double worst = 0.0;
  for (int k = 0; k < policies; ++k) {
    worst = std::max(worst, max_abs_diff(exact_q(m, random_policy(m.num_states(), rng)), f));
  }
  // The optimal policy is deterministic; check it too.
  worst = std::max(worst, max_abs_diff(optimal_policy(m).q, f));
  return worst;
}

}  // namespace

bool VerifyReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

Policy random_policy(std::int64_t num_states, Rng& rng) {
  std::vector<double> probs(static_cast<std::size_t>(2 * num_states));
  for (std::int64_t s = 0; s < num_states; ++s) {
    const double p = uniform01(rng);
    probs[2 * s] = p;
    probs[2 * s + 1] = 1.0 - p;
  }
  return Policy::stochastic(num_states, std::move(probs));
}

nlohmann::json to_json(const CheckResult& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}, {"detail", c.detail}};
}

VerifyReport verify_instance(const LoadedInstance& li, const VerifyOptions& opt) {
  VerifyReport rep;
  auto& out = rep.checks;
  Rng rng = make_stream(opt.seed, 0x7665726966ULL);

  if (li.construction == "theorem1") {
    const auto& spec = *li.t1;
    const auto& inst = *li.t1_instance;
    const TabularMdp built = build_t1(spec, inst);
    const TabularMdp& m = li.stored_mdp ? *li.stored_mdp : built;
    invariant_checks(m, out);
    if (li.stored_mdp) {
      out.push_back({"stored_mdp_matches_rebuild", same_mdp(*li.stored_mdp, built), 0.0, 0.0,
                     "stored tabular block against the rebuilt instance"});
    }
    if (!rep.all_passed()) return rep;

    const SchemeTuple t{spec.params[0].theta, spec.params[0].alpha, spec.params[0].beta, spec.params[1].theta,
                        spec.params[1].alpha, spec.params[1].beta, spec.w};
    const auto bad = validate_scheme(t, spec.gamma);
    std::string verdict = bad.empty() ? "valid" : "";
    for (const auto& b : bad) verdict += (verdict.empty() ? "" : ",") + b;
    out.push_back({"scheme_valid", bad.empty(), static_cast<double>(bad.size()), 0.0, verdict});

    const QTable f = f_values(spec, inst.family);
    out.push_back(check_le("realizability_residual", realizability(m, f, opt.policies, rng), kTol,
                           std::to_string(opt.policies) + " random stochastic policies plus the optimal one"));

    const auto conc = concentrability(m, mu_theorem1(spec));
    out.push_back({"concentrability", !conc.infinite && std::abs(conc.value - 16.0) <= 1e-9, conc.value, 16.0,
                   "expected exactly 16"});

    const auto opt_q = optimal_policy(m).q;
    const double gap = std::abs(opt_q[0] - opt_q[1]);
    const double want = spec.gamma * spec.gamma / (8.0 * (1.0 - spec.gamma));
    out.push_back({"gap", std::abs(gap - want) <= kTol, gap, want, "|Q*(start,1) - Q*(start,2)|"});
    out.push_back(check_le("optimality_residual", optimality_residual(m, opt_q), kTol));
    rep.extra["scheme_verdict"] = verdict;
    rep.extra["concentrability_witness"] = {{"state", conc.arg_state}, {"action", conc.arg_action + 1},
                                            {"step", conc.arg_step}};
    return rep;
  }

  const auto& p = *li.t2;
  const auto& inst = *li.t2_instance;
  const TabularMdp built = build_t2(p, inst);
  const TabularMdp& m = li.stored_mdp ? *li.stored_mdp : built;
  invariant_checks(m, out);
  if (li.stored_mdp) {
    out.push_back({"stored_mdp_matches_rebuild", same_mdp(*li.stored_mdp, built), 0.0, 0.0,
                   "stored tabular block against the rebuilt instance"});
  }
  if (!rep.all_passed()) return rep;

  const QTable f = f_values_t2(p, inst.family);
  out.push_back(check_le("realizability_residual", realizability(m, f, opt.policies, rng), kTol,
                         std::to_string(opt.policies) + " random stochastic policies plus the optimal one"));

  const double bound = 32.0 * p.L;
  const auto conc = concentrability(m, mu_theorem2(p));
  out.push_back(check_le("concentrability", conc.infinite ? INFINITY : conc.value, bound,
                         "this instance; bound 32 L"));
  const auto cert = concentrability_certificate_t2(p, opt.seed, opt.cert_instances);
  out.push_back(check_le("concentrability_certificate", cert.coefficient, cert.bound,
                         "max over " + std::to_string(cert.instances) + " sampled instances; binding class " +
                             cert.binding_class));
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& c : cert.classes) {
    cases.push_back({{"class", c.cls}, {"family", c.family}, {"exact_ratio", c.exact_ratio},
                     {"exact_step", c.exact_step}, {"case_ratio", c.case_ratio}, {"case_steps", c.case_steps},
                     {"exceeds_case", c.exceeds_case}});
  }
  rep.extra["concentrability_cases"] = cases;
  rep.extra["concentrability_binding"] = {{"family", cert.binding_family}, {"state", cert.binding_state},
                                          {"action", cert.binding_action + 1}, {"step", cert.binding_step},
                                          {"class", cert.binding_class}, {"coefficient", cert.coefficient},
                                          {"bound", cert.bound}};

  const auto opt_q = optimal_policy(m).q;
  const double gap = std::abs(opt_q[0] - opt_q[1]);
  const double want =
      p.gamma * std::abs(v_alpha(p, p.alpha[0]) - v_alpha(p, p.alpha[1])) / (2.0 * (1.0 - p.gamma));
  out.push_back({"gap", std::abs(gap - want) <= kTol, gap, want, "gamma |V1 - V2| / (2 (1 - gamma))"});
  const double floor = std::pow(p.gamma, p.L + 1) / (24.0 * p.L * (1.0 - p.gamma));
  out.push_back({"gap_floor", gap >= floor, gap, floor, "gap >= gamma^(L+1) / (24 L (1 - gamma))"});
  out.push_back(check_le("optimality_residual", optimality_residual(m, opt_q), kTol));
  return rep;
}

}  // namespace olab
