// SPDX-License-Identifier: Apache-2.0

#include "offlinelab/theorem1.hpp"

#include <algorithm>
#include <cmath>

namespace olab {

namespace {

constexpr double kEq = 1e-12;

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

std::int64_t integral_count(double theta, std::int64_t S1) {
  const double c = theta * static_cast<double>(S1);
  const double r = std::round(c);
  if (std::abs(c - r) > 1e-9 || r < 1) {
    throw ValidationError("theta * S1 must be a positive integer");
  }
  return static_cast<std::int64_t>(r);
}

}  // namespace

SchemeTuple standard_scheme(double gamma) {
  return {0.5, 0.25, 0.75, 0.25, 0.5, 0.5, 3.0 * gamma / 8.0};
}

std::vector<std::string> validate_scheme(const SchemeTuple& t, double gamma) {
  std::vector<std::string> bad;
  if (std::abs(t.theta1 * t.alpha1 - t.theta2 * t.alpha2) > kEq) bad.push_back("marginal");
  if (std::abs((1 - t.theta1) * t.beta1 - (1 - t.theta2) * t.beta2) > kEq) {
    bad.push_back("marginal_complement");
  }
  for (double x : {t.theta1, t.alpha1, t.beta1, t.theta2, t.alpha2, t.beta2}) {
    if (!in_open_unit(x)) {
      bad.push_back("interior");
      break;
    }
  }
  if (!(gamma * t.alpha1 < t.w && t.w < gamma * t.alpha2)) bad.push_back("different");
  if (t.beta1 > 0 && t.beta2 > 0 && (t.alpha1 > t.beta1 || t.alpha2 > t.beta2 || t.w < 0 || t.w > 1)) {
    bad.push_back("reward_range");
  }
  return bad;
}

T1FamilySpec make_t1_spec(std::int64_t S, double gamma) {
  return make_t1_spec(S, gamma, standard_scheme(gamma));
}

T1FamilySpec make_t1_spec(std::int64_t S, double gamma, const SchemeTuple& t) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0,1)");
  if (S < 9) throw ValidationError("S must be at least 9");
  const auto bad = validate_scheme(t, gamma);
  if (!bad.empty()) {
    std::string msg = "parameter scheme violates:";
    for (const auto& b : bad) msg += " " + b;
    throw ValidationError(msg);
  }
  T1FamilySpec spec;
  spec.requested_S = S;
  spec.S = S + ((4 - (S - 5) % 4) % 4);
  spec.S1 = spec.S - 5;
  spec.gamma = gamma;
  spec.w = t.w;
  spec.params[0] = {t.theta1, t.alpha1, t.beta1, integral_count(t.theta1, spec.S1)};
  spec.params[1] = {t.theta2, t.alpha2, t.beta2, integral_count(t.theta2, spec.S1)};
  return spec;
}

void validate_instance(const T1FamilySpec& spec, const PlantedInstance& inst) {
  if (inst.family != 1 && inst.family != 2) throw ValidationError("family must be 1 or 2");
  const auto& p = spec.family(inst.family);
  if (static_cast<std::int64_t>(inst.planted.size()) != p.planted_count) {
    throw ValidationError("planted set has size " + std::to_string(inst.planted.size()) +
                          ", expected " + std::to_string(p.planted_count));
  }
  for (std::size_t i = 0; i < inst.planted.size(); ++i) {
    if (inst.planted[i] < 0 || inst.planted[i] >= spec.S1) throw ValidationError("planted index out of range");
    if (i > 0 && inst.planted[i] <= inst.planted[i - 1]) throw ValidationError("planted set must be sorted and distinct");
  }
}

std::vector<std::int64_t> sample_subset(std::int64_t n, std::int64_t k, Rng& rng) {
  if (k < 0 || k > n) throw ValidationError("subset size out of range");
  std::vector<std::int64_t> out(k);
  std::vector<std::int64_t> perm(n);
  for (std::int64_t i = 0; i < n; ++i) perm[i] = i;
  for (std::int64_t i = 0; i < k; ++i) {
    const std::int64_t j = i + static_cast<std::int64_t>(uniform_index(rng, n - i));
    std::swap(perm[i], perm[j]);
    out[i] = perm[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

PlantedInstance sample_t1_instance(const T1FamilySpec& spec, int family, Rng& rng) {
  PlantedInstance inst;
  inst.family = family;
  inst.planted = sample_subset(spec.S1, spec.family(family).planted_count, rng);
  return inst;
}

namespace {

void add_terminals(MdpBuilder& b, const T1FamilySpec& spec, double rz, RewardTag z_tag) {
  const auto self = [](std::int64_t s) { return Transition{static_cast<std::int32_t>(s), 1.0}; };
  b.set_state(spec.W(), StateRole::kTerminalW);
  b.set_state(spec.X(), StateRole::kTerminalX);
  b.set_state(spec.Y(), StateRole::kTerminalY);
  b.set_state(spec.Z(), StateRole::kTerminalZ);
  const Transition w[] = {self(spec.W())}, x[] = {self(spec.X())}, y[] = {self(spec.Y())}, z[] = {self(spec.Z())};
  b.add_state_rows(w, spec.w, RewardTag::kW);
  b.add_state_rows(x, 1.0, RewardTag::kOne);
  b.add_state_rows(y, 0.0, RewardTag::kZero);
  b.add_state_rows(z, rz, z_tag);
}

RewardTag z_tag_for(int family) { return family == 1 ? RewardTag::kZFamily1 : RewardTag::kZFamily2; }

}  // namespace

TabularMdp build_t1(const T1FamilySpec& spec, const PlantedInstance& inst) {
  validate_instance(spec, inst);
  const auto& p = spec.family(inst.family);
  MdpBuilder b(spec.S, spec.gamma);
  const auto X = static_cast<std::int32_t>(spec.X()), Y = static_cast<std::int32_t>(spec.Y()),
             Z = static_cast<std::int32_t>(spec.Z());

  b.set_state(0, StateRole::kInitial);
  b.add_row({{static_cast<std::int32_t>(spec.W()), 1.0}}, 0.0, RewardTag::kZero);
  std::vector<Transition> spread;
  spread.reserve(inst.planted.size());
  const double u = 1.0 / static_cast<double>(inst.planted.size());
  for (std::int64_t i : inst.planted) spread.push_back({static_cast<std::int32_t>(spec.intermediate(i)), u});
  b.add_row(spread, 0.0, RewardTag::kZero);

  const Transition planted_row[] = {{X, p.alpha}, {Y, 1.0 - p.alpha}};
  const Transition other_row[] = {{Y, 1.0 - p.beta}, {Z, p.beta}};
  std::size_t next = 0;
  for (std::int64_t i = 0; i < spec.S1; ++i) {
    const bool planted = next < inst.planted.size() && inst.planted[next] == i;
    if (planted) ++next;
    b.set_state(spec.intermediate(i), StateRole::kIntermediate, 1);
    b.add_state_rows(planted ? std::span<const Transition>(planted_row) : std::span<const Transition>(other_row),
                     0.0, RewardTag::kZero);
  }
  add_terminals(b, spec, p.alpha / p.beta, z_tag_for(inst.family));
  return b.build();
}

QTable f_values(const T1FamilySpec& spec, int family) {
  const auto& p = spec.family(family);
  const double g = spec.gamma, h = 1.0 / (1.0 - g);
  QTable f(2 * spec.S, 0.0);
  f[0] = g * spec.w * h;
  f[1] = g * g * p.alpha * h;
  for (std::int64_t i = 0; i < spec.S1; ++i) {
    const auto s = spec.intermediate(i);
    f[2 * s] = f[2 * s + 1] = g * p.alpha * h;
  }
  auto put = [&](std::int64_t s, double v) { f[2 * s] = f[2 * s + 1] = v; };
  put(spec.W(), spec.w * h);
  put(spec.X(), h);
  put(spec.Y(), 0.0);
  put(spec.Z(), p.alpha / p.beta * h);
  return f;
}

DataDistribution mu_theorem1(const T1FamilySpec& spec) {
  DataDistribution mu;
  mu.probs.assign(2 * spec.S, 0.0);
  const double corner = 1.0 / 16.0, mid = 1.0 / (4.0 * static_cast<double>(spec.S1));
  for (std::int64_t s : {spec.start(), spec.W(), spec.X(), spec.Y()}) {
    mu.probs[2 * s] = mu.probs[2 * s + 1] = corner;
  }
  for (std::int64_t i = 0; i < spec.S1; ++i) {
    const auto s = spec.intermediate(i);
    mu.probs[2 * s] = mu.probs[2 * s + 1] = mid;
  }
  return mu;
}

TabularMdp reference_mdp_t1(const T1FamilySpec& spec) {
  const auto& p = spec.family(1);
  MdpBuilder b(spec.S, spec.gamma);
  b.set_state(0, StateRole::kInitial);
  b.add_row({{static_cast<std::int32_t>(spec.W()), 1.0}}, 0.0, RewardTag::kZero);
  std::vector<Transition> spread;
  const double u = 1.0 / static_cast<double>(spec.S1);
  for (std::int64_t i = 0; i < spec.S1; ++i) spread.push_back({static_cast<std::int32_t>(spec.intermediate(i)), u});
  b.add_row(spread, 0.0, RewardTag::kZero);
  // Both families share these marginals by the scheme constraints.
  const double px = p.theta * p.alpha, pz = (1.0 - p.theta) * p.beta;
  const Transition row[] = {{static_cast<std::int32_t>(spec.X()), px},
                            {static_cast<std::int32_t>(spec.Y()), 1.0 - px - pz},
                            {static_cast<std::int32_t>(spec.Z()), pz}};
  for (std::int64_t i = 0; i < spec.S1; ++i) {
    b.set_state(spec.intermediate(i), StateRole::kIntermediate, 1);
    b.add_state_rows(row, 0.0, RewardTag::kZero);
  }
  add_terminals(b, spec, 0.0, RewardTag::kZero);
  return b.build();
}

DilutedInstance dilute(const T1FamilySpec& spec, const PlantedInstance& inst, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("eps must lie in (0,1]");
  const TabularMdp base = build_t1(spec, inst);
  const std::int64_t S = spec.S;
  MdpBuilder b(S + 1, spec.gamma);
  for (std::int64_t s = 0; s < S; ++s) {
    b.set_state(s, base.role(s), base.layer(s));
    for (int a = 0; a < kNumActions; ++a) b.add_row(base.row(s, a), base.reward(s, a), base.reward_tag(s, a));
  }
  b.set_state(S, StateRole::kDummy);
  const Transition loop[] = {{static_cast<std::int32_t>(S), 1.0}};
  b.add_state_rows(loop, 0.0, RewardTag::kZero);
  std::vector<double> d0(S + 1, 0.0);
  d0[0] = eps;
  d0[S] += 1.0 - eps;
  b.set_initial(std::move(d0));

  DilutedInstance out{b.build(), {}};
  const auto mu = mu_theorem1(spec);
  out.mu.probs.assign(2 * (S + 1), 0.0);
  for (std::size_t i = 0; i < mu.probs.size(); ++i) out.mu.probs[i] = eps * mu.probs[i];
  out.mu.probs[2 * S] = out.mu.probs[2 * S + 1] = (1.0 - eps) / 2.0;
  return out;
}

std::vector<std::array<double, 2>> linear_features(const T1FamilySpec& spec) {
  const QTable f1 = f_values(spec, 1), f2 = f_values(spec, 2);
  std::vector<std::array<double, 2>> phi(f1.size());
  for (std::size_t i = 0; i < f1.size(); ++i) phi[i] = {f1[i], f2[i]};
  return phi;
}

std::array<double, 4> feature_gram(const T1FamilySpec& spec) {
  const auto phi = linear_features(spec);
  const auto mu = mu_theorem1(spec);
  std::array<double, 4> g{0, 0, 0, 0};
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double m = mu.probs[i];
    g[0] += m * phi[i][0] * phi[i][0];
    g[1] += m * phi[i][0] * phi[i][1];
    g[3] += m * phi[i][1] * phi[i][1];
  }
  g[2] = g[1];
  return g;
}

}  // namespace olab
