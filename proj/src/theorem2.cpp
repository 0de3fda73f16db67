// SPDX-License-Identifier: Apache-2.0

#include "offlinelab/theorem2.hpp"

#include <algorithm>
#include <cmath>

#include "offlinelab/theorem1.hpp"  // sample_subset

namespace olab {

std::int64_t layer_divisor(int L) {
  std::int64_t d = 0;
  for (int l = 1; l <= L; ++l) d += static_cast<std::int64_t>(2 * L + 1 - l) * (L + 2 - l);
  return d;
}

std::int64_t round_up_t2(std::int64_t S, int L) {
  const std::int64_t d = layer_divisor(L);
  const std::int64_t k = std::max<std::int64_t>(1, (S - 5 + d - 1) / d);
  return 5 + k * d;
}

double advance_prob(int l, double alpha) { return (1.0 - l * alpha) / (1.0 - (l - 1) * alpha); }

double planted_x_prob(const T2Params& p, int l, double alpha) {
  return std::pow(p.gamma, p.L - l) * alpha / (1.0 - (l - 1) * alpha);
}

double v_alpha(const T2Params& p, double alpha) {
  double v = 0.0;
  for (int l = 1; l <= p.L; ++l) {
    v += std::ldexp(1.0, -(l + 1)) * std::pow(p.gamma, p.L - (l - 1)) * alpha / (1.0 - (l - 1) * alpha);
  }
  v += std::ldexp(1.0, -(p.L + 1)) * alpha / (1.0 - p.L * alpha);
  return v + 0.5;
}

double continuation_value(const T2Params& p, double alpha) { return v_alpha(p, alpha) - 0.25; }

T2Params make_t2_params(int L, std::int64_t S, double gamma) {
  if (L < 1) throw ValidationError("L must be at least 1");
  if (L > 64) throw ValidationError("L is too large");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0,1)");
  if (S < 6) throw ValidationError("S must exceed 5");
  T2Params p;
  p.L = L;
  p.requested_S = S;
  p.L_div = layer_divisor(L);
  p.S = round_up_t2(S, L);
  if (p.S > std::numeric_limits<std::int32_t>::max()) throw ValidationError("S exceeds 32-bit index range");
  p.K = (p.S - 5) / p.L_div;
  p.gamma = gamma;
  p.alpha = {1.0 / (2.0 * L), 1.0 / (L + 1.0)};
  p.w = 0.5 * (continuation_value(p, p.alpha[0]) + continuation_value(p, p.alpha[1]));
  std::int64_t off = 1;
  for (int l = 1; l <= L; ++l) {
    const std::int64_t n = p.K * (2 * L + 1 - l) * (L + 2 - l);
    p.layer_size.push_back(n);
    p.layer_offset.push_back(off);
    off += n;
  }
  if (off != p.S - 4) throw InvariantError("layer sizes do not add up to S - 5");
  // theta^(1) uses alpha2 and theta^(2) uses alpha1. Both equal 1/m for an
  // integer m, so counts are computed in integers.
  for (int i = 0; i < 2; ++i) {
    const double a_other = p.alpha[1 - i];
    const std::int64_t inv = (i == 0) ? (L + 1) : (2 * L);  // 1 / a_other
    for (int l = 1; l <= L; ++l) {
      const std::int64_t m = inv - (l - 1);  // theta_l = 1 / m
      const std::int64_t n = p.layer_size[l - 1];
      if (n % m != 0) throw InvariantError("theta_l * S_l is not integral");
      p.theta[i].push_back(a_other / (1.0 - (l - 1) * a_other));
      p.planted_count[i].push_back(n / m);
    }
  }
  return p;
}

void validate_instance(const T2Params& p, const T2Instance& inst) {
  if (inst.family != 1 && inst.family != 2) throw ValidationError("family must be 1 or 2");
  if (static_cast<int>(inst.planted.size()) != p.L) throw ValidationError("need one planted set per layer");
  for (int l = 1; l <= p.L; ++l) {
    const auto& I = inst.planted[l - 1];
    if (static_cast<std::int64_t>(I.size()) != p.planted_count[inst.family - 1][l - 1]) {
      throw ValidationError("planted set of layer " + std::to_string(l) + " has the wrong size");
    }
    for (std::size_t k = 0; k < I.size(); ++k) {
      if (I[k] < 0 || I[k] >= p.layer_size[l - 1]) throw ValidationError("planted index out of range");
      if (k > 0 && I[k] <= I[k - 1]) throw ValidationError("planted set must be sorted and distinct");
    }
  }
}

T2Instance sample_t2_instance(const T2Params& p, int family, Rng& rng) {
  if (family != 1 && family != 2) throw ValidationError("family must be 1 or 2");
  T2Instance inst;
  inst.family = family;
  for (int l = 1; l <= p.L; ++l) {
    inst.planted.push_back(sample_subset(p.layer_size[l - 1], p.planted_count[family - 1][l - 1], rng));
  }
  return inst;
}

namespace {

std::int32_t i32(std::int64_t s) { return static_cast<std::int32_t>(s); }

// Row from the start state under action 2; shared by every model.
std::vector<Transition> start_spread(const T2Params& p) {
  std::vector<Transition> row;
  row.reserve(p.S);
  for (int l = 1; l <= p.L; ++l) {
    const double u = std::ldexp(0.5, -l) / static_cast<double>(p.layer_size[l - 1]);
    for (std::int64_t k = 0; k < p.layer_size[l - 1]; ++k) row.push_back({i32(p.layer_state(l, k)), u});
  }
  row.push_back({i32(p.X()), 0.25});
  row.push_back({i32(p.Y()), 0.25});
  row.push_back({i32(p.Z()), std::ldexp(0.5, -p.L)});
  return row;
}

void add_start_and_terminals_begin(MdpBuilder& b, const T2Params& p) {
  b.set_state(0, StateRole::kInitial);
  b.add_row({{i32(p.W()), 1.0}}, 0.0, RewardTag::kZero);
  const auto spread = start_spread(p);
  b.add_row(spread, 0.0, RewardTag::kZero);
}

void add_terminals(MdpBuilder& b, const T2Params& p, int family) {
  const double a = p.alpha_of(family);
  b.set_state(p.W(), StateRole::kTerminalW);
  b.set_state(p.X(), StateRole::kTerminalX);
  b.set_state(p.Y(), StateRole::kTerminalY);
  b.set_state(p.Z(), StateRole::kTerminalZ);
  for (std::int64_t s : {p.W(), p.X(), p.Y(), p.Z()}) {
    const Transition loop[] = {{i32(s), 1.0}};
    if (s == p.W()) b.add_state_rows(loop, p.w, RewardTag::kW);
    if (s == p.X()) b.add_state_rows(loop, 1.0, RewardTag::kOne);
    if (s == p.Y()) b.add_state_rows(loop, 0.0, RewardTag::kZero);
    if (s == p.Z()) {
      b.add_state_rows(loop, a / (1.0 - p.L * a), family == 1 ? RewardTag::kZFamily1 : RewardTag::kZFamily2);
    }
  }
}

}  // namespace

TabularMdp build_t2(const T2Params& p, const T2Instance& inst) {
  validate_instance(p, inst);
  const double a = p.alpha_of(inst.family);
  MdpBuilder b(p.S, p.gamma);
  add_start_and_terminals_begin(b, p);
  std::vector<Transition> onward;
  for (int l = 1; l <= p.L; ++l) {
    const auto& I = inst.planted[l - 1];
    const double px = planted_x_prob(p, l, a);
    const Transition planted_row[] = {{i32(p.X()), px}, {i32(p.Y()), 1.0 - px}};
    const double adv = advance_prob(l, a);
    onward.clear();
    if (l < p.L) {
      const auto& next = inst.planted[l];
      const double u = adv / static_cast<double>(next.size());
      for (std::int64_t k : next) onward.push_back({i32(p.layer_state(l + 1, k)), u});
    } else {
      onward.push_back({i32(p.Z()), adv});
    }
    onward.push_back({i32(p.Y()), 1.0 - adv});
    std::size_t cursor = 0;
    for (std::int64_t k = 0; k < p.layer_size[l - 1]; ++k) {
      const bool planted = cursor < I.size() && I[cursor] == k;
      if (planted) ++cursor;
      b.set_state(p.layer_state(l, k), StateRole::kIntermediate, l);
      if (planted) {
        b.add_state_rows(planted_row, 0.0, RewardTag::kZero);
      } else {
        b.add_state_rows(onward, 0.0, RewardTag::kZero);
      }
    }
  }
  add_terminals(b, p, inst.family);
  return b.build();
}

QTable f_values_t2(const T2Params& p, int family) {
  const double a = p.alpha_of(family), g = p.gamma, h = 1.0 / (1.0 - g);
  QTable f(2 * p.S, 0.0);
  f[0] = g * p.w * h;
  f[1] = g * continuation_value(p, a) * h;
  for (int l = 1; l <= p.L; ++l) {
    const double v = std::pow(g, p.L - (l - 1)) * a / (1.0 - (l - 1) * a) * h;
    for (std::int64_t k = 0; k < p.layer_size[l - 1]; ++k) {
      const auto s = p.layer_state(l, k);
      f[2 * s] = f[2 * s + 1] = v;
    }
  }
  auto put = [&](std::int64_t s, double v) { f[2 * s] = f[2 * s + 1] = v; };
  put(p.W(), p.w * h);
  put(p.X(), h);
  put(p.Y(), 0.0);
  put(p.Z(), a / (1.0 - p.L * a) * h);
  return f;
}

DataDistribution mu_theorem2(const T2Params& p) {
  DataDistribution mu;
  mu.probs.assign(2 * p.S, 0.0);
  auto put = [&](std::int64_t s, double state_mass) { mu.probs[2 * s] = mu.probs[2 * s + 1] = state_mass / 2.0; };
  put(0, 0.5);
  put(p.W(), 0.25);
  put(p.X(), 1.0 / 16.0);
  put(p.Y(), 1.0 / 16.0);
  for (int l = 1; l <= p.L; ++l) {
    const double m = std::ldexp(1.0 / 8.0, -l) / static_cast<double>(p.layer_size[l - 1]);
    for (std::int64_t k = 0; k < p.layer_size[l - 1]; ++k) put(p.layer_state(l, k), m);
  }
  put(p.Z(), std::ldexp(1.0 / 8.0, -p.L));
  return mu;
}

TabularMdp reference_mdp_t2(const T2Params& p, int family) {
  const double a1 = p.alpha[0], a2 = p.alpha[1];
  MdpBuilder b(p.S, p.gamma);
  add_start_and_terminals_begin(b, p);
  std::vector<Transition> row;
  for (int l = 1; l <= p.L; ++l) {
    // Averaging over uniformly random planted sets: a state is planted with
    // probability theta_l, and unplanted mass spreads uniformly over the
    // next layer. The two families give the same average.
    const double denom = (1.0 - (l - 1) * a1) * (1.0 - (l - 1) * a2);
    const double onward = (1.0 - l * a1) * (1.0 - l * a2) / denom;
    const double to_x = std::pow(p.gamma, p.L - l) * a1 * a2 / denom;
    row.clear();
    if (l < p.L) {
      const double u = onward / static_cast<double>(p.layer_size[l]);
      for (std::int64_t k = 0; k < p.layer_size[l]; ++k) row.push_back({i32(p.layer_state(l + 1, k)), u});
    } else {
      row.push_back({i32(p.Z()), onward});
    }
    row.push_back({i32(p.X()), to_x});
    row.push_back({i32(p.Y()), 1.0 - onward - to_x});
    for (std::int64_t k = 0; k < p.layer_size[l - 1]; ++k) {
      b.set_state(p.layer_state(l, k), StateRole::kIntermediate, l);
      b.add_state_rows(row, 0.0, RewardTag::kZero);
    }
  }
  add_terminals(b, p, family);
  return b.build();
}

std::string t2_state_class(const T2Params& p, const T2Instance& inst, std::int64_t s) {
  if (s == 0) return "start";
  if (s == p.W()) return "W";
  if (s == p.X()) return "X";
  if (s == p.Y()) return "Y";
  if (s == p.Z()) return "Z";
  for (int l = p.L; l >= 1; --l) {
    if (s >= p.layer_offset[l - 1]) {
      const auto& I = inst.planted[l - 1];
      const bool planted = std::binary_search(I.begin(), I.end(), s - p.layer_offset[l - 1]);
      return (planted ? "I^" : "Ibar^") + std::to_string(l);
    }
  }
  return "start";
}

namespace {

// Reach bounds from the case table, per family. For family 2 the roles of
// the two alphas are swapped.
double case_reach(const T2Params& p, int family, const std::string& cls, std::string* steps) {
  const int L = p.L;
  const double a_own = p.alpha_of(family), a_other = p.alpha_of(3 - family);
  if (cls == "start" || cls == "W" || cls == "X" || cls == "Y") {
    *steps = "any";
    return 1.0;
  }
  if (cls == "Z") {
    *steps = "1";
    return std::ldexp(0.5, -L);
  }
  const bool planted = cls.rfind("I^", 0) == 0;
  const int l = std::stoi(cls.substr(cls.find('^') + 1));
  const double Sl = static_cast<double>(p.layer_size[l - 1]);
  const double direct = std::ldexp(0.5, -l) / Sl;
  if (!planted) {
    *steps = "1";
    return direct;
  }
  if (l == 1) {
    *steps = "1";
    return 0.25 / Sl;
  }
  *steps = "1,2";
  const double theta = p.theta[family - 1][l - 1];
  const double via = std::ldexp(0.5, -(l - 1)) * (1.0 - (l - 1) * a_other) / (1.0 - (l - 2) * a_other) *
                     (1.0 - l * a_own) / (1.0 - (l - 1) * a_own) / (theta * Sl);
  return std::max(direct, via);
}

}  // namespace

T2ConcCertificate concentrability_certificate_t2(const T2Params& p, std::uint64_t seed, int instances_per_family) {
  T2ConcCertificate cert;
  cert.bound = 32.0 * p.L;
  const auto mu = mu_theorem2(p);
  std::vector<std::string> order = {"start", "W", "X", "Y", "Z"};
  for (int l = 1; l <= p.L; ++l) {
    order.push_back("I^" + std::to_string(l));
    order.push_back("Ibar^" + std::to_string(l));
  }
  int stream = 0;
  for (int family = 1; family <= 2; ++family) {
    std::vector<ConcClassRow> rows(order.size());
    for (std::size_t c = 0; c < order.size(); ++c) {
      rows[c].cls = order[c];
      rows[c].family = family;
      rows[c].case_ratio = 0.0;
    }
    for (int k = 0; k < instances_per_family; ++k) {
      Rng rng = make_stream(seed, stream++);
      const T2Instance inst = sample_t2_instance(p, family, rng);
      const TabularMdp mdp = build_t2(p, inst);
      const ConcentrabilityReport rep = concentrability(mdp, mu);
      ++cert.instances;
      if (cert.binding_state < 0 || rep.value > cert.coefficient) {
        cert.coefficient = rep.value;
        cert.binding_family = family;
        cert.binding_state = rep.arg_state;
        cert.binding_action = rep.arg_action;
        cert.binding_step = rep.arg_step;
        cert.binding_class = t2_state_class(p, inst, rep.arg_state);
      }
      for (std::int64_t s = 0; s < p.S; ++s) {
        const std::string cls = t2_state_class(p, inst, s);
        const auto idx = std::find(order.begin(), order.end(), cls) - order.begin();
        auto& row = rows[idx];
        const double m = std::min(mu.mass(s, 0), mu.mass(s, 1));
        std::string steps;
        row.case_ratio = case_reach(p, family, cls, &steps) / m;
        row.case_steps = steps;
        for (int h = 0; h <= rep.horizon; ++h) {
          const double r = rep.reach[h][s] / m;
          if (r > row.exact_ratio) {
            row.exact_ratio = r;
            row.exact_step = h;
            row.exact_state = s;
          }
        }
      }
    }
    for (auto& row : rows) {
      row.exceeds_case = row.exact_ratio > row.case_ratio * (1.0 + 1e-12);
      cert.classes.push_back(row);
    }
  }
  cert.within_bound = cert.coefficient <= cert.bound * (1.0 + 1e-12);
  return cert;
}

}  // namespace olab
