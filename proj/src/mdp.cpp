// SPDX-License-Identifier: Apache-2.0

#include "offlinelab/mdp.hpp"
#include "offlinelab/numeric.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <numeric>
#include <unordered_map>

namespace olab {

namespace {

constexpr double kRowTol = 1e-12;
// Dense LU is used for components up to this size; larger ones go sparse.
constexpr std::int64_t kDenseBlockLimit = 1500;

}  // namespace

bool is_terminal(StateRole role) {
  return role == StateRole::kTerminalW || role == StateRole::kTerminalX ||
         role == StateRole::kTerminalY || role == StateRole::kTerminalZ;
}

std::string role_name(StateRole role) {
  switch (role) {
    case StateRole::kInitial: return "initial";
    case StateRole::kIntermediate: return "intermediate";
    case StateRole::kTerminalW: return "W";
    case StateRole::kTerminalX: return "X";
    case StateRole::kTerminalY: return "Y";
    case StateRole::kTerminalZ: return "Z";
    case StateRole::kDummy: return "dummy";
    case StateRole::kGeneric: return "generic";
  }
  return "generic";
}

std::string reward_tag_name(RewardTag tag) {
  switch (tag) {
    case RewardTag::kZero: return "zero";
    case RewardTag::kW: return "w";
    case RewardTag::kOne: return "one";
    case RewardTag::kZFamily1: return "z1";
    case RewardTag::kZFamily2: return "z2";
    case RewardTag::kGeneric: return "generic";
  }
  return "generic";
}

RewardTag reward_tag_from_name(const std::string& name) {
  if (name == "zero") return RewardTag::kZero;
  if (name == "w") return RewardTag::kW;
  if (name == "one") return RewardTag::kOne;
  if (name == "z1") return RewardTag::kZFamily1;
  if (name == "z2") return RewardTag::kZFamily2;
  if (name == "generic") return RewardTag::kGeneric;
  throw ValidationError("unknown reward tag '" + name + "'");
}

std::vector<std::string> TabularMdp::check_invariants() const {
  std::vector<std::string> out;
  auto flag = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  const std::int64_t S = num_states();
  if (!(gamma_ > 0.0 && gamma_ < 1.0)) flag("discount");
  if (offsets_.size() != static_cast<std::size_t>(2 * S + 1)) {
    flag("row_count");
    return out;
  }
  for (std::int64_t s = 0; s < S; ++s) {
    for (int a = 0; a < kNumActions; ++a) {
      KahanSum sum;  // wide rows (uniform over ~10^5 targets) need compensation
      double self = 0.0;
      for (const Transition& t : row(s, a)) {
        if (t.next < 0 || t.next >= S) {
          flag("next_state_range");
          continue;
        }
        if (!(t.prob >= 0.0 && t.prob <= 1.0)) flag("probability_range");
        sum.add(t.prob);
        if (t.next == s) self += t.prob;
      }
      if (std::abs(sum.value() - 1.0) > kRowTol) flag("row_sums");
      const double r = reward(s, a);
      if (!(r >= 0.0 && r <= 1.0)) flag("reward_range");
      if (is_terminal(role(s)) && std::abs(self - 1.0) > kRowTol) flag("terminal_self_loop");
    }
  }
  double d0sum = 0.0;
  for (double p : d0_) {
    if (!(p >= 0.0)) flag("initial_dist");
    d0sum += p;
  }
  if (static_cast<std::int64_t>(d0_.size()) != S || std::abs(d0sum - 1.0) > kRowTol) {
    flag("initial_dist");
  }
  return out;
}

void TabularMdp::validate() const {
  const auto bad = check_invariants();
  if (bad.empty()) return;
  std::string msg = "mdp invariant violated:";
  for (const auto& b : bad) msg += " " + b;
  throw InvariantError(msg);
}

MdpBuilder::MdpBuilder(std::int64_t num_states, double gamma) {
  if (num_states <= 0) throw ValidationError("num_states must be positive");
  if (num_states > std::numeric_limits<std::int32_t>::max()) {
    throw ValidationError("num_states exceeds 32-bit index range");
  }
  m_.gamma_ = gamma;
  m_.roles_.assign(num_states, StateRole::kGeneric);
  m_.layers_.assign(num_states, 0);
  m_.offsets_.reserve(2 * num_states + 1);
  m_.offsets_.push_back(0);
  m_.rewards_.reserve(2 * num_states);
  m_.tags_.reserve(2 * num_states);
}

void MdpBuilder::set_state(std::int64_t s, StateRole role, int layer) {
  m_.roles_.at(s) = role;
  m_.layers_.at(s) = layer;
}

void MdpBuilder::add_row(std::span<const Transition> row, double reward, RewardTag tag) {
  if (rows_added_ >= 2 * m_.num_states()) throw InvariantError("too many rows");
  m_.entries_.insert(m_.entries_.end(), row.begin(), row.end());
  m_.offsets_.push_back(m_.entries_.size());
  m_.rewards_.push_back(reward);
  m_.tags_.push_back(tag);
  ++rows_added_;
}

void MdpBuilder::add_state_rows(std::span<const Transition> row, double reward, RewardTag tag) {
  add_row(row, reward, tag);
  add_row(row, reward, tag);
}

void MdpBuilder::set_initial(std::vector<double> d0) { m_.d0_ = std::move(d0); }

TabularMdp MdpBuilder::build() {
  TabularMdp out = build_unchecked();
  out.validate();
  return out;
}

TabularMdp MdpBuilder::build_unchecked() {
  if (rows_added_ != 2 * m_.num_states()) throw InvariantError("missing rows");
  if (m_.d0_.empty()) {
    m_.d0_.assign(m_.num_states(), 0.0);
    m_.d0_[0] = 1.0;
  }
  m_.entries_.shrink_to_fit();
  return std::move(m_);
}

// ---------------------------------------------------------------------------
// Policies

Policy Policy::deterministic(const std::vector<int>& actions) {
  Policy p;
  p.kind = PolicyKind::kDeterministic;
  p.num_states = static_cast<std::int64_t>(actions.size());
  p.probs.assign(2 * actions.size(), 0.0);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] < 0 || actions[s] >= kNumActions) throw ValidationError("bad action");
    p.probs[2 * s + actions[s]] = 1.0;
  }
  return p;
}

Policy Policy::stochastic(std::int64_t num_states, std::vector<double> probs) {
  Policy p;
  p.kind = PolicyKind::kStochastic;
  p.num_states = num_states;
  p.probs = std::move(probs);
  validate_policy(p);
  return p;
}

Policy Policy::non_stationary(std::int64_t num_states, int horizon, std::vector<double> probs) {
  Policy p;
  p.kind = PolicyKind::kNonStationary;
  p.num_states = num_states;
  p.horizon = horizon;
  p.probs = std::move(probs);
  validate_policy(p);
  return p;
}

Policy Policy::uniform(std::int64_t num_states) {
  return stochastic(num_states, std::vector<double>(2 * num_states, 0.5));
}

void validate_policy(const Policy& pi) {
  const int steps = pi.stationary() ? 1 : pi.horizon;
  if (steps < 1) throw ValidationError("policy horizon must be positive");
  if (pi.probs.size() != static_cast<std::size_t>(steps) * pi.num_states * 2) {
    throw ValidationError("policy table has wrong size");
  }
  for (std::size_t i = 0; i < pi.probs.size(); i += 2) {
    const double p0 = pi.probs[i], p1 = pi.probs[i + 1];
    if (p0 < 0.0 || p1 < 0.0 || std::abs(p0 + p1 - 1.0) > kRowTol) {
      throw ValidationError("policy action probabilities must sum to 1");
    }
  }
}

double DataDistribution::total() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0);
}

// ---------------------------------------------------------------------------
// Policy evaluation

namespace {

void require_match(const TabularMdp& mdp, const Policy& pi) {
  if (pi.num_states != mdp.num_states()) throw ValidationError("policy/mdp size mismatch");
  if (!pi.stationary()) {
    throw ValidationError("exact evaluation needs a stationary policy; use rollout_value");
  }
}

// Tarjan's algorithm without recursion. Components are emitted sinks
// first, which is exactly the order back-substitution needs.
class SccSolver {
 public:
  SccSolver(const TabularMdp& mdp, const Policy& pi) : mdp_(mdp), pi_(pi) {
    const std::int64_t S = mdp.num_states();
    index_.assign(S, -1);
    low_.assign(S, 0);
    on_stack_.assign(S, 0);
    v_.assign(S, 0.0);
  }

  std::vector<double> solve() {
    const std::int64_t S = mdp_.num_states();
    for (std::int64_t s = 0; s < S; ++s) {
      if (index_[s] < 0) visit(static_cast<std::int32_t>(s));
    }
    return std::move(v_);
  }

 private:
  struct Frame {
    std::int32_t v;
    int action;
    std::size_t pos;
  };

  // Next successor of frame f, or -1 when exhausted.
  std::int32_t next_succ(Frame& f) {
    while (f.action < kNumActions) {
      if (pi_.prob(f.v, f.action) > 0.0) {
        auto r = mdp_.row(f.v, f.action);
        while (f.pos < r.size()) {
          const Transition& t = r[f.pos++];
          if (t.prob > 0.0) return t.next;
        }
      }
      ++f.action;
      f.pos = 0;
    }
    return -1;
  }

  void visit(std::int32_t root) {
    std::vector<Frame> call;
    auto open = [&](std::int32_t v) {
      index_[v] = low_[v] = counter_++;
      stack_.push_back(v);
      on_stack_[v] = 1;
      call.push_back({v, 0, 0});
    };
    open(root);
    while (!call.empty()) {
      Frame& f = call.back();
      const std::int32_t w = next_succ(f);
      if (w >= 0) {
        if (index_[w] < 0) {
          open(w);
        } else if (on_stack_[w]) {
          low_[f.v] = std::min(low_[f.v], index_[w]);
        }
        continue;
      }
      const std::int32_t v = f.v;
      call.pop_back();
      if (!call.empty()) low_[call.back().v] = std::min(low_[call.back().v], low_[v]);
      if (low_[v] == index_[v]) {
        std::vector<std::int32_t> comp;
        std::int32_t x;
        do {
          x = stack_.back();
          stack_.pop_back();
          on_stack_[x] = 0;
          comp.push_back(x);
        } while (x != v);
        solve_component(comp);
      }
    }
  }

  void solve_component(const std::vector<std::int32_t>& comp) {
    const double g = mdp_.discount();
    if (comp.size() == 1) {
      const std::int32_t s = comp[0];
      double diag = 1.0, rhs = 0.0;
      for (int a = 0; a < kNumActions; ++a) {
        const double pa = pi_.prob(s, a);
        if (pa <= 0.0) continue;
        rhs += pa * mdp_.reward(s, a);
        for (const Transition& t : mdp_.row(s, a)) {
          if (t.next == s) {
            diag -= g * pa * t.prob;
          } else {
            rhs += g * pa * t.prob * v_[t.next];
          }
        }
      }
      v_[s] = rhs / diag;
      return;
    }
    const std::int64_t m = static_cast<std::int64_t>(comp.size());
    for (std::int64_t i = 0; i < m; ++i) local_[comp[i]] = i;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::int64_t i = 0; i < m; ++i) {
      const std::int32_t s = comp[i];
      trip.emplace_back(i, i, 1.0);
      for (int a = 0; a < kNumActions; ++a) {
        const double pa = pi_.prob(s, a);
        if (pa <= 0.0) continue;
        b[i] += pa * mdp_.reward(s, a);
        for (const Transition& t : mdp_.row(s, a)) {
          auto it = local_.find(t.next);
          if (it != local_.end()) {
            trip.emplace_back(i, it->second, -g * pa * t.prob);
          } else {
            b[i] += g * pa * t.prob * v_[t.next];
          }
        }
      }
    }
    Eigen::VectorXd x;
    if (m <= kDenseBlockLimit) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
      for (const auto& t : trip) A(t.row(), t.col()) += t.value();
      x = A.partialPivLu().solve(b);
    } else {
      Eigen::SparseMatrix<double> A(m, m);
      A.setFromTriplets(trip.begin(), trip.end());
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(A);
      if (lu.info() != Eigen::Success) throw InvariantError("singular evaluation system");
      x = lu.solve(b);
    }
    for (std::int64_t i = 0; i < m; ++i) v_[comp[i]] = x[i];
    local_.clear();
  }

  const TabularMdp& mdp_;
  const Policy& pi_;
  std::vector<std::int32_t> index_, low_;
  std::vector<char> on_stack_;
  std::vector<std::int32_t> stack_;
  std::int32_t counter_ = 0;
  std::vector<double> v_;
  std::unordered_map<std::int32_t, std::int64_t> local_;
};

QTable q_from_v(const TabularMdp& mdp, const std::vector<double>& v) {
  const std::int64_t S = mdp.num_states();
  QTable q(2 * S);
  const double g = mdp.discount();
  for (std::int64_t s = 0; s < S; ++s) {
    for (int a = 0; a < kNumActions; ++a) {
      double acc = 0.0;
      for (const Transition& t : mdp.row(s, a)) acc += t.prob * v[t.next];
      q[2 * s + a] = mdp.reward(s, a) + g * acc;
    }
  }
  return q;
}

std::vector<double> v_under(const QTable& q, const Policy& pi, std::int64_t S) {
  std::vector<double> v(S);
  for (std::int64_t s = 0; s < S; ++s) v[s] = pi.prob(s, 0) * q[2 * s] + pi.prob(s, 1) * q[2 * s + 1];
  return v;
}

std::vector<double> v_greedy(const QTable& q, std::int64_t S) {
  std::vector<double> v(S);
  for (std::int64_t s = 0; s < S; ++s) v[s] = std::max(q[2 * s], q[2 * s + 1]);
  return v;
}

}  // namespace

std::vector<double> exact_v(const TabularMdp& mdp, const Policy& pi) {
  require_match(mdp, pi);
  if (!(mdp.discount() < 1.0)) throw InvariantError("singular evaluation system: gamma >= 1");
  SccSolver solver(mdp, pi);
  return solver.solve();
}

QTable exact_q(const TabularMdp& mdp, const Policy& pi) {
  return q_from_v(mdp, exact_v(mdp, pi));
}

QTable iterative_q(const TabularMdp& mdp, const Policy& pi, double tol, int max_iter) {
  require_match(mdp, pi);
  const std::int64_t S = mdp.num_states();
  QTable q(2 * S, 0.0);
  for (int it = 0; it < max_iter; ++it) {
    QTable next = q_from_v(mdp, v_under(q, pi, S));
    double diff = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) diff = std::max(diff, std::abs(next[i] - q[i]));
    q.swap(next);
    if (diff < tol) break;
  }
  return q;
}

QTable value_iteration(const TabularMdp& mdp, double tol, int max_iter) {
  const std::int64_t S = mdp.num_states();
  QTable q(2 * S, 0.0);
  for (int it = 0; it < max_iter; ++it) {
    QTable next = q_from_v(mdp, v_greedy(q, S));
    double diff = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) diff = std::max(diff, std::abs(next[i] - q[i]));
    q.swap(next);
    if (diff < tol) break;
  }
  return q;
}

int greedy_action(const QTable& q, std::int64_t s) {
  const double q0 = q[2 * s], q1 = q[2 * s + 1];
  const double slack = 1e-12 * std::max(1.0, std::abs(q0));
  return q1 > q0 + slack ? 1 : 0;
}

OptimalResult optimal_policy(const TabularMdp& mdp) {
  const std::int64_t S = mdp.num_states();
  std::vector<int> actions(S, 0);
  OptimalResult out;
  for (int it = 1;; ++it) {
    Policy pi = Policy::deterministic(actions);
    QTable q = exact_q(mdp, pi);
    bool changed = false;
    for (std::int64_t s = 0; s < S; ++s) {
      const int best = greedy_action(q, s);
      // Only switch on strict improvement over the current action.
      const double cur = q[2 * s + actions[s]];
      const double slack = 1e-12 * std::max(1.0, std::abs(cur));
      if (best != actions[s] && q[2 * s + best] > cur + slack) {
        actions[s] = best;
        changed = true;
      }
    }
    if (!changed || it > 4 * S + 10) {
      for (std::int64_t s = 0; s < S; ++s) actions[s] = greedy_action(q, s);
      out.policy = Policy::deterministic(actions);
      out.q = std::move(q);
      out.iterations = it;
      return out;
    }
  }
}

double evaluation_residual(const TabularMdp& mdp, const Policy& pi, const QTable& q) {
  const QTable back = q_from_v(mdp, v_under(q, pi, mdp.num_states()));
  double r = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) r = std::max(r, std::abs(back[i] - q[i]));
  return r;
}

double optimality_residual(const TabularMdp& mdp, const QTable& q) {
  const QTable back = bellman_backup(q, mdp);
  double r = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) r = std::max(r, std::abs(back[i] - q[i]));
  return r;
}

QTable bellman_backup(const QTable& f, const TabularMdp& mdp) {
  if (f.size() != static_cast<std::size_t>(2 * mdp.num_states())) {
    throw ValidationError("f table size mismatch");
  }
  return q_from_v(mdp, v_greedy(f, mdp.num_states()));
}

double expected_return(const TabularMdp& mdp, const Policy& pi) {
  const std::vector<double> v = exact_v(mdp, pi);
  double j = 0.0;
  const auto& d0 = mdp.initial_dist();
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (d0[s] != 0.0) j += d0[s] * v[s];
  }
  return j;
}

OccupancyMeasure occupancy_at_step(const TabularMdp& mdp, const Policy& pi, int h) {
  if (h < 0) throw ValidationError("step must be nonnegative");
  if (pi.num_states != mdp.num_states()) throw ValidationError("policy/mdp size mismatch");
  const std::int64_t S = mdp.num_states();
  std::vector<double> d = mdp.initial_dist();
  for (int k = 0; k < h; ++k) {
    std::vector<double> next(S, 0.0);
    for (std::int64_t s = 0; s < S; ++s) {
      if (d[s] == 0.0) continue;
      for (int a = 0; a < kNumActions; ++a) {
        const double w = d[s] * pi.prob(s, a, k);
        if (w == 0.0) continue;
        for (const Transition& t : mdp.row(s, a)) next[t.next] += w * t.prob;
      }
    }
    d.swap(next);
  }
  OccupancyMeasure occ;
  occ.step = h;
  occ.probs.assign(2 * S, 0.0);
  for (std::int64_t s = 0; s < S; ++s) {
    for (int a = 0; a < kNumActions; ++a) occ.probs[2 * s + a] = d[s] * pi.prob(s, a, h);
  }
  return occ;
}

double rollout_value(const TabularMdp& mdp, const Policy& pi, int horizon) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  if (pi.num_states != mdp.num_states()) throw ValidationError("policy/mdp size mismatch");
  const std::int64_t S = mdp.num_states();
  std::vector<double> d = mdp.initial_dist();
  double total = 0.0, disc = 1.0;
  for (int h = 0; h < horizon; ++h) {
    std::vector<double> next(S, 0.0);
    double step_reward = 0.0;
    for (std::int64_t s = 0; s < S; ++s) {
      if (d[s] == 0.0) continue;
      for (int a = 0; a < kNumActions; ++a) {
        const double w = d[s] * pi.prob(s, a, h);
        if (w == 0.0) continue;
        step_reward += w * mdp.reward(s, a);
        for (const Transition& t : mdp.row(s, a)) next[t.next] += w * t.prob;
      }
    }
    total += disc * step_reward;
    disc *= mdp.discount();
    d.swap(next);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Concentrability

std::vector<std::vector<double>> max_reach_table(const TabularMdp& mdp, int horizon) {
  const std::int64_t S = mdp.num_states();
  // Reverse adjacency: for each state, the rows (2*x + a) that can enter it.
  std::vector<std::size_t> pred_off(S + 1, 0);
  for (std::int64_t x = 0; x < S; ++x) {
    for (int a = 0; a < kNumActions; ++a) {
      for (const Transition& t : mdp.row(x, a)) {
        if (t.prob > 0.0) ++pred_off[t.next + 1];
      }
    }
  }
  for (std::int64_t s = 0; s < S; ++s) pred_off[s + 1] += pred_off[s];
  std::vector<std::int32_t> pred(pred_off[S]);
  {
    std::vector<std::size_t> fill(pred_off.begin(), pred_off.end() - 1);
    for (std::int64_t x = 0; x < S; ++x) {
      for (int a = 0; a < kNumActions; ++a) {
        for (const Transition& t : mdp.row(x, a)) {
          if (t.prob > 0.0) pred[fill[t.next]++] = static_cast<std::int32_t>(x);
        }
      }
    }
  }

  const auto& d0 = mdp.initial_dist();
  std::vector<std::vector<double>> reach(horizon + 1, std::vector<double>(S, 0.0));
  std::vector<double> prev(S, 0.0), cur(S, 0.0);
  std::vector<char> mark(S, 0);
  std::vector<std::int32_t> support, next_support;

  for (std::int64_t target = 0; target < S; ++target) {
    // prev[x] = max over policies of Pr[reach target exactly k steps after x].
    for (std::int32_t x : support) prev[x] = 0.0;
    support.assign(1, static_cast<std::int32_t>(target));
    prev[target] = 1.0;
    reach[0][target] = d0[target];
    for (int k = 1; k <= horizon && !support.empty(); ++k) {
      next_support.clear();
      for (std::int32_t y : support) {
        for (std::size_t i = pred_off[y]; i < pred_off[y + 1]; ++i) {
          const std::int32_t x = pred[i];
          if (!mark[x]) {
            mark[x] = 1;
            next_support.push_back(x);
          }
        }
      }
      double acc = 0.0;
      std::size_t kept = 0;
      for (std::int32_t x : next_support) {
        mark[x] = 0;
        double best = 0.0;
        for (int a = 0; a < kNumActions; ++a) {
          double v = 0.0;
          for (const Transition& t : mdp.row(x, a)) v += t.prob * prev[t.next];
          best = std::max(best, v);
        }
        if (best > 0.0) {
          cur[x] = best;
          next_support[kept++] = x;
          acc += d0[x] * best;
        }
      }
      next_support.resize(kept);
      reach[k][target] = acc;
      for (std::int32_t x : support) prev[x] = 0.0;
      for (std::int32_t x : next_support) {
        prev[x] = cur[x];
        cur[x] = 0.0;
      }
      support.swap(next_support);
    }
  }
  for (std::int32_t x : support) prev[x] = 0.0;
  return reach;
}

ConcentrabilityReport concentrability(const TabularMdp& mdp, const DataDistribution& mu) {
  const std::int64_t S = mdp.num_states();
  if (mu.probs.size() != static_cast<std::size_t>(2 * S)) {
    throw ValidationError("data distribution size mismatch");
  }
  const int cap = static_cast<int>(std::min<std::int64_t>(S + 2, 1 << 20));
  ConcentrabilityReport rep;
  int horizon = std::min(8, cap);
  for (;;) {
    auto reach = max_reach_table(mdp, horizon);
    int stop = -1;
    for (int h = 1; h <= horizon && stop < 0; ++h) {
      double diff = 0.0;
      for (std::int64_t s = 0; s < S; ++s) diff = std::max(diff, std::abs(reach[h][s] - reach[h - 1][s]));
      if (diff <= 1e-15) stop = h;
    }
    if (stop >= 0 || horizon >= cap) {
      rep.fixpoint = stop >= 0;
      rep.horizon = stop >= 0 ? stop : horizon;
      reach.resize(rep.horizon + 1);
      rep.reach = std::move(reach);
      break;
    }
    horizon = std::min(cap, 2 * horizon);
  }
  for (int h = 0; h <= rep.horizon; ++h) {
    for (std::int64_t s = 0; s < S; ++s) {
      const double r = rep.reach[h][s];
      if (r <= 0.0) continue;
      for (int a = 0; a < kNumActions; ++a) {
        const double m = mu.mass(s, a);
        if (m <= 0.0) {
          if (!rep.infinite) {
            rep.infinite = true;
            rep.value = std::numeric_limits<double>::infinity();
            rep.arg_state = s;
            rep.arg_action = a;
            rep.arg_step = h;
          }
          continue;
        }
        if (!rep.infinite && r / m > rep.value) {
          rep.value = r / m;
          rep.arg_state = s;
          rep.arg_action = a;
          rep.arg_step = h;
        }
      }
    }
  }
  return rep;
}

}  // namespace olab
