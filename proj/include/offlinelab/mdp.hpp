// SPDX-License-Identifier: Apache-2.0
//
// Exact tabular MDP machinery: storage, policy evaluation, optimal
// policies, per-step occupancy and concentrability.

#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace olab {

constexpr int kNumActions = 2;

// Thrown when a structural invariant of an MDP or construction is broken.
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for bad user-facing parameters (sizes, probabilities, flags).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

enum class StateRole : std::uint8_t {
  kInitial,
  kIntermediate,
  kTerminalW,
  kTerminalX,
  kTerminalY,
  kTerminalZ,
  kDummy,
  kGeneric,
};

bool is_terminal(StateRole role);
std::string role_name(StateRole role);

// Identifies which exact reward expression produced a reward value, so
// that likelihood code can compare rewards without touching floats.
enum class RewardTag : std::uint8_t {
  kZero,
  kW,
  kOne,
  kZFamily1,
  kZFamily2,
  kGeneric,
};

std::string reward_tag_name(RewardTag tag);
RewardTag reward_tag_from_name(const std::string& name);

struct Transition {
  std::int32_t next;
  double prob;
};

// Immutable finite MDP with two actions. Rows are stored in CSR form,
// row index = 2 * state + action.
class TabularMdp {
 public:
  TabularMdp() = default;

  std::int64_t num_states() const { return static_cast<std::int64_t>(roles_.size()); }
  double discount() const { return gamma_; }

  std::span<const Transition> row(std::int64_t s, int a) const {
    const std::size_t r = static_cast<std::size_t>(2 * s + a);
    return {entries_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }
  double reward(std::int64_t s, int a) const { return rewards_[2 * s + a]; }
  RewardTag reward_tag(std::int64_t s, int a) const { return tags_[2 * s + a]; }
  StateRole role(std::int64_t s) const { return roles_[s]; }
  int layer(std::int64_t s) const { return layers_[s]; }
  const std::vector<double>& initial_dist() const { return d0_; }
  std::size_t num_entries() const { return entries_.size(); }

  // Names of every broken invariant; empty when the MDP is valid.
  std::vector<std::string> check_invariants() const;
  void validate() const;

 private:
  friend class MdpBuilder;

  double gamma_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<Transition> entries_;
  std::vector<double> rewards_;
  std::vector<RewardTag> tags_;
  std::vector<StateRole> roles_;
  std::vector<int> layers_;
  std::vector<double> d0_;
};

// Rows must be added in order: state 0 action 0, state 0 action 1, ...
class MdpBuilder {
 public:
  MdpBuilder(std::int64_t num_states, double gamma);

  void set_state(std::int64_t s, StateRole role, int layer = 0);
  void add_row(std::span<const Transition> row, double reward, RewardTag tag);
  void add_row(std::initializer_list<Transition> row, double reward, RewardTag tag) {
    add_row(std::span<const Transition>(row.begin(), row.size()), reward, tag);
  }
  // Same row for both actions.
  void add_state_rows(std::span<const Transition> row, double reward, RewardTag tag);
  void set_initial(std::vector<double> d0);

  TabularMdp build();            // validates
  TabularMdp build_unchecked();  // for fault-injection paths

 private:
  TabularMdp m_;
  std::int64_t rows_added_ = 0;
};

enum class PolicyKind { kDeterministic, kStochastic, kNonStationary };

// Action probabilities per state (per step for non-stationary policies).
// Layout: probs[(h * S + s) * 2 + a].
struct Policy {
  PolicyKind kind = PolicyKind::kStochastic;
  std::int64_t num_states = 0;
  int horizon = 1;
  std::vector<double> probs;

  double prob(std::int64_t s, int a, int h = 0) const {
    const int step = (kind == PolicyKind::kNonStationary) ? std::min(h, horizon - 1) : 0;
    return probs[(static_cast<std::size_t>(step) * num_states + s) * 2 + a];
  }
  bool stationary() const { return kind != PolicyKind::kNonStationary; }
  int action(std::int64_t s) const { return probs[2 * s + 1] > probs[2 * s] ? 1 : 0; }

  static Policy deterministic(const std::vector<int>& actions);
  static Policy stochastic(std::int64_t num_states, std::vector<double> probs);
  static Policy non_stationary(std::int64_t num_states, int horizon, std::vector<double> probs);
  static Policy uniform(std::int64_t num_states);
};

// Checks per-state sums; throws ValidationError.
void validate_policy(const Policy& pi);

// Q or f table over (s,a), index 2*s + a.
using QTable = std::vector<double>;

struct OccupancyMeasure {
  int step = 0;
  std::vector<double> probs;  // index 2*s + a
};

// Distribution over (s,a) pairs with exact probabilities.
struct DataDistribution {
  std::vector<double> probs;  // index 2*s + a
  double mass(std::int64_t s, int a) const { return probs[2 * s + a]; }
  double total() const;
};

// Solves (I - gamma P^pi) V = R^pi by block back-substitution over the
// strongly connected components of the policy graph.
QTable exact_q(const TabularMdp& mdp, const Policy& pi);
std::vector<double> exact_v(const TabularMdp& mdp, const Policy& pi);

// Iterative evaluation, used only to cross-check exact_q.
QTable iterative_q(const TabularMdp& mdp, const Policy& pi, double tol, int max_iter);

// Bellman-optimality value iteration; oracle for optimal_policy.
QTable value_iteration(const TabularMdp& mdp, double tol, int max_iter);

struct OptimalResult {
  Policy policy;
  QTable q;
  int iterations = 0;
};

// Policy iteration with exact evaluation; greedy ties go to action 1
// (index 0).
OptimalResult optimal_policy(const TabularMdp& mdp);

// Greedy action from a Q table with the same tie rule.
int greedy_action(const QTable& q, std::int64_t s);

// max over (s,a) of |Q(s,a) - R(s,a) - gamma E V(s')| for V = Q under pi.
double evaluation_residual(const TabularMdp& mdp, const Policy& pi, const QTable& q);
double optimality_residual(const TabularMdp& mdp, const QTable& q);

// [Tf](s,a) = R(s,a) + gamma E_{s'} max_a' f(s',a').
QTable bellman_backup(const QTable& f, const TabularMdp& mdp);

double expected_return(const TabularMdp& mdp, const Policy& pi);

OccupancyMeasure occupancy_at_step(const TabularMdp& mdp, const Policy& pi, int h);

// Truncated exact evaluation of E[sum_{h<H} gamma^h r_h].
double rollout_value(const TabularMdp& mdp, const Policy& pi, int horizon);

struct ConcentrabilityReport {
  double value = 0.0;  // +inf when a reachable pair has zero mass
  bool infinite = false;
  std::int64_t arg_state = -1;
  int arg_action = -1;
  int arg_step = -1;
  int horizon = 0;          // last step examined
  bool fixpoint = false;    // true when the reach table repeated
  // reach[h][s] = max over policies of Pr[s_h = s], h = 0..horizon.
  std::vector<std::vector<double>> reach;
};

ConcentrabilityReport concentrability(const TabularMdp& mdp, const DataDistribution& mu);

// Maximal reach probabilities for steps 0..horizon.
std::vector<std::vector<double>> max_reach_table(const TabularMdp& mdp, int horizon);

}  // namespace olab
