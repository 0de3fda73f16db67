// SPDX-License-Identifier: Apache-2.0
//
// Multi-layer planted-subset family with an admissible data distribution.
// State layout: 0 is the start state, then layers 1..L stored
// consecutively, then W, X, Y, Z.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "offlinelab/mdp.hpp"
#include "offlinelab/rng.hpp"

namespace olab {

struct T2Params {
  int L = 0;
  std::int64_t S = 0;
  std::int64_t requested_S = 0;
  std::int64_t L_div = 0;
  std::int64_t K = 0;  // (S - 5) / L_div
  double gamma = 0.0;
  std::array<double, 2> alpha{};  // family 1, family 2
  double w = 0.0;
  std::vector<std::int64_t> layer_size;    // index l-1
  std::vector<std::int64_t> layer_offset;  // first state of layer l
  // theta[i][l-1] and the exact planted counts theta * S_l.
  std::array<std::vector<double>, 2> theta;
  std::array<std::vector<std::int64_t>, 2> planted_count;

  double alpha_of(int family) const { return alpha.at(family - 1); }
  std::int64_t layer_state(int l, std::int64_t idx) const { return layer_offset[l - 1] + idx; }
  std::int64_t W() const { return S - 4; }
  std::int64_t X() const { return S - 3; }
  std::int64_t Y() const { return S - 2; }
  std::int64_t Z() const { return S - 1; }
};

std::int64_t layer_divisor(int L);
// Smallest valid S' >= S (S' - 5 a positive multiple of L_div).
std::int64_t round_up_t2(std::int64_t S, int L);

T2Params make_t2_params(int L, std::int64_t S, double gamma);

// The closed-form expression as displayed for V_alpha, including its
// constant 1/2 term.
double v_alpha(const T2Params& p, double alpha);
// Actual value of the continuation after taking action 2 at the start
// state (in units of 1/(1-gamma), divided by gamma). The direct branch to
// {X, Y} reaches X with probability 1/4, so this is v_alpha - 1/4.
double continuation_value(const T2Params& p, double alpha);

// Probability that a layer-l planted state moves to X.
double planted_x_prob(const T2Params& p, int l, double alpha);
// Probability that a layer-l unplanted state moves on to the next layer.
double advance_prob(int l, double alpha);

struct T2Instance {
  int family = 1;
  std::vector<std::vector<std::int64_t>> planted;  // per layer, sorted, 0-based within layer
};

void validate_instance(const T2Params& p, const T2Instance& inst);
T2Instance sample_t2_instance(const T2Params& p, int family, Rng& rng);

TabularMdp build_t2(const T2Params& p, const T2Instance& inst);
QTable f_values_t2(const T2Params& p, int family);
DataDistribution mu_theorem2(const T2Params& p);

// Averaged dynamics (identical across families) with reward function of
// the given family.
TabularMdp reference_mdp_t2(const T2Params& p, int family);

struct ConcClassRow {
  std::string cls;        // "start", "W", "X", "Y", "Z", "I^l", "Ibar^l"
  int family = 1;
  double exact_ratio = 0.0;   // max over states in class and steps
  int exact_step = -1;        // step attaining it
  std::int64_t exact_state = -1;
  double case_ratio = 0.0;    // case-table reach bound divided by mu
  std::string case_steps;     // steps named by the case table
  bool exceeds_case = false;  // exact ratio above the case-table bound
};

struct T2ConcCertificate {
  double coefficient = 0.0;  // max over the sampled instances
  double bound = 0.0;        // 32 L
  bool within_bound = false;
  int binding_family = 0;
  std::int64_t binding_state = -1;
  int binding_action = -1;
  int binding_step = -1;
  std::string binding_class;
  int instances = 0;
  std::vector<ConcClassRow> classes;
};

T2ConcCertificate concentrability_certificate_t2(const T2Params& p, std::uint64_t seed,
                                                 int instances_per_family = 2);

std::string t2_state_class(const T2Params& p, const T2Instance& inst, std::int64_t s);

}  // namespace olab
