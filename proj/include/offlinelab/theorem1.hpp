// SPDX-License-Identifier: Apache-2.0
//
// Single-layer planted-subset family. State layout: 0 is the start state,
// 1..S1 the intermediate states, then W, X, Y, Z.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "offlinelab/mdp.hpp"
#include "offlinelab/rng.hpp"

namespace olab {

struct T1Params {
  double theta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::int64_t planted_count = 0;  // theta * S1
};

// (theta1, alpha1, beta1, theta2, alpha2, beta2, w) for the general scheme.
struct SchemeTuple {
  double theta1, alpha1, beta1, theta2, alpha2, beta2, w;
};

struct T1FamilySpec {
  std::int64_t S = 0;
  std::int64_t S1 = 0;
  std::int64_t requested_S = 0;  // before rounding up
  double gamma = 0.0;
  double w = 0.0;
  std::array<T1Params, 2> params{};

  const T1Params& family(int i) const { return params.at(i - 1); }

  std::int64_t start() const { return 0; }
  std::int64_t intermediate(std::int64_t idx) const { return 1 + idx; }
  std::int64_t W() const { return S1 + 1; }
  std::int64_t X() const { return S1 + 2; }
  std::int64_t Y() const { return S1 + 3; }
  std::int64_t Z() const { return S1 + 4; }
};

// Standard parameters; S is rounded up so that S - 5 is a multiple of 4.
T1FamilySpec make_t1_spec(std::int64_t S, double gamma);
// Arbitrary scheme; throws ValidationError listing violated constraints or
// when theta_i * S1 is not an integer.
T1FamilySpec make_t1_spec(std::int64_t S, double gamma, const SchemeTuple& tuple);

// Constraint names: "marginal", "marginal_complement", "interior",
// "different", "reward_range".
std::vector<std::string> validate_scheme(const SchemeTuple& tuple, double gamma);
SchemeTuple standard_scheme(double gamma);

struct PlantedInstance {
  int family = 1;
  std::vector<std::int64_t> planted;  // sorted, 0-based within S1
};

void validate_instance(const T1FamilySpec& spec, const PlantedInstance& inst);
PlantedInstance sample_t1_instance(const T1FamilySpec& spec, int family, Rng& rng);

// Uniform k-subset of {0..n-1} by a partial Fisher-Yates shuffle; sorted.
std::vector<std::int64_t> sample_subset(std::int64_t n, std::int64_t k, Rng& rng);

TabularMdp build_t1(const T1FamilySpec& spec, const PlantedInstance& inst);

// The closed-form Q-function shared by every policy on every family-i model.
QTable f_values(const T1FamilySpec& spec, int family);

DataDistribution mu_theorem1(const T1FamilySpec& spec);

// Averaged dynamics with the Z reward set to 0; used as the chi-square pivot.
TabularMdp reference_mdp_t1(const T1FamilySpec& spec);

struct DilutedInstance {
  TabularMdp mdp;  // extra dummy state appended at index S
  DataDistribution mu;
};
DilutedInstance dilute(const T1FamilySpec& spec, const PlantedInstance& inst, double eps);

// phi(s,a) = (f1(s,a), f2(s,a)).
std::vector<std::array<double, 2>> linear_features(const T1FamilySpec& spec);
std::array<double, 4> feature_gram(const T1FamilySpec& spec);  // row-major 2x2

}  // namespace olab
