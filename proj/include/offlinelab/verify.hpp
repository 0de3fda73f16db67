// SPDX-License-Identifier: Apache-2.0
//
// Invariant suite shared by the `build` and `verify` commands.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "offlinelab/instance_io.hpp"

namespace olab {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct VerifyOptions {
  int policies = 20;            // random stochastic policies for realizability
  std::uint64_t seed = 0;
  int cert_instances = 2;       // per family, layered concentrability certificate
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  nlohmann::json extra;  // case tables, scheme verdicts
  bool all_passed() const;
};

VerifyReport verify_instance(const LoadedInstance& inst, const VerifyOptions& opt);

// Random stochastic policy with i.i.d. uniform action probabilities.
Policy random_policy(std::int64_t num_states, Rng& rng);

nlohmann::json to_json(const CheckResult& c);

}  // namespace olab
