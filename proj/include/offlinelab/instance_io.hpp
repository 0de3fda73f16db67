// SPDX-License-Identifier: Apache-2.0
//
// Instance files, dataset CSV and atomic file output.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "offlinelab/mdp.hpp"
#include "offlinelab/offline.hpp"
#include "offlinelab/theorem1.hpp"
#include "offlinelab/theorem2.hpp"

namespace olab {

using Json = nlohmann::json;

constexpr int kSchemaVersion = 1;

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

Json instance_json(const T1FamilySpec& spec, const PlantedInstance& inst, std::uint64_t seed);
Json instance_json(const T2Params& p, const T2Instance& inst, std::uint64_t seed);

// Hash of the canonical dump, ignoring any embedded "mdp" block.
std::string instance_hash(const Json& doc);

// Full tabular dump, used by `verify` to detect tampered rows.
Json mdp_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const Json& j);  // no invariant check

struct LoadedInstance {
  std::string construction;
  std::optional<T1FamilySpec> t1;
  std::optional<PlantedInstance> t1_instance;
  std::optional<T2Params> t2;
  std::optional<T2Instance> t2_instance;
  std::optional<TabularMdp> stored_mdp;
  std::string hash;
};
LoadedInstance load_instance(const Json& doc);

std::string dataset_csv(const OfflineDataset& d);
OfflineDataset parse_dataset_csv(const std::string& text);

// Writes to a temporary sibling, then renames over the target.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Thrown for filesystem failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace olab
