// Copyright 2026 The VDC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vdc/digest.hpp"
#include "vdc/params.hpp"
#include "vdc/templating.hpp"
#include "vdc/time.hpp"

namespace vdc {

// Every partition binds these two REPRO parameters implicitly.
inline constexpr std::string_view kPartitionIndexParam = "partition_index";
inline constexpr std::string_view kRandomSeedParam = "random_seed";

inline bool is_implicit_param(std::string_view name) {
  return name == kPartitionIndexParam || name == kRandomSeedParam;
}

struct SchemaEntry {
  std::string name;
  ParamDomain domain = ParamDomain::Repro;
  ParamType type = ParamType::Int;
  bool required = false;
  std::optional<ParamValue> default_value;

  friend bool operator==(const SchemaEntry&, const SchemaEntry&) = default;
};

struct ParamSchema {
  std::vector<SchemaEntry> entries;

  const SchemaEntry* find(std::string_view name) const;
  /// Throws InvalidSchema on duplicate or malformed names, required entries
  /// with defaults, optional entries without a well-typed default, or an
  /// implicit partition parameter declared outside REPRO/int.
  void validate() const;

  friend bool operator==(const ParamSchema&, const ParamSchema&) = default;
};

struct VersionRef {
  std::string name;
  std::int64_t version = 1;

  std::string str() const { return name + "@" + std::to_string(version); }
  friend auto operator<=>(const VersionRef&, const VersionRef&) = default;
};

struct InputSlot {
  std::string slot;
  std::string step;  // pipeline step label the slot expects upstream

  friend bool operator==(const InputSlot&, const InputSlot&) = default;
};

/// A versioned, templated recipe for one pipeline step.
struct Transformation {
  std::string name;
  std::int64_t version = 1;
  std::string step;
  ParamSchema schema;
  RecipeTemplate recipe_template;
  std::vector<InputSlot> inputs;
  std::vector<std::string> consumed_internally;
  Digest body_hash;  // filled in on registration

  VersionRef ref() const { return {name, version}; }
};

struct Recipe {
  std::string name;
  ParamDomain domain = ParamDomain::Repro;
  Bindings bindings;
  bool validated = false;
  std::string note;
};

struct Dataset {
  std::string name;
  std::int64_t version = 1;
  VersionRef transformation;
  std::map<ParamDomain, std::string> recipes;  // at most one per domain
  Bindings overrides;
  std::int64_t partitions = 1;
  std::int64_t base_seed = 0;
  std::int64_t seed_stride = 1;
  // slot name -> upstream dataset; partition i consumes upstream partition
  // i mod upstream.partitions.
  std::map<std::string, VersionRef> inputs;

  VersionRef ref() const { return {name, version}; }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class DerivationState { Defined, Claimed, Completed, Failed };

std::string_view to_string(DerivationState s);
DerivationState parse_state(std::string_view s);

struct ClaimInfo {
  std::string ce;
  std::string site;
  Timestamp at;

  friend bool operator==(const ClaimInfo&, const ClaimInfo&) = default;
};

struct Provenance {
  std::string compute_element;
  std::string network_domain;
  std::string country;
  Timestamp started;
  Timestamp finished;
  int exit_status = 0;
  std::uint64_t output_bytes = 0;
  Digest output_digest;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct BoundParams {
  Bindings repro;
  Bindings app;
  Bindings site;

  Bindings& of(ParamDomain d);
  const Bindings& of(ParamDomain d) const;
  /// Union of all three domains; names are disjoint by construction.
  Bindings merged() const;

  friend bool operator==(const BoundParams&, const BoundParams&) = default;
};

struct Derivation {
  ObjectId id;
  std::int64_t seq = 0;  // creation order, FIFO key
  VersionRef dataset;
  VersionRef transformation;
  std::int64_t partition_index = 0;
  BoundParams params;
  std::vector<ObjectId> inputs;  // in declared slot order
  ObjectId output;
  DerivationState state = DerivationState::Defined;
  std::int64_t attempts = 0;
  std::optional<ClaimInfo> claim;
  std::vector<ClaimInfo> claim_history;
  std::optional<Provenance> provenance;
  std::string failure_reason;

  bool claimed_by(std::string_view ce) const;
};

struct Replica {
  ObjectId object;
  std::string site;
  std::string uri;
  Timestamp registered_at;
};

struct NonDeterminismIncident {
  ObjectId derivation;
  std::string ce;
  Digest kept;
  Digest reported;
  Timestamp at;
};

// JSON mirrors of the domain types; these are the wire and journal forms.
void to_json(nlohmann::json& j, const SchemaEntry& e);
void from_json(const nlohmann::json& j, SchemaEntry& e);
void to_json(nlohmann::json& j, const VersionRef& r);
void from_json(const nlohmann::json& j, VersionRef& r);
void to_json(nlohmann::json& j, const Transformation& t);
void from_json(const nlohmann::json& j, Transformation& t);
void to_json(nlohmann::json& j, const Recipe& r);
void from_json(const nlohmann::json& j, Recipe& r);
void to_json(nlohmann::json& j, const Dataset& d);
void from_json(const nlohmann::json& j, Dataset& d);
void to_json(nlohmann::json& j, const ClaimInfo& c);
void from_json(const nlohmann::json& j, ClaimInfo& c);
void to_json(nlohmann::json& j, const Provenance& p);
void from_json(const nlohmann::json& j, Provenance& p);
void to_json(nlohmann::json& j, const BoundParams& p);
void from_json(const nlohmann::json& j, BoundParams& p);
void to_json(nlohmann::json& j, const Derivation& d);
void from_json(const nlohmann::json& j, Derivation& d);
void to_json(nlohmann::json& j, const Replica& r);
void from_json(const nlohmann::json& j, Replica& r);
void to_json(nlohmann::json& j, const NonDeterminismIncident& i);
void from_json(const nlohmann::json& j, NonDeterminismIncident& i);

/// Field access with BadRequest on absence or type mismatch.
const nlohmann::json& require_field(const nlohmann::json& j, std::string_view key);
std::string require_string(const nlohmann::json& j, std::string_view key);
std::int64_t require_int(const nlohmann::json& j, std::string_view key);

}  // namespace vdc
