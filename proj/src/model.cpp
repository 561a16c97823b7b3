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

#include "vdc/model.hpp"

#include <algorithm>
#include <set>

#include "vdc/error.hpp"

namespace vdc {

using nlohmann::json;

const json& require_field(const json& j, std::string_view key) {
  if (!j.is_object()) fail(ErrorKind::BadRequest, "expected a JSON object holding '" + std::string(key) + "'");
  const auto it = j.find(key);
  if (it == j.end()) fail(ErrorKind::BadRequest, "missing field '" + std::string(key) + "'");
  return *it;
}

std::string require_string(const json& j, std::string_view key) {
  const auto& v = require_field(j, key);
  if (!v.is_string()) fail(ErrorKind::BadRequest, "field '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::int64_t require_int(const json& j, std::string_view key) {
  const auto& v = require_field(j, key);
  if (!v.is_number_integer()) fail(ErrorKind::BadRequest, "field '" + std::string(key) + "' must be an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    fail(ErrorKind::BadRequest, "field '" + std::string(key) + "' exceeds signed 64-bit range");
  }
  return v.get<std::int64_t>();
}

namespace {

std::int64_t optional_int(const json& j, std::string_view key, std::int64_t fallback) {
  return j.contains(key) ? require_int(j, key) : fallback;
}

Timestamp require_time(const json& j, std::string_view key) { return parse_rfc3339(require_string(j, key)); }

}  // namespace

const SchemaEntry* ParamSchema::find(std::string_view name) const {
  const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.name == name; });
  return it == entries.end() ? nullptr : &*it;
}

void ParamSchema::validate() const {
  std::set<std::string_view> seen;
  for (const auto& e : entries) {
    if (!is_identifier(e.name)) fail(ErrorKind::InvalidSchema, "invalid parameter name '" + e.name + "'");
    if (!seen.insert(e.name).second) fail(ErrorKind::InvalidSchema, "duplicate parameter '" + e.name + "'");
    if (e.required && e.default_value) {
      fail(ErrorKind::InvalidSchema, "required parameter '" + e.name + "' must not carry a default");
    }
    if (!e.required) {
      if (!e.default_value) fail(ErrorKind::InvalidSchema, "optional parameter '" + e.name + "' needs a default");
      if (!matches_type(*e.default_value, e.type)) {
        fail(ErrorKind::InvalidSchema, "default of '" + e.name + "' does not match type " +
                                           std::string(to_string(e.type)));
      }
    }
    if (is_implicit_param(e.name) && (e.domain != ParamDomain::Repro || e.type != ParamType::Int)) {
      fail(ErrorKind::InvalidSchema, "'" + e.name + "' is bound per partition and must be REPRO int");
    }
  }
}

std::string_view to_string(DerivationState s) {
  switch (s) {
    case DerivationState::Defined:
      return "DEFINED";
    case DerivationState::Claimed:
      return "CLAIMED";
    case DerivationState::Completed:
      return "COMPLETED";
    case DerivationState::Failed:
      return "FAILED";
  }
  return "DEFINED";
}

DerivationState parse_state(std::string_view s) {
  if (s == "DEFINED") return DerivationState::Defined;
  if (s == "CLAIMED") return DerivationState::Claimed;
  if (s == "COMPLETED") return DerivationState::Completed;
  if (s == "FAILED") return DerivationState::Failed;
  fail(ErrorKind::BadRequest, "unknown derivation state '" + std::string(s) + "'");
}

Bindings& BoundParams::of(ParamDomain d) {
  switch (d) {
    case ParamDomain::Repro:
      return repro;
    case ParamDomain::App:
      return app;
    case ParamDomain::Site:
      return site;
  }
  return repro;
}

const Bindings& BoundParams::of(ParamDomain d) const { return const_cast<BoundParams*>(this)->of(d); }

Bindings BoundParams::merged() const {
  Bindings out = repro;
  out.insert(app.begin(), app.end());
  out.insert(site.begin(), site.end());
  return out;
}

bool Derivation::claimed_by(std::string_view ce) const {
  return std::any_of(claim_history.begin(), claim_history.end(), [&](const auto& c) { return c.ce == ce; });
}

void to_json(json& j, const SchemaEntry& e) {
  j = json{{"name", e.name},
           {"domain", to_string(e.domain)},
           {"type", to_string(e.type)},
           {"required", e.required},
           {"default", e.default_value ? value_to_json(*e.default_value) : json(nullptr)}};
}

void from_json(const json& j, SchemaEntry& e) {
  e.name = require_string(j, "name");
  e.domain = parse_domain(require_string(j, "domain"));
  e.type = parse_param_type(require_string(j, "type"));
  e.required = j.value("required", false);
  e.default_value.reset();
  if (j.contains("default") && !j.at("default").is_null()) e.default_value = value_from_json(j.at("default"));
}

void to_json(json& j, const VersionRef& r) { j = json{{"name", r.name}, {"version", r.version}}; }

void from_json(const json& j, VersionRef& r) {
  r.name = require_string(j, "name");
  r.version = require_int(j, "version");
}

void to_json(json& j, const Transformation& t) {
  auto inputs = json::array();
  for (const auto& s : t.inputs) inputs.push_back({{"slot", s.slot}, {"step", s.step}});
  j = json{{"name", t.name},
           {"version", t.version},
           {"step", t.step},
           {"schema", t.schema.entries},
           {"template", t.recipe_template.text()},
           {"inputs", std::move(inputs)},
           {"consumed_internally", t.consumed_internally},
           {"body_hash", t.body_hash.hex()}};
}

void from_json(const json& j, Transformation& t) {
  t.name = require_string(j, "name");
  t.version = optional_int(j, "version", 1);
  t.step = j.contains("step") ? require_string(j, "step") : t.name;
  t.schema.entries.clear();
  if (j.contains("schema")) {
    const auto& schema = j.at("schema");
    if (!schema.is_array()) fail(ErrorKind::BadRequest, "'schema' must be an array");
    for (const auto& e : schema) t.schema.entries.push_back(e.get<SchemaEntry>());
  }
  t.recipe_template = RecipeTemplate::parse(j.contains("template") ? require_string(j, "template") : std::string{});
  t.inputs.clear();
  if (j.contains("inputs")) {
    for (const auto& s : j.at("inputs")) t.inputs.push_back({require_string(s, "slot"), require_string(s, "step")});
  }
  t.consumed_internally = j.value("consumed_internally", std::vector<std::string>{});
  t.body_hash = Digest{};
}

void to_json(json& j, const Recipe& r) {
  j = json{{"name", r.name},
           {"domain", to_string(r.domain)},
           {"bindings", bindings_to_json(r.bindings)},
           {"validated", r.validated},
           {"note", r.note}};
}

void from_json(const json& j, Recipe& r) {
  r.name = require_string(j, "name");
  r.domain = parse_domain(require_string(j, "domain"));
  r.bindings = j.contains("bindings") ? bindings_from_json(j.at("bindings")) : Bindings{};
  r.validated = j.value("validated", false);
  r.note = j.value("note", std::string{});
}

void to_json(json& j, const Dataset& d) {
  auto recipes = json::object();
  for (const auto& [domain, name] : d.recipes) recipes[std::string(to_string(domain))] = name;
  auto inputs = json::object();
  for (const auto& [slot, ref] : d.inputs) inputs[slot] = ref;
  j = json{{"name", d.name},
           {"version", d.version},
           {"transformation", d.transformation},
           {"recipes", std::move(recipes)},
           {"overrides", bindings_to_json(d.overrides)},
           {"partitions", d.partitions},
           {"base_seed", d.base_seed},
           {"seed_stride", d.seed_stride},
           {"inputs", std::move(inputs)}};
}

void from_json(const json& j, Dataset& d) {
  d.name = require_string(j, "name");
  d.version = optional_int(j, "version", 1);
  d.transformation = require_field(j, "transformation").get<VersionRef>();
  d.recipes.clear();
  if (j.contains("recipes")) {
    for (const auto& [domain, name] : j.at("recipes").items()) {
      if (!name.is_string()) fail(ErrorKind::BadRequest, "recipe reference must be a name");
      d.recipes[parse_domain(domain)] = name.get<std::string>();
    }
  }
  d.overrides = j.contains("overrides") ? bindings_from_json(j.at("overrides")) : Bindings{};
  d.partitions = require_int(j, "partitions");
  d.base_seed = optional_int(j, "base_seed", 0);
  d.seed_stride = optional_int(j, "seed_stride", 1);
  d.inputs.clear();
  if (j.contains("inputs")) {
    for (const auto& [slot, ref] : j.at("inputs").items()) d.inputs[slot] = ref.get<VersionRef>();
  }
}

void to_json(json& j, const ClaimInfo& c) {
  j = json{{"ce", c.ce}, {"site", c.site}, {"at", format_rfc3339(c.at)}};
}

void from_json(const json& j, ClaimInfo& c) {
  c.ce = require_string(j, "ce");
  c.site = require_string(j, "site");
  c.at = require_time(j, "at");
}

void to_json(json& j, const Provenance& p) {
  j = json{{"compute_element", p.compute_element},
           {"network_domain", p.network_domain},
           {"country", p.country},
           {"started", format_rfc3339(p.started)},
           {"finished", format_rfc3339(p.finished)},
           {"exit_status", p.exit_status},
           {"output_bytes", p.output_bytes},
           {"output_digest", p.output_digest.hex()}};
}

void from_json(const json& j, Provenance& p) {
  p.compute_element = require_string(j, "compute_element");
  p.network_domain = j.value("network_domain", std::string{});
  p.country = j.value("country", std::string{});
  p.started = require_time(j, "started");
  p.finished = require_time(j, "finished");
  p.exit_status = static_cast<int>(require_int(j, "exit_status"));
  const auto bytes = require_int(j, "output_bytes");
  if (bytes < 0) fail(ErrorKind::BadRequest, "output_bytes must be non-negative");
  p.output_bytes = static_cast<std::uint64_t>(bytes);
  p.output_digest = Digest::from_hex(require_string(j, "output_digest"));
}

void to_json(json& j, const BoundParams& p) {
  j = json{{"REPRO", bindings_to_json(p.repro)}, {"APP", bindings_to_json(p.app)}, {"SITE", bindings_to_json(p.site)}};
}

void from_json(const json& j, BoundParams& p) {
  p.repro = bindings_from_json(require_field(j, "REPRO"));
  p.app = bindings_from_json(require_field(j, "APP"));
  p.site = bindings_from_json(require_field(j, "SITE"));
}

void to_json(json& j, const Derivation& d) {
  j = json{{"id", d.id},
           {"seq", d.seq},
           {"dataset", d.dataset},
           {"transformation", d.transformation},
           {"partition_index", d.partition_index},
           {"params", d.params},
           {"inputs", d.inputs},
           {"output_id", d.output},
           {"state", to_string(d.state)},
           {"attempts", d.attempts},
           {"claim", d.claim ? json(*d.claim) : json(nullptr)},
           {"claim_history", d.claim_history},
           {"provenance", d.provenance ? json(*d.provenance) : json(nullptr)},
           {"failure_reason", d.failure_reason}};
}

void from_json(const json& j, Derivation& d) {
  d.id = require_field(j, "id").get<ObjectId>();
  d.seq = require_int(j, "seq");
  d.dataset = require_field(j, "dataset").get<VersionRef>();
  d.transformation = require_field(j, "transformation").get<VersionRef>();
  d.partition_index = require_int(j, "partition_index");
  d.params = require_field(j, "params").get<BoundParams>();
  d.inputs = require_field(j, "inputs").get<std::vector<ObjectId>>();
  d.output = require_field(j, "output_id").get<ObjectId>();
  d.state = parse_state(require_string(j, "state"));
  d.attempts = require_int(j, "attempts");
  d.claim.reset();
  if (j.contains("claim") && !j.at("claim").is_null()) d.claim = j.at("claim").get<ClaimInfo>();
  d.claim_history = j.value("claim_history", std::vector<ClaimInfo>{});
  d.provenance.reset();
  if (j.contains("provenance") && !j.at("provenance").is_null()) d.provenance = j.at("provenance").get<Provenance>();
  d.failure_reason = j.value("failure_reason", std::string{});
}

void to_json(json& j, const Replica& r) {
  j = json{{"object_id", r.object}, {"site", r.site}, {"uri", r.uri}, {"registered_at", format_rfc3339(r.registered_at)}};
}

void from_json(const json& j, Replica& r) {
  r.object = require_field(j, "object_id").get<ObjectId>();
  r.site = require_string(j, "site");
  r.uri = require_string(j, "uri");
  r.registered_at = j.contains("registered_at") ? require_time(j, "registered_at") : Timestamp{};
}

void to_json(json& j, const NonDeterminismIncident& i) {
  j = json{{"derivation", i.derivation},
           {"ce", i.ce},
           {"kept_digest", i.kept.hex()},
           {"reported_digest", i.reported.hex()},
           {"at", format_rfc3339(i.at)}};
}

void from_json(const json& j, NonDeterminismIncident& i) {
  i.derivation = require_field(j, "derivation").get<ObjectId>();
  i.ce = require_string(j, "ce");
  i.kept = Digest::from_hex(require_string(j, "kept_digest"));
  i.reported = Digest::from_hex(require_string(j, "reported_digest"));
  i.at = require_time(j, "at");
}

}  // namespace vdc
