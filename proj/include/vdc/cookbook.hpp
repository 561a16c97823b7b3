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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vdc/model.hpp"

namespace vdc {

struct DatasetRecord {
  Dataset definition;
  std::int64_t created_order = 0;
  std::vector<ObjectId> derivations;  // partition order
  std::int64_t created = 0;           // derivations new at composition
  std::int64_t linked = 0;            // derivations shared with earlier work
};

/// In-memory catalogs. Mutated only through apply(); every journal record is
/// one applied event, so replay rebuilds exactly this state.
class CatalogState {
 public:
  /// Applies one event of the form {"event": tag, "payload": {...}}.
  /// Throws Error(CorruptRecord) if the event does not fit the state.
  void apply(const nlohmann::json& event);

  const Transformation* transformation(const VersionRef& ref) const;
  const Recipe* recipe(const std::string& name) const;
  const DatasetRecord* dataset(const VersionRef& ref) const;
  const DatasetRecord* latest_dataset(const std::string& name) const;
  const Derivation* derivation(const ObjectId& id) const;
  const Derivation* producer_of(const ObjectId& output) const;
  const std::vector<Replica>& replicas(const ObjectId& object) const;
  bool available(const ObjectId& object) const { return !replicas(object).empty(); }
  std::optional<std::string> site_recipe(const std::string& site) const;

  const std::map<VersionRef, Transformation>& transformations() const noexcept { return transformations_; }
  const std::map<std::string, Recipe>& recipes() const noexcept { return recipes_; }
  const std::map<VersionRef, DatasetRecord>& datasets() const noexcept { return datasets_; }
  const std::unordered_map<ObjectId, Derivation, ObjectIdHash>& derivations() const noexcept {
    return derivations_;
  }
  const std::vector<NonDeterminismIncident>& incidents() const noexcept { return incidents_; }
  const std::map<std::string, std::string>& site_recipes() const noexcept { return site_recipes_; }

  /// DEFINED derivations whose inputs are all replicated, FIFO order.
  const std::set<std::pair<std::int64_t, ObjectId>>& ready() const noexcept { return ready_; }
  /// CLAIMED derivations, FIFO order.
  const std::set<std::pair<std::int64_t, ObjectId>>& claimed() const noexcept { return claimed_; }

  std::int64_t count(DerivationState s) const noexcept { return state_counts_[static_cast<std::size_t>(s)]; }
  std::int64_t replica_count() const noexcept { return replica_count_; }
  std::size_t compute_elements_seen() const noexcept { return ces_.size(); }
  std::size_t network_domains_seen() const noexcept { return domains_.size(); }
  std::size_t countries_seen() const noexcept { return countries_.size(); }

  /// Canonical serialization of the whole catalog; equal states serialize
  /// to identical bytes.
  std::string serialize() const;

 private:
  void set_state(Derivation& d, DerivationState next);
  void refresh_readiness(Derivation& d);
  void add_replica(const Replica& r);
  void on_object_available(const ObjectId& object);
  void on_object_unavailable(const ObjectId& object);
  Derivation& mutable_derivation(const ObjectId& id);

  std::map<VersionRef, Transformation> transformations_;
  std::map<std::string, Recipe> recipes_;
  std::map<VersionRef, DatasetRecord> datasets_;
  std::unordered_map<ObjectId, Derivation, ObjectIdHash> derivations_;
  std::unordered_map<ObjectId, ObjectId, ObjectIdHash> by_output_;
  std::unordered_map<ObjectId, std::vector<ObjectId>, ObjectIdHash> consumers_;
  std::map<ObjectId, std::vector<Replica>> replicas_;
  std::map<std::string, std::string> site_recipes_;
  std::vector<NonDeterminismIncident> incidents_;

  std::set<std::pair<std::int64_t, ObjectId>> ready_;
  std::set<std::pair<std::int64_t, ObjectId>> claimed_;
  std::array<std::int64_t, 4> state_counts_{};
  std::int64_t replica_count_ = 0;
  std::int64_t next_seq_ = 0;
  std::set<std::string> ces_;
  std::set<std::string> domains_;
  std::set<std::string> countries_;
};

/// Append-only newline-delimited JSON journal. Each record is
/// {"seq": n, "ts": RFC3339, "event": tag, "payload": {...}} on one line.
class Journal {
 public:
  /// Opens for append, first cutting any torn tail beyond `valid_bytes`.
  Journal(std::filesystem::path path, std::uint64_t valid_bytes, std::int64_t last_seq, bool sync);
  ~Journal();
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  /// Writes one record with a single write(2); returns its seq.
  std::int64_t append(const nlohmann::json& event, Timestamp ts);

  const std::filesystem::path& path() const noexcept { return path_; }
  std::int64_t last_seq() const noexcept { return last_seq_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::int64_t last_seq_ = 0;
  bool sync_ = false;
};

struct ReplayResult {
  CatalogState state;
  std::int64_t last_seq = 0;
  std::uint64_t valid_bytes = 0;  // offset just past the last good record
  std::size_t records = 0;
  bool dropped_torn_tail = false;
};

/// Rebuilds the catalog from a journal. A malformed final line without a
/// trailing newline is a torn write and is dropped; any other malformed
/// record throws Error(CorruptRecord) naming its line. A missing file
/// replays as empty.
ReplayResult journal_replay(const std::filesystem::path& path);

struct ComposeResult {
  VersionRef dataset;
  std::vector<ObjectId> derivations;
  std::int64_t created = 0;
  std::int64_t linked = 0;
};

/// The transformation, recipe, dataset and replica catalogs. Every mutation
/// is validated, journaled (when a journal is attached) and then applied.
/// Not internally synchronized; the server serializes writers.
class Cookbook {
 public:
  using Clock = std::function<Timestamp()>;

  Cookbook();
  /// Replays `journal_path` and appends to it from then on.
  Cookbook(const std::filesystem::path& journal_path, bool sync, Clock clock = wall_clock_now);
  ~Cookbook();
  Cookbook(Cookbook&&) noexcept;
  Cookbook& operator=(Cookbook&&) noexcept;

  VersionRef register_transformation(Transformation t);
  std::string register_recipe(Recipe r);
  void mark_validated(const std::string& name, const std::string& note);
  /// Makes `recipe` (SITE domain) the claim-time binding set for `site`.
  void bind_site(const std::string& site, const std::string& recipe);
  ComposeResult compose_dataset(const Dataset& d);

  void register_replica(Replica r);
  std::vector<Replica> find_replicas(const ObjectId& object) const;
  std::size_t remove_replicas(const ObjectId& object);

  /// Checks a transformation's own invariants; throws InvalidSchema or
  /// SchemaTemplateMismatch.
  static void validate_transformation(const Transformation& t);

  /// Merged parameter bindings for `d` (defaults <- recipes <- overrides)
  /// split by domain. Implicit partition parameters are not included.
  BoundParams resolve_bindings(const Dataset& d, const Transformation& tx) const;

  /// Journals then applies `event`; used by the planner.
  void commit(nlohmann::json event);

  const CatalogState& state() const noexcept { return state_; }
  Timestamp now() const { return clock_(); }
  void set_clock(Clock clock) { clock_ = std::move(clock); }
  const Journal* journal() const noexcept { return journal_.get(); }

 private:
  CatalogState state_;
  std::unique_ptr<Journal> journal_;
  Clock clock_ = wall_clock_now;
};

}  // namespace vdc
