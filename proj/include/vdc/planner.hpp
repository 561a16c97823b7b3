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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vdc/cookbook.hpp"
#include "vdc/model.hpp"

namespace vdc {

struct PlannerConfig {
  Duration claim_timeout{60};
  std::int64_t max_attempts = 10;
  Duration gc_period{30};

  /// Throws InvalidConfig unless claim_timeout >= 1s, max_attempts >= 1 and
  /// gc_period <= claim_timeout.
  void validate() const;
};

/// Lifecycle events a derivation can undergo.
enum class LifecycleEvent {
  Claim,
  Complete,
  FailRequeue,    // explicit failure, attempts below the cap
  FailExhausted,  // explicit failure at the cap
  Timeout,        // claim expired, attempts below the cap
  TimeoutExhausted,
  Retry,          // operator retry of a FAILED derivation
};

inline constexpr LifecycleEvent kAllLifecycleEvents[] = {
    LifecycleEvent::Claim,   LifecycleEvent::Complete,         LifecycleEvent::FailRequeue,
    LifecycleEvent::FailExhausted, LifecycleEvent::Timeout, LifecycleEvent::TimeoutExhausted,
    LifecycleEvent::Retry,
};

std::string_view to_string(LifecycleEvent e);

/// The declared transition table; nullopt where the event is illegal.
std::optional<DerivationState> next_state(DerivationState from, LifecycleEvent event);

struct ClaimResult {
  Derivation derivation;
  std::string recipe;  // template instantiated for the claiming site
};

enum class CompletionOutcome { Completed, DuplicateIgnored, NonDeterminismIncident };

std::string_view to_string(CompletionOutcome o);

struct MaterializationPlan {
  ObjectId target;
  std::vector<std::vector<ObjectId>> stages;  // derivation ids, upstream first
  std::vector<ObjectId> pruned;               // objects already replicated
};

void to_json(nlohmann::json& j, const MaterializationPlan& p);
void from_json(const nlohmann::json& j, MaterializationPlan& p);

struct ReprocessResult {
  std::vector<VersionRef> datasets;  // new versions, reprocessed dataset first
  std::vector<ObjectId> invalidated;  // superseded output ids, sorted
  std::int64_t invalidated_count = 0;
  std::int64_t reused_count = 0;
};

void to_json(nlohmann::json& j, const ReprocessResult& r);

/// Derivation lifecycle and DAG planning over a Cookbook. Callers serialize
/// access; the server holds its writer lock around every mutating call.
class Planner {
 public:
  Planner(Cookbook& cookbook, PlannerConfig config);

  const PlannerConfig& config() const noexcept { return config_; }

  /// Claims the oldest ready DEFINED derivation for `ce` at `site` and
  /// instantiates its recipe with the site's SITE bindings. Returns nullopt
  /// when nothing is ready. Throws UnknownSite if `site` has no SITE recipe.
  std::optional<ClaimResult> claim_next(const std::string& ce, const std::string& site, Timestamp now);

  /// First report wins. A later report with the same digest is ignored; a
  /// differing digest records a non-determinism incident.
  CompletionOutcome complete(const ObjectId& id, const std::string& ce, const Provenance& provenance);

  /// Returns the resulting state (DEFINED when re-queued, FAILED at the cap).
  DerivationState fail(const ObjectId& id, const std::string& ce, const std::string& reason);

  /// FAILED -> DEFINED with the attempt counter reset.
  void retry(const ObjectId& id);

  /// Re-queues every claim older than claim_timeout; claims at the attempt
  /// cap fail instead. Returns the re-queued ids in FIFO order.
  std::vector<ObjectId> gc_sweep(Timestamp now);

  /// Accepts an output id, or a derivation id standing for its output.
  MaterializationPlan plan_materialization(const ObjectId& target) const;

  ReprocessResult reprocess(const std::string& dataset, const std::string& recipe);

 private:
  std::string render_for_site(const Derivation& d, const std::string& site) const;

  Cookbook& cookbook_;
  PlannerConfig config_;
};

}  // namespace vdc
