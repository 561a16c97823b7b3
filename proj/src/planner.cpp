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

#include "vdc/planner.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "vdc/error.hpp"
#include "vdc/templating.hpp"

namespace vdc {

using nlohmann::json;

void PlannerConfig::validate() const {
  if (claim_timeout < Duration{1}) vdc::fail(ErrorKind::InvalidConfig, "claim_timeout must be at least one second");
  if (max_attempts < 1) vdc::fail(ErrorKind::InvalidConfig, "max_attempts must be positive");
  if (gc_period < Duration{1} || gc_period > claim_timeout) {
    vdc::fail(ErrorKind::InvalidConfig, "gc_period must lie in [1s, claim_timeout]");
  }
}

std::string_view to_string(LifecycleEvent e) {
  switch (e) {
    case LifecycleEvent::Claim:
      return "claim";
    case LifecycleEvent::Complete:
      return "complete";
    case LifecycleEvent::FailRequeue:
      return "fail-requeue";
    case LifecycleEvent::FailExhausted:
      return "fail-exhausted";
    case LifecycleEvent::Timeout:
      return "timeout";
    case LifecycleEvent::TimeoutExhausted:
      return "timeout-exhausted";
    case LifecycleEvent::Retry:
      return "retry";
  }
  return "?";
}

std::optional<DerivationState> next_state(DerivationState from, LifecycleEvent event) {
  using S = DerivationState;
  using E = LifecycleEvent;
  switch (from) {
    case S::Defined:
      if (event == E::Claim) return S::Claimed;
      return std::nullopt;
    case S::Claimed:
      switch (event) {
        case E::Complete:
          return S::Completed;
        case E::FailRequeue:
        case E::Timeout:
          return S::Defined;
        case E::FailExhausted:
        case E::TimeoutExhausted:
          return S::Failed;
        default:
          return std::nullopt;
      }
    case S::Completed:
      return std::nullopt;
    case S::Failed:
      if (event == E::Retry) return S::Defined;
      return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(CompletionOutcome o) {
  switch (o) {
    case CompletionOutcome::Completed:
      return "completed";
    case CompletionOutcome::DuplicateIgnored:
      return "duplicate_ignored";
    case CompletionOutcome::NonDeterminismIncident:
      return "nondeterminism_incident";
  }
  return "?";
}

void to_json(json& j, const MaterializationPlan& p) {
  j = json{{"target", p.target}, {"stages", p.stages}, {"pruned", p.pruned}};
}

void from_json(const json& j, MaterializationPlan& p) {
  p.target = require_field(j, "target").get<ObjectId>();
  p.stages = require_field(j, "stages").get<std::vector<std::vector<ObjectId>>>();
  p.pruned = require_field(j, "pruned").get<std::vector<ObjectId>>();
}

void to_json(json& j, const ReprocessResult& r) {
  j = json{{"datasets", r.datasets},
           {"invalidated", r.invalidated},
           {"invalidated_count", r.invalidated_count},
           {"reused_count", r.reused_count}};
}

namespace {

json event(std::string_view tag, json payload) { return json{{"event", tag}, {"payload", std::move(payload)}}; }

const Derivation& require_derivation(const CatalogState& s, const ObjectId& id) {
  const auto* d = s.derivation(id);
  if (d == nullptr) vdc::fail(ErrorKind::UnknownDerivation, id.str());
  return *d;
}

}  // namespace

Planner::Planner(Cookbook& cookbook, PlannerConfig config) : cookbook_(cookbook), config_(config) {
  config_.validate();
}

std::string Planner::render_for_site(const Derivation& d, const std::string& site) const {
  const auto& state = cookbook_.state();
  const auto recipe_name = state.site_recipe(site);
  if (!recipe_name) vdc::fail(ErrorKind::UnknownSite, "no SITE recipe bound for site '" + site + "'");
  const auto* recipe = state.recipe(*recipe_name);
  if (recipe == nullptr) vdc::fail(ErrorKind::UnknownSite, "site '" + site + "' names missing recipe " + *recipe_name);
  const auto* tx = state.transformation(d.transformation);
  if (tx == nullptr) vdc::fail(ErrorKind::Internal, "derivation references unknown " + d.transformation.str());

  Bindings bindings = d.params.merged();
  for (const auto& [name, value] : recipe->bindings) {
    const auto* entry = tx->schema.find(name);
    if (entry != nullptr && entry->domain == ParamDomain::Site && matches_type(value, entry->type)) {
      bindings[name] = value;
    }
  }
  for (const auto& e : tx->schema.entries) {
    if (e.required && e.domain == ParamDomain::Site && !bindings.contains(e.name)) {
      vdc::fail(ErrorKind::IncompleteBindings, "site '" + site + "' does not bind required SITE parameter '" + e.name + "'");
    }
  }
  return instantiate(tx->recipe_template, bindings);
}

std::optional<ClaimResult> Planner::claim_next(const std::string& ce, const std::string& site, Timestamp now) {
  if (ce.empty()) vdc::fail(ErrorKind::BadRequest, "ce_id is empty");
  const auto& state = cookbook_.state();
  if (!state.site_recipe(site)) vdc::fail(ErrorKind::UnknownSite, "no SITE recipe bound for site '" + site + "'");
  if (state.ready().empty()) return std::nullopt;

  const ObjectId id = state.ready().begin()->second;
  std::string recipe = render_for_site(require_derivation(state, id), site);
  cookbook_.commit(event("derivation_claimed", {{"id", id}, {"ce", ce}, {"site", site}, {"at", format_rfc3339(now)}}));
  return ClaimResult{require_derivation(state, id), std::move(recipe)};
}

CompletionOutcome Planner::complete(const ObjectId& id, const std::string& ce, const Provenance& prov) {
  const auto& state = cookbook_.state();
  const auto& d = require_derivation(state, id);
  if (prov.exit_status != 0) vdc::fail(ErrorKind::BadRequest, "non-zero exit status; report a failure instead");
  if (prov.finished < prov.started) vdc::fail(ErrorKind::BadRequest, "provenance finishes before it starts");

  switch (d.state) {
    case DerivationState::Completed: {
      if (d.provenance && d.provenance->output_digest == prov.output_digest) {
        return CompletionOutcome::DuplicateIgnored;
      }
      NonDeterminismIncident incident{id, ce, d.provenance ? d.provenance->output_digest : Digest{},
                                      prov.output_digest, prov.finished};
      cookbook_.commit(event("completion_incident", json(incident)));
      return CompletionOutcome::NonDeterminismIncident;
    }
    case DerivationState::Claimed:
      if (!d.claimed_by(ce)) vdc::fail(ErrorKind::CompleteWithoutClaim, ce + " never claimed " + id.str());
      break;
    case DerivationState::Defined:
    case DerivationState::Failed:
      if (d.claimed_by(ce)) {
        vdc::fail(ErrorKind::StaleClaim, ce + "'s claim on " + id.str() + " expired; the derivation is " +
                                        std::string(to_string(d.state)));
      }
      vdc::fail(ErrorKind::CompleteWithoutClaim, ce + " never claimed " + id.str());
  }

  // The replica lands at the site the reporting CE claimed from.
  std::string site;
  for (const auto& c : d.claim_history) {
    if (c.ce == ce) site = c.site;
  }
  Replica replica{d.output, site, "vdc://" + site + "/" + d.output.digest().hex(), prov.finished};
  cookbook_.commit(event("derivation_completed", {{"id", id}, {"ce", ce}, {"provenance", prov}, {"replica", replica}}));
  return CompletionOutcome::Completed;
}

DerivationState Planner::fail(const ObjectId& id, const std::string& ce, const std::string& reason) {
  const auto& d = require_derivation(cookbook_.state(), id);
  if (d.state != DerivationState::Claimed || !d.claim || d.claim->ce != ce) {
    vdc::fail(ErrorKind::NotClaimant, ce + " does not hold the claim on " + id.str());
  }
  if (d.attempts < config_.max_attempts) {
    cookbook_.commit(event("derivation_requeued", {{"id", id}, {"reason", reason}}));
    return DerivationState::Defined;
  }
  cookbook_.commit(event("derivation_failed", {{"id", id}, {"reason", reason}}));
  return DerivationState::Failed;
}

void Planner::retry(const ObjectId& id) {
  const auto& d = require_derivation(cookbook_.state(), id);
  if (d.state != DerivationState::Failed) {
    vdc::fail(ErrorKind::NotFailed, id.str() + " is " + std::string(to_string(d.state)));
  }
  cookbook_.commit(event("derivation_retried", {{"id", id}}));
}

std::vector<ObjectId> Planner::gc_sweep(Timestamp now) {
  const auto& state = cookbook_.state();
  std::vector<ObjectId> expired;
  for (const auto& [seq, id] : state.claimed()) {
    const auto& d = *state.derivation(id);
    if (d.claim && now - d.claim->at > config_.claim_timeout) expired.push_back(id);
  }
  std::vector<ObjectId> requeued;
  for (const auto& id : expired) {
    const auto& d = *state.derivation(id);
    if (d.attempts >= config_.max_attempts) {
      cookbook_.commit(event("derivation_failed",
                             {{"id", id}, {"reason", "claim timed out after " + std::to_string(d.attempts) + " attempts"}}));
    } else {
      cookbook_.commit(event("derivation_requeued", {{"id", id}, {"reason", "claim timeout"}}));
      requeued.push_back(id);
    }
  }
  return requeued;
}

MaterializationPlan Planner::plan_materialization(const ObjectId& requested) const {
  const auto& state = cookbook_.state();
  ObjectId target = requested;
  if (const auto* d = state.derivation(requested); d != nullptr && state.producer_of(requested) == nullptr) {
    target = d->output;
  }

  MaterializationPlan plan;
  plan.target = target;
  if (state.available(target)) {
    plan.pruned.push_back(target);
    return plan;
  }
  const auto* root = state.producer_of(target);
  if (root == nullptr) vdc::fail(ErrorKind::UnknownObject, target.str() + " has no replica and no producing derivation");

  enum class Mark { Visiting, Done };
  std::unordered_map<ObjectId, Mark, ObjectIdHash> marks;
  std::unordered_map<ObjectId, std::int64_t, ObjectIdHash> depth;
  std::set<ObjectId> pruned;

  std::function<std::int64_t(const Derivation&)> visit = [&](const Derivation& d) -> std::int64_t {
    if (const auto it = marks.find(d.id); it != marks.end()) {
      if (it->second == Mark::Visiting) vdc::fail(ErrorKind::CycleDetected, "derivation graph cycles through " + d.id.str());
      return depth.at(d.id);
    }
    marks[d.id] = Mark::Visiting;
    std::int64_t level = 0;
    for (const auto& in : d.inputs) {
      if (state.available(in)) {
        pruned.insert(in);
        continue;
      }
      const auto* producer = state.producer_of(in);
      if (producer == nullptr) vdc::fail(ErrorKind::UnknownObject, "input " + in.str() + " cannot be produced");
      level = std::max(level, visit(*producer) + 1);
    }
    marks[d.id] = Mark::Done;
    depth[d.id] = level;
    return level;
  };
  const auto top = visit(*root);

  plan.stages.resize(static_cast<std::size_t>(top + 1));
  for (const auto& [id, level] : depth) plan.stages[static_cast<std::size_t>(level)].push_back(id);
  for (auto& stage : plan.stages) std::sort(stage.begin(), stage.end());
  plan.pruned.assign(pruned.begin(), pruned.end());
  return plan;
}

ReprocessResult Planner::reprocess(const std::string& dataset, const std::string& recipe_name) {
  const auto& state = cookbook_.state();
  const auto* root = state.latest_dataset(dataset);
  if (root == nullptr) vdc::fail(ErrorKind::UnknownDataset, "no dataset '" + dataset + "'");
  const auto* recipe = state.recipe(recipe_name);
  if (recipe == nullptr) vdc::fail(ErrorKind::UnknownRecipe, "no recipe '" + recipe_name + "'");
  if (!recipe->validated) vdc::fail(ErrorKind::UnvalidatedRecipe, "recipe '" + recipe_name + "' is not validated");

  ReprocessResult result;
  std::set<ObjectId> invalidated;
  std::map<VersionRef, VersionRef> replaced;

  auto outputs_of = [&](const DatasetRecord& rec) {
    std::vector<ObjectId> out;
    for (const auto& id : rec.derivations) out.push_back(state.derivation(id)->output);
    return out;
  };

  auto recompose = [&](Dataset next, const VersionRef& old_ref) {
    const auto old_outputs = outputs_of(*state.dataset(old_ref));
    next.version = state.latest_dataset(next.name)->definition.version + 1;
    const auto composed = cookbook_.compose_dataset(next);
    const auto new_outputs = outputs_of(*state.dataset(composed.dataset));
    const std::set<ObjectId> old_set(old_outputs.begin(), old_outputs.end());
    const std::set<ObjectId> new_set(new_outputs.begin(), new_outputs.end());
    for (const auto& o : old_outputs) {
      if (!new_set.contains(o)) invalidated.insert(o);
    }
    for (const auto& o : new_outputs) {
      if (old_set.contains(o)) ++result.reused_count;
    }
    replaced[old_ref] = composed.dataset;
    result.datasets.push_back(composed.dataset);
  };

  Dataset next = root->definition;
  next.recipes[recipe->domain] = recipe_name;
  const auto root_ref = root->definition.ref();
  const auto root_order = root->created_order;
  recompose(std::move(next), root_ref);

  // Datasets can only consume datasets registered before them, so creation
  // order is a topological order of the consumer graph.
  std::vector<const DatasetRecord*> candidates;
  for (const auto& [ref, rec] : state.datasets()) {
    if (rec.created_order > root_order && state.latest_dataset(ref.name) == &rec && ref.name != dataset) {
      candidates.push_back(&rec);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const auto* a, const auto* b) { return a->created_order < b->created_order; });
  std::vector<std::pair<Dataset, VersionRef>> pending;
  for (const auto* rec : candidates) pending.emplace_back(rec->definition, rec->definition.ref());

  for (auto& [def, old_ref] : pending) {
    bool references_replaced = false;
    for (auto& [slot, ref] : def.inputs) {
      if (const auto it = replaced.find(ref); it != replaced.end()) {
        ref = it->second;
        references_replaced = true;
      }
    }
    if (!references_replaced) continue;
    bool consumes_invalidated = false;
    for (const auto& id : state.dataset(old_ref)->derivations) {
      const auto& ins = state.derivation(id)->inputs;
      if (std::any_of(ins.begin(), ins.end(), [&](const ObjectId& o) { return invalidated.contains(o); })) {
        consumes_invalidated = true;
        break;
      }
    }
    if (consumes_invalidated) recompose(def, old_ref);
  }

  result.invalidated.assign(invalidated.begin(), invalidated.end());
  result.invalidated_count = static_cast<std::int64_t>(invalidated.size());
  return result;
}

}  // namespace vdc
