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

// Randomized oracle cases shared by the unit tests and the acceptance
// runner. Each returns an empty string on success and a description of the
// first discrepancy otherwise.

#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "vdc/error.hpp"

namespace vdc::test {

// ---------------------------------------------------------------------------
// Identity invariance

enum class Mutation { App, Site, Repro, Input };

inline const char* to_string(Mutation m) {
  switch (m) {
    case Mutation::App:
      return "APP";
    case Mutation::Site:
      return "SITE";
    case Mutation::Repro:
      return "REPRO";
    case Mutation::Input:
      return "INPUT";
  }
  return "?";
}

inline ParamValue random_value(std::mt19937_64& rng, ParamType type) {
  switch (type) {
    case ParamType::Int:
      return static_cast<std::int64_t>(rng() % 2001) - 1000;
    case ParamType::Bool:
      return rng() % 2 == 0;
    case ParamType::String:
      return "s" + std::to_string(rng() % 100000);
    case ParamType::Decimal:
      return std::to_string(rng() % 1000) + "." + std::to_string(rng() % 100);
  }
  return std::int64_t{0};
}

/// A value of the same type that differs from `v`.
inline ParamValue mutate_value(std::mt19937_64& rng, const ParamValue& v, ParamType type) {
  switch (type) {
    case ParamType::Int:
      return std::get<std::int64_t>(v) + 1 + static_cast<std::int64_t>(rng() % 50);
    case ParamType::Bool:
      return !std::get<bool>(v);
    case ParamType::String:
      return std::get<std::string>(v) + "x";
    case ParamType::Decimal:
      return std::get<std::string>(v) + "1";
  }
  return v;
}

struct RandomTx {
  Transformation tx;
  std::map<ParamDomain, std::vector<const SchemaEntry*>> by_domain;
};

inline RandomTx random_transformation(std::mt19937_64& rng, const std::string& name) {
  RandomTx r;
  r.tx.name = name;
  r.tx.version = 1 + static_cast<std::int64_t>(rng() % 3);
  r.tx.step = "step" + std::to_string(rng() % 4);
  std::string text = "exe";
  int counter = 0;
  for (const auto domain : kAllDomains) {
    const auto n = 1 + rng() % 3;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto type = static_cast<ParamType>(rng() % 4);
      auto e = entry("p" + std::to_string(counter++), domain, type, true);
      text += " --" + e.name + "=${" + e.name + "}";
      r.tx.schema.entries.push_back(std::move(e));
    }
  }
  if (rng() % 2 == 0) text += " --seed ${random_seed}";
  r.tx.recipe_template = parse_template(text);
  Cookbook::validate_transformation(r.tx);
  for (const auto& e : r.tx.schema.entries) r.by_domain[e.domain].push_back(&e);
  return r;
}

inline std::vector<ObjectId> outputs_of(const Cookbook& cb, const VersionRef& ds) {
  std::vector<ObjectId> out;
  for (const auto& id : cb.state().dataset(ds)->derivations) out.push_back(cb.state().derivation(id)->output);
  return out;
}

/// One randomized case: compose a dataset, mutate a single binding of the
/// chosen domain, recompose, and compare output ids.
inline std::string identity_invariance_case(std::mt19937_64& rng, Mutation mutation) {
  Cookbook cb;
  auto r = random_transformation(rng, "tx" + std::to_string(rng() % 1000));
  cb.register_transformation(r.tx);

  Bindings repro;
  Bindings app;
  Bindings site;
  for (const auto* e : r.by_domain[ParamDomain::Repro]) repro[e->name] = random_value(rng, e->type);
  for (const auto* e : r.by_domain[ParamDomain::App]) app[e->name] = random_value(rng, e->type);
  for (const auto* e : r.by_domain[ParamDomain::Site]) site[e->name] = random_value(rng, e->type);

  const auto partitions = 1 + static_cast<std::int64_t>(rng() % 4);
  const auto base_seed = static_cast<std::int64_t>(rng() % 1'000'000);
  auto compose = [&](std::int64_t version, const Bindings& rp, const Bindings& ap, const Bindings& st) {
    const auto tag = std::to_string(version);
    cb.register_recipe(make_recipe("repro." + tag, ParamDomain::Repro, rp));
    cb.register_recipe(make_recipe("app." + tag, ParamDomain::App, ap));
    Dataset d = make_dataset("ds", r.tx, partitions,
                             {{ParamDomain::Repro, "repro." + tag}, {ParamDomain::App, "app." + tag}}, {}, base_seed);
    d.version = version;
    d.overrides = st;  // SITE values supplied directly
    cb.compose_dataset(d);
    return outputs_of(cb, d.ref());
  };

  if (mutation == Mutation::Input) {
    std::vector<ObjectId> inputs;
    for (auto n = 1 + rng() % 3; n > 0; --n) inputs.emplace_back(sha256(std::to_string(rng())));
    r.tx.body_hash = identity::body_hash(r.tx);
    const auto before = identity::derivation_output_id(r.tx, repro, inputs);
    auto changed = inputs;
    changed[rng() % changed.size()] = ObjectId(sha256(std::to_string(rng()) + "!"));
    const auto after = identity::derivation_output_id(r.tx, repro, changed);
    if (before == after) return "input mutation kept output id " + before.str();
    if (identity::derivation_output_id(r.tx, repro, inputs) != before) return "output id is not deterministic";
    return {};
  }

  const auto before = compose(1, repro, app, site);
  auto pick = [&](ParamDomain d, Bindings& b) {
    const auto& entries = r.by_domain[d];
    const auto* e = entries[rng() % entries.size()];
    b[e->name] = mutate_value(rng, b[e->name], e->type);
    return e->name;
  };
  std::string changed;
  switch (mutation) {
    case Mutation::App:
      changed = pick(ParamDomain::App, app);
      break;
    case Mutation::Site:
      changed = pick(ParamDomain::Site, site);
      break;
    default:
      changed = pick(ParamDomain::Repro, repro);
      break;
  }
  const auto after = compose(2, repro, app, site);

  std::ostringstream why;
  for (std::size_t i = 0; i < before.size(); ++i) {
    const bool same = before[i] == after[i];
    if (mutation == Mutation::Repro && same) {
      why << "REPRO mutation of '" << changed << "' kept output id of partition " << i;
      return why.str();
    }
    if (mutation != Mutation::Repro && !same) {
      why << to_string(mutation) << " mutation of '" << changed << "' changed output id of partition " << i;
      return why.str();
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Random derivation DAGs

struct RandomDag {
  std::vector<VersionRef> nodes;                 // one single-partition dataset per node
  std::vector<std::vector<std::size_t>> parents;
  std::vector<ObjectId> outputs;
  std::vector<ObjectId> derivations;
};

inline RandomDag random_dag(Cookbook& cb, std::mt19937_64& rng, std::size_t n) {
  RandomDag g;
  cb.register_recipe(make_recipe("dag.repro", ParamDomain::Repro, {{"events", std::int64_t{1}}}));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> ps;
    if (j > 0) {
      const auto k = rng() % 4;  // 0..3 parents
      std::set<std::size_t> chosen;
      for (std::uint64_t i = 0; i < k; ++i) chosen.insert(rng() % j);
      ps.assign(chosen.begin(), chosen.end());
    }
    std::vector<InputSlot> slots;
    std::map<std::string, VersionRef> inputs;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto slot = "in" + std::to_string(i);
      slots.push_back({slot, "s" + std::to_string(ps[i])});
      inputs[slot] = g.nodes[ps[i]];
    }
    auto tx = make_tx("t" + std::to_string(j), "s" + std::to_string(j), slots);
    cb.register_transformation(tx);
    const auto d = make_dataset("n" + std::to_string(j), tx, 1, {{ParamDomain::Repro, "dag.repro"}}, inputs,
                                static_cast<std::int64_t>(j));
    cb.compose_dataset(d);
    g.nodes.push_back(d.ref());
    g.parents.push_back(ps);
    const auto& dv = only_derivation(cb, d.ref());
    g.outputs.push_back(dv.output);
    g.derivations.push_back(dv.id);
  }
  return g;
}

/// Materialization plan versus brute-force reachability on a random DAG.
inline std::string pruning_case(std::mt19937_64& rng) {
  Cookbook cb;
  Planner planner(cb, PlannerConfig{});
  const auto n = 1 + rng() % 50;
  const auto g = random_dag(cb, rng, n);

  std::vector<bool> replicated(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (rng() % 100 < 30) {
      replicated[j] = true;
      cb.register_replica({g.outputs[j], "site.r", "file:///r/" + std::to_string(j), at(0)});
    }
  }
  const auto target = rng() % n;

  // needed(j): j is unreplicated and some consumer path from j reaches the
  // target through unreplicated nodes only.
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto p : g.parents[j]) children[p].push_back(j);
  }
  std::function<bool(std::size_t, std::vector<int>&)> needed = [&](std::size_t j, std::vector<int>& memo) -> bool {
    if (memo[j] >= 0) return memo[j] == 1;
    bool result = false;
    if (!replicated[j]) {
      if (j == target) {
        result = true;
      } else {
        for (const auto c : children[j]) result = result || needed(c, memo);
      }
    }
    memo[j] = result ? 1 : 0;
    return result;
  };
  std::vector<int> memo(n, -1);
  std::set<ObjectId> expected;
  for (std::size_t j = 0; j < n; ++j) {
    if (needed(j, memo)) expected.insert(g.derivations[j]);
  }

  const auto plan = planner.plan_materialization(g.outputs[target]);
  std::map<ObjectId, std::size_t> stage_of;
  for (std::size_t s = 0; s < plan.stages.size(); ++s) {
    for (const auto& id : plan.stages[s]) {
      if (!stage_of.emplace(id, s).second) return "derivation planned twice: " + id.str();
    }
  }
  std::set<ObjectId> got;
  for (const auto& [id, s] : stage_of) got.insert(id);
  std::ostringstream why;
  if (got != expected) {
    why << "n=" << n << " target=" << target << ": planned " << got.size() << " derivations, oracle expects "
        << expected.size();
    return why.str();
  }
  // Every planned input producer runs in an earlier stage.
  for (std::size_t j = 0; j < n; ++j) {
    const auto it = stage_of.find(g.derivations[j]);
    if (it == stage_of.end()) continue;
    for (const auto p : g.parents[j]) {
      const auto pit = stage_of.find(g.derivations[p]);
      if (pit != stage_of.end() && pit->second >= it->second) return "stage order violated at node " + std::to_string(j);
      if (pit == stage_of.end() && !replicated[p]) return "unreplicated input left out at node " + std::to_string(j);
    }
  }
  for (const auto& o : plan.pruned) {
    const auto j = static_cast<std::size_t>(std::find(g.outputs.begin(), g.outputs.end(), o) - g.outputs.begin());
    if (j >= n || !replicated[j]) return "pruned object is not replicated: " + o.str();
  }
  if (replicated[target] && (!plan.stages.empty() || plan.pruned != std::vector<ObjectId>{g.outputs[target]})) {
    return "replicated target must give an empty plan";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Reprocessing minimality

struct PipelineSpec {
  struct Node {
    std::string name;
    std::int64_t partitions;
    std::vector<std::size_t> parents;
    std::string repro;
  };
  std::vector<Node> nodes;
};

inline PipelineSpec random_pipeline(std::mt19937_64& rng) {
  PipelineSpec p;
  std::int64_t budget = 100;
  const auto count = 2 + rng() % 7;
  for (std::size_t j = 0; j < count && budget > 0; ++j) {
    PipelineSpec::Node node;
    node.name = "p" + std::to_string(j);
    node.partitions = std::min<std::int64_t>(budget, 1 + static_cast<std::int64_t>(rng() % 12));
    budget -= node.partitions;
    if (j > 0 && rng() % 4 != 0) {
      std::set<std::size_t> chosen;
      for (auto k = 1 + rng() % 2; k > 0; --k) chosen.insert(rng() % j);
      node.parents.assign(chosen.begin(), chosen.end());
    }
    node.repro = "r" + std::to_string(j);
    p.nodes.push_back(std::move(node));
  }
  return p;
}

/// Registers the pipeline; `override_node` uses `override_recipe` instead of
/// its own REPRO/APP recipe.
inline std::vector<VersionRef> build_pipeline(Cookbook& cb, const PipelineSpec& p, std::optional<std::size_t> override_node = {},
                                              const Recipe* override_recipe = nullptr) {
  cb.register_recipe(make_recipe("app.base", ParamDomain::App, {{"verbosity", std::int64_t{0}}}));
  for (std::size_t j = 0; j < p.nodes.size(); ++j) {
    cb.register_recipe(make_recipe(p.nodes[j].repro, ParamDomain::Repro,
                                   {{"events", std::int64_t{1 + static_cast<std::int64_t>(j % 3)}},
                                    {"channel", "ch" + std::to_string(j)}}));
  }
  if (override_recipe != nullptr) cb.register_recipe(*override_recipe);
  std::vector<VersionRef> refs;
  for (std::size_t j = 0; j < p.nodes.size(); ++j) {
    const auto& node = p.nodes[j];
    std::vector<InputSlot> slots;
    std::map<std::string, VersionRef> inputs;
    for (std::size_t i = 0; i < node.parents.size(); ++i) {
      const auto slot = "in" + std::to_string(i);
      slots.push_back({slot, "s" + std::to_string(node.parents[i])});
      inputs[slot] = refs[node.parents[i]];
    }
    auto tx = make_tx("t" + std::to_string(j), "s" + std::to_string(j), slots);
    cb.register_transformation(tx);
    std::map<ParamDomain, std::string> recipes{{ParamDomain::Repro, node.repro}, {ParamDomain::App, "app.base"}};
    if (override_node == j) recipes[override_recipe->domain] = override_recipe->name;
    cb.compose_dataset(make_dataset(node.name, tx, node.partitions, recipes, inputs, 7 * static_cast<std::int64_t>(j)));
    refs.push_back({node.name, 1});
  }
  return refs;
}

/// Reprocess under a changed recipe versus a from-scratch rebuild.
inline std::string reprocess_case(std::mt19937_64& rng) {
  const auto shape = random_pipeline(rng);
  const auto target = rng() % shape.nodes.size();
  const bool app_change = rng() % 4 == 0;
  const Recipe changed = app_change
                             ? make_recipe("changed", ParamDomain::App, {{"verbosity", std::int64_t{3}}})
                             : make_recipe("changed", ParamDomain::Repro,
                                           {{"events", std::int64_t{7}}, {"channel", "ch" + std::to_string(target)}});

  Cookbook a;
  Planner planner(a, PlannerConfig{});
  const auto refs = build_pipeline(a, shape);
  a.register_recipe(changed);
  std::set<ObjectId> old_outputs;
  for (const auto& r : refs) {
    for (const auto& o : outputs_of(a, r)) old_outputs.insert(o);
  }
  const auto result = planner.reprocess(shape.nodes[target].name, "changed");

  Cookbook b;
  const auto rebuilt = build_pipeline(b, shape, target, &changed);
  std::set<ObjectId> new_outputs;
  for (const auto& r : rebuilt) {
    for (const auto& o : outputs_of(b, r)) new_outputs.insert(o);
  }
  std::vector<ObjectId> expected;
  for (const auto& o : old_outputs) {
    if (!new_outputs.contains(o)) expected.push_back(o);
  }

  std::ostringstream why;
  if (result.invalidated != expected) {
    why << "invalidated " << result.invalidated.size() << " outputs, re-hash diff gives " << expected.size();
    return why.str();
  }
  if (result.invalidated_count != static_cast<std::int64_t>(expected.size())) return "invalidated_count mismatch";
  if (app_change && !result.invalidated.empty()) return "APP change invalidated outputs";
  // Each new version matches the rebuilt dataset exactly.
  for (const auto& v : result.datasets) {
    if (outputs_of(a, v) != outputs_of(b, {v.name, 1})) return "new version " + v.str() + " differs from rebuild";
  }
  // Datasets left alone are exactly those whose outputs did not change.
  for (std::size_t j = 0; j < shape.nodes.size(); ++j) {
    const bool recomposed = std::any_of(result.datasets.begin(), result.datasets.end(),
                                        [&](const VersionRef& v) { return v.name == shape.nodes[j].name; });
    const bool unchanged = outputs_of(a, refs[j]) == outputs_of(b, rebuilt[j]);
    if (!recomposed && !unchanged) return "dataset " + shape.nodes[j].name + " needed recomposition";
    if (recomposed && unchanged && j != target) return "dataset " + shape.nodes[j].name + " recomposed needlessly";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Lifecycle model check

/// The declared lifecycle, written out independently of next_state().
inline std::optional<DerivationState> declared_transition(DerivationState s, LifecycleEvent e) {
  using S = DerivationState;
  using E = LifecycleEvent;
  static const std::map<std::pair<S, E>, S> table = {
      {{S::Defined, E::Claim}, S::Claimed},          {{S::Claimed, E::Complete}, S::Completed},
      {{S::Claimed, E::FailRequeue}, S::Defined},    {{S::Claimed, E::FailExhausted}, S::Failed},
      {{S::Claimed, E::Timeout}, S::Defined},        {{S::Claimed, E::TimeoutExhausted}, S::Failed},
      {{S::Failed, E::Retry}, S::Defined},
  };
  const auto it = table.find({s, e});
  if (it == table.end()) return std::nullopt;
  return it->second;
}

inline constexpr DerivationState kAllStates[] = {DerivationState::Defined, DerivationState::Claimed,
                                                 DerivationState::Completed, DerivationState::Failed};

/// A single-derivation catalog driven through the planner API.
struct Machine {
  static constexpr std::int64_t kMaxAttempts = 2;
  Cookbook cb;
  Planner planner{cb, PlannerConfig{Duration{60}, kMaxAttempts, Duration{30}}};
  ObjectId id;
  std::int64_t clock = 0;
  std::string holder;  // CE of the latest claim
  int next_ce = 0;

  Machine() {
    bind_default_site(cb);
    auto tx = make_tx("m", "evgen");
    cb.register_transformation(tx);
    cb.register_recipe(make_recipe("m.repro", ParamDomain::Repro, {{"events", std::int64_t{1}}}));
    const auto d = make_dataset("m", tx, 1, {{ParamDomain::Repro, "m.repro"}});
    cb.compose_dataset(d);
    id = only_derivation(cb, d.ref()).id;
  }

  const Derivation& d() const { return *cb.state().derivation(id); }

  void claim() {
    holder = "ce" + std::to_string(next_ce++);
    planner.claim_next(holder, kSite, at(clock));
  }
  void fail() { planner.fail(id, holder, "injected"); }
  void complete() { planner.complete(id, holder, provenance_for(holder, sha256("payload"), at(clock))); }
  void expire() {
    clock += 61;
    planner.gc_sweep(at(clock));
  }
  void retry() { planner.retry(id); }

  /// Drives to `s`; `at_cap` leaves attempts at the maximum.
  void reach(DerivationState s, bool at_cap) {
    switch (s) {
      case DerivationState::Defined:
        if (at_cap) {
          claim();
          fail();
        }
        break;
      case DerivationState::Claimed:
        claim();
        if (at_cap) {
          fail();
          claim();
        }
        break;
      case DerivationState::Completed:
        claim();
        complete();
        break;
      case DerivationState::Failed:
        for (std::int64_t i = 0; i < kMaxAttempts; ++i) {
          claim();
          fail();
        }
        break;
    }
  }

  /// Issues `e` through the API; rejected operations leave the state alone.
  void apply(LifecycleEvent e) {
    try {
      switch (e) {
        case LifecycleEvent::Claim:
          claim();
          break;
        case LifecycleEvent::Complete:
          complete();
          break;
        case LifecycleEvent::FailRequeue:
        case LifecycleEvent::FailExhausted:
          fail();
          break;
        case LifecycleEvent::Timeout:
        case LifecycleEvent::TimeoutExhausted:
          expire();
          break;
        case LifecycleEvent::Retry:
          retry();
          break;
      }
    } catch (const Error&) {
    }
  }
};

inline bool needs_cap(LifecycleEvent e) {
  return e == LifecycleEvent::FailExhausted || e == LifecycleEvent::TimeoutExhausted;
}

/// Exhaustive (state, event) enumeration plus a random walk checking that no
/// undeclared transition is reachable.
inline std::string model_check(std::size_t walk_steps = 5000) {
  std::ostringstream why;
  for (const auto s : kAllStates) {
    for (const auto e : kAllLifecycleEvents) {
      if (next_state(s, e) != declared_transition(s, e)) {
        why << "next_state(" << to_string(s) << ", " << to_string(e) << ") disagrees with the declared table";
        return why.str();
      }
      Machine m;
      m.reach(s, needs_cap(e));
      if (m.d().state != s) return "could not reach " + std::string(to_string(s));
      m.apply(e);
      const auto expected = declared_transition(s, e).value_or(s);
      if (m.d().state != expected) {
        why << to_string(s) << " + " << to_string(e) << " gave " << to_string(m.d().state) << ", table says "
            << to_string(expected);
        return why.str();
      }
    }
  }

  std::mt19937_64 rng(99);
  auto machine = std::make_unique<Machine>();
  for (std::size_t i = 0; i < walk_steps; ++i) {
    auto& m = *machine;
    const auto before = m.d().state;
    const auto op = rng() % 5;
    try {
      switch (op) {
        case 0:
          m.claim();
          break;
        case 1:
          m.complete();
          break;
        case 2:
          m.fail();
          break;
        case 3:
          m.expire();
          break;
        default:
          m.retry();
          break;
      }
    } catch (const Error&) {
    }
    const auto after = m.d().state;
    if (before == after) continue;
    const bool declared = std::any_of(std::begin(kAllLifecycleEvents), std::end(kAllLifecycleEvents),
                                      [&](LifecycleEvent e) { return declared_transition(before, e) == after; });
    if (!declared) {
      why << "undeclared transition " << to_string(before) << " -> " << to_string(after) << " at step " << i;
      return why.str();
    }
    if (after == DerivationState::Completed) machine = std::make_unique<Machine>();  // terminal: restart
  }
  return {};
}

}  // namespace vdc::test
