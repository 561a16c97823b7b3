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
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "vdc/cookbook.hpp"
#include "vdc/identity.hpp"
#include "vdc/planner.hpp"
#include "vdc/simnet.hpp"

namespace vdc::test {

inline constexpr const char* kSteps[] = {"evgen", "simul", "pileup", "digit"};

inline Timestamp at(std::int64_t seconds) { return from_unix(1'700'000'000 + seconds); }

inline SchemaEntry entry(std::string name, ParamDomain domain, ParamType type, bool required,
                         std::optional<ParamValue> def = std::nullopt) {
  return {std::move(name), domain, type, required, std::move(def)};
}

/// A transformation with the usual REPRO/APP/SITE split. `slots` lists
/// (slot, upstream step) pairs.
inline Transformation make_tx(std::string name, std::string step,
                              std::vector<InputSlot> slots = {}, std::string variant = "") {
  Transformation t;
  t.name = std::move(name);
  t.version = 1;
  t.step = std::move(step);
  t.schema.entries = {
      entry("events", ParamDomain::Repro, ParamType::Int, true),
      entry("random_seed", ParamDomain::Repro, ParamType::Int, true),
      entry("channel", ParamDomain::Repro, ParamType::String, false, ParamValue{std::string("mu")}),
      entry("verbosity", ParamDomain::App, ParamType::Int, false, ParamValue{std::int64_t{0}}),
      entry("workdir", ParamDomain::Site, ParamType::String, true),
  };
  t.recipe_template = parse_template("run" + variant + " -n ${events} -seed ${random_seed} -c ${channel} -v ${verbosity}"
                                     " -o ${workdir}/out.${partition_index}");
  t.inputs = std::move(slots);
  return t;
}

inline Recipe make_recipe(std::string name, ParamDomain domain, Bindings b, bool validated = true) {
  return {std::move(name), domain, std::move(b), validated, ""};
}

inline Dataset make_dataset(std::string name, const Transformation& tx, std::int64_t partitions,
                            std::map<ParamDomain, std::string> recipes, std::map<std::string, VersionRef> inputs = {},
                            std::int64_t base_seed = 100) {
  Dataset d;
  d.name = std::move(name);
  d.version = 1;
  d.transformation = tx.ref();
  d.recipes = std::move(recipes);
  d.partitions = partitions;
  d.base_seed = base_seed;
  d.seed_stride = 1;
  d.inputs = std::move(inputs);
  return d;
}

inline constexpr const char* kSite = "site.a";

/// Registers the site recipe and binds kSite.
inline void bind_default_site(Cookbook& cb) {
  cb.register_recipe(make_recipe("site.a.recipe", ParamDomain::Site, {{"workdir", std::string("/scratch/a")}}));
  cb.bind_site(kSite, "site.a.recipe");
}

/// evgen -> simul -> pileup -> digit, `partitions` each.
struct Chain {
  std::vector<Transformation> txs;
  std::vector<VersionRef> datasets;
};

inline Chain compose_chain(Cookbook& cb, std::int64_t partitions = 1, const std::string& prefix = "dc1") {
  Chain chain;
  cb.register_recipe(make_recipe(prefix + ".app", ParamDomain::App, {{"verbosity", std::int64_t{1}}}));
  for (std::size_t s = 0; s < 4; ++s) {
    std::vector<InputSlot> slots;
    if (s > 0) slots.push_back({"in", kSteps[s - 1]});
    auto tx = make_tx(prefix + "." + kSteps[s], kSteps[s], slots);
    cb.register_transformation(tx);
    const auto repro = prefix + ".repro." + kSteps[s];
    cb.register_recipe(make_recipe(repro, ParamDomain::Repro, {{"events", std::int64_t{2 + static_cast<std::int64_t>(s)}}}));
    std::map<std::string, VersionRef> inputs;
    if (s > 0) inputs["in"] = chain.datasets.back();
    const auto d = make_dataset(prefix + ".ds." + kSteps[s], tx, partitions,
                                {{ParamDomain::Repro, repro}, {ParamDomain::App, prefix + ".app"}}, inputs,
                                1000 * static_cast<std::int64_t>(s));
    cb.compose_dataset(d);
    chain.txs.push_back(tx);
    chain.datasets.push_back(d.ref());
  }
  return chain;
}

inline const Derivation& only_derivation(const Cookbook& cb, const VersionRef& ds, std::size_t i = 0) {
  return *cb.state().derivation(cb.state().dataset(ds)->derivations.at(i));
}

inline Provenance provenance_for(const std::string& ce, Digest digest, Timestamp when = at(0)) {
  return {ce, "nd00", "cc0", when, when, 0, 0, digest};
}

/// Claims and completes everything ready, running the simulated transform.
inline std::int64_t run_ready(Cookbook& cb, Planner& planner, sim::PayloadStore& store, const std::string& ce = "ce0",
                              Timestamp now = at(0)) {
  std::int64_t n = 0;
  while (auto job = planner.claim_next(ce, kSite, now)) {
    std::vector<std::vector<std::uint8_t>> inputs;
    for (const auto& in : job->derivation.inputs) inputs.push_back(store.at(in));
    auto out = sim::simulated_transform(job->derivation, inputs);
    planner.complete(job->derivation.id, ce, provenance_for(ce, out.digest, now));
    store[job->derivation.output] = std::move(out.payload);
    ++n;
  }
  (void)cb;
  return n;
}

/// A scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path() / "vdc-test-XXXXXX";
    std::string buf = base.string();
    if (::mkdtemp(buf.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = buf;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace vdc::test
