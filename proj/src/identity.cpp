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

#include "vdc/identity.hpp"

#include "vdc/error.hpp"

namespace vdc::identity {

using nlohmann::json;

Digest body_hash(const Transformation& tx) {
  auto schema = json::array();
  for (const auto& e : tx.schema.entries) schema.push_back(e);
  auto inputs = json::array();
  for (const auto& s : tx.inputs) inputs.push_back(json::array({s.slot, s.step}));
  const json doc{{"schema", std::move(schema)}, {"template", tx.recipe_template.text()}, {"inputs", std::move(inputs)}};
  return sha256(canonical_encode(doc));
}

json output_document(const Transformation& tx, const Bindings& repro, std::span<const ObjectId> inputs) {
  auto ids = json::array();
  for (const auto& id : inputs) ids.push_back(id.str());
  return json{{"transformation", {{"name", tx.name}, {"version", tx.version}, {"body_hash", tx.body_hash.hex()}}},
              {"repro", bindings_to_json(repro)},
              {"inputs", std::move(ids)}};
}

ObjectId derivation_output_id(const Transformation& tx, const Bindings& repro, std::span<const ObjectId> inputs) {
  for (const auto& [name, value] : repro) {
    if (is_implicit_param(name)) continue;
    const auto* entry = tx.schema.find(name);
    if (entry == nullptr || entry->domain != ParamDomain::Repro) {
      fail(ErrorKind::NonReproParam, "'" + name + "' is not a REPRO parameter of " + tx.ref().str());
    }
  }
  return ObjectId(sha256(canonical_encode(output_document(tx, repro, inputs))));
}

ObjectId derivation_id(const ObjectId& output) {
  return ObjectId(sha256(canonical_encode(json{{"derivation_of", output.str()}})));
}

std::int64_t partition_seed(std::int64_t base_seed, std::int64_t stride, std::int64_t index) {
  std::int64_t offset = 0;
  std::int64_t seed = 0;
  if (__builtin_mul_overflow(index, stride, &offset) || __builtin_add_overflow(base_seed, offset, &seed)) {
    fail(ErrorKind::SeedOverflow, "seed " + std::to_string(base_seed) + " + " + std::to_string(index) + "*" +
                                      std::to_string(stride) + " leaves the signed 64-bit range");
  }
  return seed;
}

namespace {

void check_expansion(const Dataset& d, std::span<const std::vector<ObjectId>> inputs) {
  if (d.partitions < 1) fail(ErrorKind::ZeroPartitions, "dataset " + d.ref().str() + " has no partitions");
  if (!inputs.empty() && static_cast<std::int64_t>(inputs.size()) != d.partitions) {
    fail(ErrorKind::InputMismatch, "input lists do not match the partition count");
  }
  // Seeds are linear in the index, so checking both ends covers the range.
  partition_seed(d.base_seed, d.seed_stride, 0);
  partition_seed(d.base_seed, d.seed_stride, d.partitions - 1);
}

PartitionEntry expand_one(const Dataset& d, const Transformation& tx, const BoundParams& base,
                          std::span<const std::vector<ObjectId>> inputs, std::int64_t i) {
  PartitionEntry e;
  e.index = i;
  e.params = base;
  e.params.repro[std::string(kPartitionIndexParam)] = i;
  e.params.repro[std::string(kRandomSeedParam)] = d.base_seed + i * d.seed_stride;
  const auto slot_inputs = inputs.empty() ? std::span<const ObjectId>{} : std::span(inputs[i]);
  e.output = ObjectId(sha256(canonical_encode(output_document(tx, e.params.repro, slot_inputs))));
  return e;
}

void check_repro_names(const Transformation& tx, const BoundParams& base) {
  // The per-partition hash skips the name check; do it once up front.
  derivation_output_id(tx, base.repro, {});
}

}  // namespace

std::vector<PartitionEntry> expand_partitions(const Dataset& d, const Transformation& tx, const BoundParams& base,
                                              std::span<const std::vector<ObjectId>> inputs) {
  check_expansion(d, inputs);
  check_repro_names(tx, base);
  std::vector<PartitionEntry> out(static_cast<std::size_t>(d.partitions));
  const std::int64_t n = d.partitions;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = expand_one(d, tx, base, inputs, i);
  }
  return out;
}

std::vector<PartitionEntry> expand_partitions_serial(const Dataset& d, const Transformation& tx,
                                                     const BoundParams& base,
                                                     std::span<const std::vector<ObjectId>> inputs) {
  check_expansion(d, inputs);
  check_repro_names(tx, base);
  std::vector<PartitionEntry> out;
  out.reserve(static_cast<std::size_t>(d.partitions));
  for (std::int64_t i = 0; i < d.partitions; ++i) out.push_back(expand_one(d, tx, base, inputs, i));
  return out;
}

}  // namespace vdc::identity
