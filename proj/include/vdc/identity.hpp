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
#include <span>
#include <vector>

#include "json.hpp"
#include "vdc/digest.hpp"
#include "vdc/model.hpp"

namespace vdc::identity {

/// SHA-256 over the canonical encoding of (schema, template text, inputs).
Digest body_hash(const Transformation& tx);

/// The canonical document hashed into an output id:
///   {"inputs":[...], "repro":{...},
///    "transformation":{"body_hash":hex,"name":...,"version":...}}
nlohmann::json output_document(const Transformation& tx, const Bindings& repro, std::span<const ObjectId> inputs);

/// Content address of a derivation's output. Only REPRO parameters (plus the
/// implicit partition parameters) are accepted; anything else raises
/// NonReproParam. `inputs` must follow the transformation's slot order.
ObjectId derivation_output_id(const Transformation& tx, const Bindings& repro, std::span<const ObjectId> inputs);

/// Catalog key of the derivation producing `output`. One-to-one with the
/// output id but hashed under a different tag so the two never collide.
ObjectId derivation_id(const ObjectId& output);

struct PartitionEntry {
  std::int64_t index = 0;
  BoundParams params;
  ObjectId output;
};

/// Seed of partition `index`; throws SeedOverflow outside signed 64-bit.
std::int64_t partition_seed(std::int64_t base_seed, std::int64_t stride, std::int64_t index);

/// One entry per partition of `d`: `base` plus partition_index and
/// random_seed merged into REPRO, and the resulting output id.
/// `inputs` is empty (no input slots) or holds one id list per partition.
/// Hashing runs as an OpenMP parallel loop.
std::vector<PartitionEntry> expand_partitions(const Dataset& d, const Transformation& tx, const BoundParams& base,
                                              std::span<const std::vector<ObjectId>> inputs = {});

/// Serial reference for expand_partitions; same results, one thread.
std::vector<PartitionEntry> expand_partitions_serial(const Dataset& d, const Transformation& tx,
                                                     const BoundParams& base,
                                                     std::span<const std::vector<ObjectId>> inputs = {});

}  // namespace vdc::identity
