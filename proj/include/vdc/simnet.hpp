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
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "vdc/model.hpp"
#include "vdc/planner.hpp"
#include "vdc/server.hpp"

namespace vdc::sim {

/// Advances `state` by the golden gamma and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// `events` x 16 bytes: two successive splitmix64 outputs per event, each
/// big-endian. Each event's outputs are computed by jumping the state
/// directly, so events fill in parallel.
std::vector<std::uint8_t> generate_payload(std::uint64_t seed, std::int64_t events);
/// Serial reference for generate_payload.
std::vector<std::uint8_t> generate_payload_serial(std::uint64_t seed, std::int64_t events);

struct TransformOutput {
  std::vector<std::uint8_t> payload;
  Digest digest;
};

/// Seed of the stand-in transformation: the first eight bytes of the output
/// id digest, XOR-folded with the first eight bytes of each input payload's
/// SHA-256.
std::uint64_t transform_seed(const Derivation& d, std::span<const std::vector<std::uint8_t>> input_payloads);

/// Deterministic stand-in for a physics application. Requires an integer
/// REPRO parameter `events` >= 0 (MissingEventsParam otherwise).
TransformOutput simulated_transform(const Derivation& d, std::span<const std::vector<std::uint8_t>> input_payloads);

using PayloadStore = std::unordered_map<ObjectId, std::vector<std::uint8_t>, ObjectIdHash>;

/// Runs a materialization plan stage by stage on the caller's machine,
/// registering a replica at `site` for every produced object. Inputs come
/// from `store`; outputs are added to it. Returns the produced digests.
std::unordered_map<ObjectId, Digest, ObjectIdHash> execute_plan(Client& client, const MaterializationPlan& plan,
                                                                PayloadStore& store, const std::string& site);

/// Single synchronous compute element: claims and completes work until
/// nothing is ready. Returns the number of completions.
std::int64_t drain(Client& client, PayloadStore& store, const std::string& ce, const std::string& site,
                   const std::string& country, Timestamp now);

struct OutageWindow {
  std::int64_t start = 0;  // tick
  std::int64_t duration = 0;
};

struct SimConfig {
  std::int64_t compute_elements = 700;
  std::int64_t network_domains = 32;
  std::int64_t countries = 8;
  std::int64_t transformations = 100;
  std::int64_t invocations = 8000;
  std::int64_t datasets = 200;
  double ce_crash_probability = 0.0;
  std::vector<OutageWindow> server_outage_windows;
  std::uint64_t rng_seed = 2003;

  // Planner and time model, in ticks (one tick is one simulated second).
  std::int64_t claim_timeout = 10;
  std::int64_t gc_period = 5;
  std::int64_t max_attempts = 10;
  std::int64_t min_job_ticks = 1;
  std::int64_t max_job_ticks = 3;
  std::int64_t crash_downtime = 5;
  std::int64_t max_ticks = 1'000'000;

  /// Throws InvalidConfig on non-positive counts or a probability outside
  /// [0, 1].
  void validate() const;
  static SimConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct DatasetCompletion {
  VersionRef dataset;
  std::string step;
  std::int64_t partitions = 0;
  std::int64_t completed = 0;
  std::uint64_t volume_bytes = 0;
  bool vdc_managed = false;
};

struct SimReport {
  std::int64_t invocations = 0;
  std::int64_t completed = 0;
  std::int64_t failed = 0;
  std::int64_t requeued = 0;
  std::int64_t total_claims = 0;
  std::int64_t stuck_claimed = 0;
  std::int64_t stuck_defined = 0;
  std::int64_t nondeterminism_incidents = 0;
  std::int64_t crashes_injected = 0;
  std::int64_t outage_rejected_requests = 0;
  std::int64_t gc_sweeps = 0;
  double permanent_failure_fraction = 0.0;  // failed / invocations
  double failure_fraction_per_claim = 0.0;  // failed / total claims

  std::int64_t transformations = 0;
  std::int64_t datasets = 0;
  std::int64_t compute_elements = 0;
  std::int64_t network_domains = 0;
  std::int64_t countries = 0;

  // The "VDC-managed" label covers every other dataset, sized so that about
  // half the datasets carry about a fifth of the volume.
  double vdc_dataset_fraction = 0.0;
  double vdc_volume_fraction = 0.0;
  std::vector<DatasetCompletion> per_dataset;

  std::int64_t simulated_ticks = 0;
  double wall_clock_ms = 0.0;  // excluded from equality

  nlohmann::json to_json() const;
  std::string table() const;
  friend bool operator==(const SimReport& a, const SimReport& b);
};

/// Runs the production simulation against `remote`, or against a fresh
/// in-process server when `remote` is null. Deterministic for a given
/// config (wall_clock_ms aside).
SimReport run_simulation(const SimConfig& config, Transport* remote = nullptr);

}  // namespace vdc::sim
