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

#include "vdc/simnet.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "vdc/error.hpp"

namespace vdc::sim {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::int64_t kEpoch = 1'041'379'200;  // 2003-01-01T00:00:00Z, tick 0

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void put_be64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>(v);
    v >>= 8;
  }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  state += kGamma;
  return mix(state);
}

std::vector<std::uint8_t> generate_payload(std::uint64_t seed, std::int64_t events) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(events) * 16);
  std::uint8_t* data = out.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t e = 0; e < events; ++e) {
    // Output k (1-based) is mix(seed + k * gamma); event e uses 2e+1, 2e+2.
    const auto k = static_cast<std::uint64_t>(2 * e + 1);
    put_be64(data + 16 * e, mix(seed + k * kGamma));
    put_be64(data + 16 * e + 8, mix(seed + (k + 1) * kGamma));
  }
  return out;
}

std::vector<std::uint8_t> generate_payload_serial(std::uint64_t seed, std::int64_t events) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(events) * 16);
  std::uint64_t state = seed;
  for (std::int64_t e = 0; e < events; ++e) {
    put_be64(out.data() + 16 * e, splitmix64(state));
    put_be64(out.data() + 16 * e + 8, splitmix64(state));
  }
  return out;
}

std::uint64_t transform_seed(const Derivation& d, std::span<const std::vector<std::uint8_t>> input_payloads) {
  std::uint64_t seed = d.output.digest().prefix64();
  for (const auto& in : input_payloads) seed ^= sha256(in).prefix64();
  return seed;
}

TransformOutput simulated_transform(const Derivation& d, std::span<const std::vector<std::uint8_t>> input_payloads) {
  const auto it = d.params.repro.find("events");
  if (it == d.params.repro.end() || !std::holds_alternative<std::int64_t>(it->second) ||
      std::get<std::int64_t>(it->second) < 0) {
    fail(ErrorKind::MissingEventsParam, d.id.str() + " lacks a non-negative integer REPRO 'events'");
  }
  TransformOutput out;
  out.payload = generate_payload(transform_seed(d, input_payloads), std::get<std::int64_t>(it->second));
  out.digest = sha256(out.payload);
  return out;
}

namespace {

std::vector<std::vector<std::uint8_t>> gather_inputs(const Derivation& d, const PayloadStore& store) {
  std::vector<std::vector<std::uint8_t>> inputs;
  for (const auto& in : d.inputs) {
    const auto it = store.find(in);
    if (it == store.end()) fail(ErrorKind::UnknownObject, "no payload for input " + in.str());
    inputs.push_back(it->second);
  }
  return inputs;
}

}  // namespace

std::unordered_map<ObjectId, Digest, ObjectIdHash> execute_plan(Client& client, const MaterializationPlan& plan,
                                                                PayloadStore& store, const std::string& site) {
  std::unordered_map<ObjectId, Digest, ObjectIdHash> produced;
  for (const auto& stage : plan.stages) {
    for (const auto& id : stage) {
      const auto d = client.get("/v1/derivations/" + id.str()).get<Derivation>();
      auto out = simulated_transform(d, gather_inputs(d, store));
      produced[d.output] = out.digest;
      store[d.output] = std::move(out.payload);
      const Replica r{d.output, site, "vdc://" + site + "/" + d.output.digest().hex(), {}};
      try {
        client.post("/v1/replicas", json(r));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DuplicateReplica) throw;
      }
    }
  }
  return produced;
}

std::int64_t drain(Client& client, PayloadStore& store, const std::string& ce, const std::string& site,
                   const std::string& country, Timestamp now) {
  std::int64_t done = 0;
  while (auto job = client.claim(ce, site, now)) {
    const auto d = job->at("derivation").get<Derivation>();
    auto out = simulated_transform(d, gather_inputs(d, store));
    const Provenance prov{ce, site, country, now, now, 0, out.payload.size(), out.digest};
    store[d.output] = std::move(out.payload);
    client.complete(d.id, ce, prov);
    ++done;
  }
  return done;
}

// ---------------------------------------------------------------------------
// Configuration and report

void SimConfig::validate() const {
  const std::pair<const char*, std::int64_t> counts[] = {
      {"compute_elements", compute_elements}, {"network_domains", network_domains},
      {"countries", countries},               {"transformations", transformations},
      {"invocations", invocations},           {"datasets", datasets},
      {"claim_timeout", claim_timeout},       {"gc_period", gc_period},
      {"max_attempts", max_attempts},         {"min_job_ticks", min_job_ticks},
      {"max_ticks", max_ticks}};
  for (const auto& [name, v] : counts) {
    if (v < 1) fail(ErrorKind::InvalidConfig, std::string(name) + " must be positive");
  }
  if (max_job_ticks < min_job_ticks) fail(ErrorKind::InvalidConfig, "max_job_ticks < min_job_ticks");
  if (gc_period > claim_timeout) fail(ErrorKind::InvalidConfig, "gc_period exceeds claim_timeout");
  if (crash_downtime < 0) fail(ErrorKind::InvalidConfig, "crash_downtime must be non-negative");
  if (!(ce_crash_probability >= 0.0 && ce_crash_probability <= 1.0)) {
    fail(ErrorKind::InvalidConfig, "ce_crash_probability must lie in [0, 1]");
  }
  for (const auto& w : server_outage_windows) {
    if (w.start < 0 || w.duration < 0) fail(ErrorKind::InvalidConfig, "outage windows need non-negative ticks");
  }
}

SimConfig SimConfig::from_json(const json& j) {
  SimConfig c;
  c.compute_elements = j.value("compute_elements", c.compute_elements);
  c.network_domains = j.value("network_domains", c.network_domains);
  c.countries = j.value("countries", c.countries);
  c.transformations = j.value("transformations", c.transformations);
  c.invocations = j.value("invocations", c.invocations);
  c.datasets = j.value("datasets", c.datasets);
  c.ce_crash_probability = j.value("ce_crash_probability", c.ce_crash_probability);
  if (j.contains("server_outage_windows")) {
    for (const auto& w : j.at("server_outage_windows")) {
      c.server_outage_windows.push_back({require_int(w, "start"), require_int(w, "duration")});
    }
  }
  c.rng_seed = j.value("rng_seed", c.rng_seed);
  c.claim_timeout = j.value("claim_timeout", c.claim_timeout);
  c.gc_period = j.value("gc_period", c.gc_period);
  c.max_attempts = j.value("max_attempts", c.max_attempts);
  c.min_job_ticks = j.value("min_job_ticks", c.min_job_ticks);
  c.max_job_ticks = j.value("max_job_ticks", c.max_job_ticks);
  c.crash_downtime = j.value("crash_downtime", c.crash_downtime);
  c.max_ticks = j.value("max_ticks", c.max_ticks);
  return c;
}

json SimConfig::to_json() const {
  auto windows = json::array();
  for (const auto& w : server_outage_windows) windows.push_back({{"start", w.start}, {"duration", w.duration}});
  return json{{"compute_elements", compute_elements},
              {"network_domains", network_domains},
              {"countries", countries},
              {"transformations", transformations},
              {"invocations", invocations},
              {"datasets", datasets},
              {"ce_crash_probability", ce_crash_probability},
              {"server_outage_windows", std::move(windows)},
              {"rng_seed", rng_seed},
              {"claim_timeout", claim_timeout},
              {"gc_period", gc_period},
              {"max_attempts", max_attempts},
              {"min_job_ticks", min_job_ticks},
              {"max_job_ticks", max_job_ticks},
              {"crash_downtime", crash_downtime},
              {"max_ticks", max_ticks}};
}

json SimReport::to_json() const {
  auto datasets_json = json::array();
  for (const auto& d : per_dataset) {
    datasets_json.push_back({{"dataset", d.dataset},
                             {"step", d.step},
                             {"partitions", d.partitions},
                             {"completed", d.completed},
                             {"volume_bytes", d.volume_bytes},
                             {"vdc_managed", d.vdc_managed}});
  }
  return json{{"invocations", invocations},
              {"completed", completed},
              {"failed", failed},
              {"requeued", requeued},
              {"total_claims", total_claims},
              {"stuck_claimed", stuck_claimed},
              {"stuck_defined", stuck_defined},
              {"nondeterminism_incidents", nondeterminism_incidents},
              {"crashes_injected", crashes_injected},
              {"outage_rejected_requests", outage_rejected_requests},
              {"gc_sweeps", gc_sweeps},
              {"permanent_failure_fraction", permanent_failure_fraction},
              {"failure_fraction_per_claim", failure_fraction_per_claim},
              {"transformations", transformations},
              {"datasets", datasets},
              {"compute_elements", compute_elements},
              {"network_domains", network_domains},
              {"countries", countries},
              {"vdc_dataset_fraction", vdc_dataset_fraction},
              {"vdc_volume_fraction", vdc_volume_fraction},
              {"per_dataset", std::move(datasets_json)},
              {"simulated_ticks", simulated_ticks},
              {"wall_clock_ms", wall_clock_ms}};
}

bool operator==(const SimReport& a, const SimReport& b) {
  auto ja = a.to_json();
  auto jb = b.to_json();
  ja.erase("wall_clock_ms");
  jb.erase("wall_clock_ms");
  return ja == jb;
}

std::string SimReport::table() const {
  std::ostringstream out;
  char line[160];
  auto row = [&](const char* label, const std::string& value) {
    std::snprintf(line, sizeof line, "  %-30s %s\n", label, value.c_str());
    out << line;
  };
  auto num = [](auto v) { return std::to_string(v); };
  auto frac = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.6f", v);
    return std::string(b);
  };
  out << "Production entity counts\n";
  row("Data Transformation", num(transformations));
  row("Transformation Invocation", num(invocations));
  row("Compute Element", num(compute_elements));
  row("Network Domain", num(network_domains));
  row("Country", num(countries));
  row("Datasets", num(datasets));
  out << "Outcome\n";
  row("completed", num(completed));
  row("failed", num(failed));
  row("requeued", num(requeued));
  row("total claims", num(total_claims));
  row("stuck CLAIMED / DEFINED", num(stuck_claimed) + " / " + num(stuck_defined));
  row("CE crashes injected", num(crashes_injected));
  row("requests lost to outages", num(outage_rejected_requests));
  row("non-determinism incidents", num(nondeterminism_incidents));
  row("failure fraction / invocation", frac(permanent_failure_fraction));
  row("failure fraction / claim", frac(failure_fraction_per_claim));
  row("VDC-managed datasets", frac(vdc_dataset_fraction));
  row("VDC-managed volume", frac(vdc_volume_fraction));
  row("simulated ticks", num(simulated_ticks));
  row("wall clock (ms)", frac(wall_clock_ms));
  return out.str();
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

const char* const kSteps[] = {"evgen", "simul", "pileup", "digit"};

/// Fails every request while the simulated server is down.
class OutageGate final : public Transport {
 public:
  explicit OutageGate(Transport& inner) : inner_(inner) {}
  Reply call(std::string_view method, const std::string& path, const json& body) override {
    if (down) {
      ++rejected;
      fail(ErrorKind::ServerUnreachable, "server outage");
    }
    return inner_.call(method, path, body);
  }
  std::string describe() const override { return inner_.describe(); }

  bool down = false;
  std::int64_t rejected = 0;

 private:
  Transport& inner_;
};

struct PlannedDataset {
  VersionRef ref;
  std::string step;
  std::int64_t partitions = 0;
  std::int64_t events = 0;
  bool managed = false;
};

std::string padded(const char* prefix, std::int64_t i, int width) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%0*lld", prefix, width, static_cast<long long>(i));
  return buf;
}

json transformation_doc(std::int64_t j, std::size_t step_index) {
  const std::string step = kSteps[step_index];
  json schema = json::array({
      {{"name", "events"}, {"domain", "REPRO"}, {"type", "int"}, {"required", true}},
      {{"name", "random_seed"}, {"domain", "REPRO"}, {"type", "int"}, {"required", true}},
      {{"name", "channel"}, {"domain", "REPRO"}, {"type", "string"}, {"required", true}},
      {{"name", "verbosity"}, {"domain", "APP"}, {"type", "int"}, {"required", false}, {"default", 0}},
      {{"name", "workdir"}, {"domain", "SITE"}, {"type", "string"}, {"required", true}},
  });
  std::string body = "# DC1 " + step + " recipe, variant " + std::to_string(j) + "\n";
  json inputs = json::array();
  switch (step_index) {
    case 0:
      body += "dc1_evgen --channel=${channel} --seed=${random_seed} --events=${events}";
      break;
    case 1:
      schema.push_back({{"name", "geometry"}, {"domain", "REPRO"}, {"type", "string"}, {"required", false},
                        {"default", "DC1-initial"}});
      body += "dc1_simul --geometry=${geometry} --seed=${random_seed} --events=${events} --in=${workdir}/signal";
      inputs.push_back({{"slot", "signal"}, {"step", "evgen"}});
      break;
    case 2:
      schema.push_back({{"name", "luminosity"}, {"domain", "REPRO"}, {"type", "decimal"}, {"required", false},
                        {"default", "1.0"}});
      body += "dc1_pileup --luminosity=${luminosity} --seed=${random_seed} --events=${events} --in=${workdir}/hits";
      inputs.push_back({{"slot", "signal"}, {"step", "simul"}});
      break;
    default:
      schema.push_back({{"name", "noise"}, {"domain", "REPRO"}, {"type", "bool"}, {"required", false},
                        {"default", true}});
      body += "dc1_digit --noise=${noise} --seed=${random_seed} --events=${events} --in=${workdir}/pileup";
      inputs.push_back({{"slot", "hits"}, {"step", "pileup"}});
      break;
  }
  body += " --partition=${partition_index} --verbose=${verbosity}"
          " --out=${workdir}/${channel}." + step + ".${partition_index}.zebra\n";
  return json{{"name", padded((step + ".t").c_str(), j, 3)},
              {"version", 1},
              {"step", step},
              {"schema", std::move(schema)},
              {"template", std::move(body)},
              {"inputs", std::move(inputs)},
              {"consumed_internally", json::array({"channel"})}};
}

std::vector<PlannedDataset> setup_production(Client& client, const SimConfig& cfg, std::mt19937_64& rng) {
  const auto steps = static_cast<std::int64_t>(std::min<std::int64_t>(4, cfg.transformations));

  std::vector<std::vector<json>> by_step(static_cast<std::size_t>(steps));
  for (std::int64_t j = 0; j < cfg.transformations; ++j) {
    auto doc = transformation_doc(j, static_cast<std::size_t>(j % steps));
    client.post("/v1/transformations", doc);
    by_step[static_cast<std::size_t>(j % steps)].push_back(std::move(doc));
  }

  for (std::int64_t d = 0; d < cfg.network_domains; ++d) {
    const auto site = padded("nd", d, 2);
    const auto recipe = "dc1.site." + site;
    client.post("/v1/recipes", {{"name", recipe},
                                {"domain", "SITE"},
                                {"bindings", {{"workdir", "/grid/" + site + "/scratch"}}},
                                {"validated", true},
                                {"note", "site administrators"}});
    client.post("/v1/sites", {{"site", site}, {"recipe", recipe}});
  }
  for (const auto& [name, verbosity] : {std::pair{"dc1.app.quiet", 0}, std::pair{"dc1.app.verbose", 2}}) {
    client.post("/v1/recipes",
                {{"name", name}, {"domain", "APP"}, {"bindings", {{"verbosity", verbosity}}}, {"validated", true}});
  }

  const std::int64_t count = std::min(cfg.datasets, cfg.invocations);
  std::vector<std::int64_t> partitions(static_cast<std::size_t>(count), 1);
  for (std::int64_t r = 0; r < cfg.invocations - count; ++r) ++partitions[rng() % static_cast<std::uint64_t>(count)];

  std::vector<PlannedDataset> planned;
  for (std::int64_t k = 0; k < count; ++k) {
    const auto s = static_cast<std::size_t>(k % steps);
    const auto chain = k / steps;
    const auto& candidates = by_step[s];
    const auto& tx = candidates[static_cast<std::size_t>(chain) % candidates.size()];

    PlannedDataset p;
    p.ref = {padded("dc1.ds", k, 3), 1};
    p.step = tx.at("step").get<std::string>();
    p.partitions = partitions[static_cast<std::size_t>(k)];
    // Half the datasets are labeled VDC-managed and carry a quarter of the
    // per-event size of the rest: ~50% of datasets, ~20% of volume.
    p.managed = k % 2 == 0;
    p.events = p.managed ? 1 : 4;

    const auto repro = padded("dc1.repro.ds", k, 3);
    client.post("/v1/recipes", {{"name", repro},
                                {"domain", "REPRO"},
                                {"bindings", {{"events", p.events}, {"channel", padded("ch", chain, 3)}}},
                                {"validated", true},
                                {"note", "production gurus"}});
    json dataset{{"name", p.ref.name},
                 {"version", 1},
                 {"transformation", {{"name", tx.at("name")}, {"version", 1}}},
                 {"recipes", {{"REPRO", repro}, {"APP", k % 3 == 0 ? "dc1.app.verbose" : "dc1.app.quiet"}}},
                 {"partitions", p.partitions},
                 {"base_seed", k * 1'000'003},
                 {"seed_stride", 1}};
    if (s > 0) dataset["inputs"] = {{tx.at("inputs")[0].at("slot"), planned.back().ref}};
    client.post("/v1/datasets", dataset);
    planned.push_back(std::move(p));
  }
  return planned;
}

struct Agent {
  enum class Mode { Idle, Running, Down };
  std::string id;
  std::string site;
  std::string country;
  Mode mode = Mode::Idle;
  std::int64_t busy_until = 0;
  Derivation job;
  TransformOutput output;
  std::int64_t started = 0;
};

bool in_outage(const SimConfig& cfg, std::int64_t tick) {
  return std::any_of(cfg.server_outage_windows.begin(), cfg.server_outage_windows.end(),
                     [&](const OutageWindow& w) { return tick >= w.start && tick < w.start + w.duration; });
}

}  // namespace

SimReport run_simulation(const SimConfig& cfg, Transport* remote) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();

  // A shared server keeps wall-clock claims; anchor ticks there so its own
  // sweeps and ours agree on claim age.
  const std::int64_t epoch = remote == nullptr ? kEpoch : to_unix(wall_clock_now());
  std::int64_t tick = 0;
  auto tick_time = [&tick, epoch] { return from_unix(epoch + tick); };

  std::unique_ptr<Service> local;
  std::unique_ptr<LocalTransport> local_transport;
  if (remote == nullptr) {
    const PlannerConfig planner{Duration{cfg.claim_timeout}, cfg.max_attempts, Duration{cfg.gc_period}};
    local = std::make_unique<Service>(planner, tick_time);
    local_transport = std::make_unique<LocalTransport>(*local);
  }
  Transport& transport = remote != nullptr ? *remote : *local_transport;
  OutageGate gate(transport);
  Client client(gate);

  client.get("/v1/status");  // ServerUnreachable surfaces here
  std::mt19937_64 rng(cfg.rng_seed);
  const auto planned = setup_production(client, cfg, rng);

  std::vector<Agent> agents(static_cast<std::size_t>(cfg.compute_elements));
  for (std::int64_t i = 0; i < cfg.compute_elements; ++i) {
    auto& a = agents[static_cast<std::size_t>(i)];
    a.id = padded("ce", i, 4);
    a.site = padded("nd", i % cfg.network_domains, 2);
    a.country = padded("cc", i % cfg.countries, 1);
  }
  std::vector<std::size_t> order(agents.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  sim::PayloadStore store;
  SimReport report;

  for (tick = 0; tick <= cfg.max_ticks; ++tick) {
    gate.down = in_outage(cfg, tick);
    if (!gate.down && tick % cfg.gc_period == 0) {
      const auto swept = client.post("/v1/gc", {{"now", format_rfc3339(tick_time())}});
      report.requeued += static_cast<std::int64_t>(swept.at("requeued").size());
      ++report.gc_sweeps;
    }
    if (!gate.down) {
      const auto status = client.get("/v1/status");
      const auto& counts = status.at("derivations");
      if (counts.at("DEFINED").get<std::int64_t>() + counts.at("CLAIMED").get<std::int64_t>() == 0) break;
    }

    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (const auto idx : order) {
      auto& a = agents[idx];
      switch (a.mode) {
        case Agent::Mode::Down:
          if (tick >= a.busy_until) a.mode = Agent::Mode::Idle;
          break;
        case Agent::Mode::Running: {
          if (tick < a.busy_until) break;
          const Provenance prov{a.id,       a.site, a.country, from_unix(epoch + a.started), tick_time(), 0,
                                a.output.payload.size(), a.output.digest};
          try {
            client.complete(a.job.id, a.id, prov);
            store[a.job.output] = std::move(a.output.payload);
            a.mode = Agent::Mode::Idle;
          } catch (const Error& e) {
            if (e.kind() == ErrorKind::ServerUnreachable) break;  // retry next tick
            a.mode = Agent::Mode::Idle;                          // claim superseded; drop the result
          }
          break;
        }
        case Agent::Mode::Idle: {
          std::optional<json> claimed;
          try {
            claimed = client.claim(a.id, a.site, tick_time());
          } catch (const Error& e) {
            if (e.kind() == ErrorKind::ServerUnreachable) break;
            throw;
          }
          if (!claimed) break;
          ++report.total_claims;
          if (cfg.ce_crash_probability > 0.0 && uniform() < cfg.ce_crash_probability) {
            // Claimed but never reported; only the planner's sweep recovers it.
            ++report.crashes_injected;
            a.mode = Agent::Mode::Down;
            a.busy_until = tick + cfg.crash_downtime;
            break;
          }
          a.job = claimed->at("derivation").get<Derivation>();
          std::vector<std::vector<std::uint8_t>> inputs;
          for (const auto& in : a.job.inputs) {
            const auto it = store.find(in);
            if (it == store.end()) break;
            inputs.push_back(it->second);
          }
          if (inputs.size() != a.job.inputs.size()) {
            // Produced outside this run; its payload is not held here.
            try {
              client.post("/v1/derivations/" + a.job.id.str() + "/fail",
                          {{"ce_id", a.id}, {"reason", "input payload unavailable"}});
            } catch (const Error&) {
            }
            break;
          }
          a.output = simulated_transform(a.job, inputs);
          a.started = tick;
          const auto span = cfg.max_job_ticks - cfg.min_job_ticks + 1;
          a.busy_until = tick + cfg.min_job_ticks + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(span));
          a.mode = Agent::Mode::Running;
          break;
        }
      }
    }
  }
  report.simulated_ticks = tick;
  gate.down = false;
  report.outage_rejected_requests = gate.rejected;

  // Tally from the catalog; linked derivations count once.
  std::set<std::string> seen;
  std::uint64_t total_volume = 0;
  std::uint64_t managed_volume = 0;
  std::int64_t managed = 0;
  for (const auto& p : planned) {
    const auto listing = client.get("/v1/datasets/" + p.ref.name + "/" + std::to_string(p.ref.version) + "/derivations");
    DatasetCompletion dc{p.ref, p.step, p.partitions, 0, 0, p.managed};
    for (const auto& d : listing.at("derivations")) {
      const auto state = parse_state(d.at("state").get<std::string>());
      if (state == DerivationState::Completed) ++dc.completed;
      if (!seen.insert(d.at("id").get<std::string>()).second) continue;
      ++report.invocations;
      switch (state) {
        case DerivationState::Completed:
          ++report.completed;
          break;
        case DerivationState::Failed:
          ++report.failed;
          break;
        case DerivationState::Claimed:
          ++report.stuck_claimed;
          break;
        case DerivationState::Defined:
          ++report.stuck_defined;
          break;
      }
    }
    dc.volume_bytes = static_cast<std::uint64_t>(p.partitions * p.events * 16);
    total_volume += dc.volume_bytes;
    if (p.managed) {
      managed_volume += dc.volume_bytes;
      ++managed;
    }
    report.per_dataset.push_back(std::move(dc));
  }

  const auto status = client.get("/v1/status");
  report.transformations = status.at("transformations").get<std::int64_t>();
  report.datasets = static_cast<std::int64_t>(planned.size());
  report.compute_elements = status.at("compute_elements").get<std::int64_t>();
  report.network_domains = status.at("network_domains").get<std::int64_t>();
  report.countries = status.at("countries").get<std::int64_t>();
  report.nondeterminism_incidents = status.at("incidents").get<std::int64_t>();

  if (report.invocations > 0) {
    report.permanent_failure_fraction = static_cast<double>(report.failed) / static_cast<double>(report.invocations);
  }
  if (report.total_claims > 0) {
    report.failure_fraction_per_claim = static_cast<double>(report.failed) / static_cast<double>(report.total_claims);
  }
  if (!planned.empty()) report.vdc_dataset_fraction = static_cast<double>(managed) / static_cast<double>(planned.size());
  if (total_volume > 0) {
    report.vdc_volume_fraction = static_cast<double>(managed_volume) / static_cast<double>(total_volume);
  }
  report.wall_clock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start).count();
  return report;
}

}  // namespace vdc::sim
