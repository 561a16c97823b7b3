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

#include "vdc/cookbook.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vdc/error.hpp"
#include "vdc/identity.hpp"

namespace vdc {

using nlohmann::json;

namespace {

const std::vector<Replica> kNoReplicas;

bool valid_catalog_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '-' || c == '.';
  });
}

json make_event(std::string_view tag, json payload) {
  return json{{"event", tag}, {"payload", std::move(payload)}};
}

std::string io_error(const std::string& what, const std::filesystem::path& path) {
  return what + " '" + path.string() + "': " + std::strerror(errno);
}

}  // namespace

// ---------------------------------------------------------------------------
// CatalogState

const Transformation* CatalogState::transformation(const VersionRef& ref) const {
  const auto it = transformations_.find(ref);
  return it == transformations_.end() ? nullptr : &it->second;
}

const Recipe* CatalogState::recipe(const std::string& name) const {
  const auto it = recipes_.find(name);
  return it == recipes_.end() ? nullptr : &it->second;
}

const DatasetRecord* CatalogState::dataset(const VersionRef& ref) const {
  const auto it = datasets_.find(ref);
  return it == datasets_.end() ? nullptr : &it->second;
}

const DatasetRecord* CatalogState::latest_dataset(const std::string& name) const {
  // Versions of one name are adjacent in the map; the last one is the latest.
  auto it = datasets_.upper_bound(VersionRef{name, INT64_MAX});
  if (it == datasets_.begin()) return nullptr;
  --it;
  return it->first.name == name ? &it->second : nullptr;
}

const Derivation* CatalogState::derivation(const ObjectId& id) const {
  const auto it = derivations_.find(id);
  return it == derivations_.end() ? nullptr : &it->second;
}

const Derivation* CatalogState::producer_of(const ObjectId& output) const {
  const auto it = by_output_.find(output);
  return it == by_output_.end() ? nullptr : derivation(it->second);
}

const std::vector<Replica>& CatalogState::replicas(const ObjectId& object) const {
  const auto it = replicas_.find(object);
  return it == replicas_.end() ? kNoReplicas : it->second;
}

std::optional<std::string> CatalogState::site_recipe(const std::string& site) const {
  const auto it = site_recipes_.find(site);
  if (it == site_recipes_.end()) return std::nullopt;
  return it->second;
}

Derivation& CatalogState::mutable_derivation(const ObjectId& id) {
  const auto it = derivations_.find(id);
  if (it == derivations_.end()) fail(ErrorKind::CorruptRecord, "unknown derivation " + id.str());
  return it->second;
}

void CatalogState::refresh_readiness(Derivation& d) {
  const std::pair key{d.seq, d.id};
  if (d.state != DerivationState::Defined) {
    ready_.erase(key);
    return;
  }
  const bool inputs_ready =
      std::all_of(d.inputs.begin(), d.inputs.end(), [&](const ObjectId& in) { return available(in); });
  if (inputs_ready) {
    ready_.insert(key);
  } else {
    ready_.erase(key);
  }
}

void CatalogState::set_state(Derivation& d, DerivationState next) {
  --state_counts_[static_cast<std::size_t>(d.state)];
  ++state_counts_[static_cast<std::size_t>(next)];
  const std::pair key{d.seq, d.id};
  if (d.state == DerivationState::Claimed) claimed_.erase(key);
  if (next == DerivationState::Claimed) claimed_.insert(key);
  if (next != DerivationState::Claimed) d.claim.reset();
  d.state = next;
  refresh_readiness(d);
}

void CatalogState::add_replica(const Replica& r) {
  auto& list = replicas_[r.object];
  const bool duplicate = std::any_of(list.begin(), list.end(),
                                     [&](const Replica& x) { return x.site == r.site && x.uri == r.uri; });
  if (duplicate) return;
  list.push_back(r);
  ++replica_count_;
  if (list.size() == 1) on_object_available(r.object);
}

void CatalogState::on_object_available(const ObjectId& object) {
  const auto it = consumers_.find(object);
  if (it == consumers_.end()) return;
  for (const auto& id : it->second) refresh_readiness(mutable_derivation(id));
}

void CatalogState::on_object_unavailable(const ObjectId& object) {
  const auto it = consumers_.find(object);
  if (it == consumers_.end()) return;
  for (const auto& id : it->second) refresh_readiness(mutable_derivation(id));
}

void CatalogState::apply(const json& event) {
  const std::string tag = require_string(event, "event");
  const json& p = require_field(event, "payload");

  if (tag == "transformation_registered") {
    auto t = p.get<Transformation>();
    t.body_hash = identity::body_hash(t);
    const auto ref = t.ref();
    if (!transformations_.emplace(ref, std::move(t)).second) {
      fail(ErrorKind::CorruptRecord, "transformation " + ref.str() + " registered twice");
    }
  } else if (tag == "recipe_registered") {
    auto r = p.get<Recipe>();
    const auto name = r.name;
    if (!recipes_.emplace(name, std::move(r)).second) fail(ErrorKind::CorruptRecord, "recipe " + name + " twice");
  } else if (tag == "recipe_validated") {
    const auto it = recipes_.find(require_string(p, "name"));
    if (it == recipes_.end()) fail(ErrorKind::CorruptRecord, "validation of unknown recipe");
    it->second.validated = true;
    it->second.note = p.value("note", std::string{});
  } else if (tag == "site_bound") {
    site_recipes_[require_string(p, "site")] = require_string(p, "recipe");
  } else if (tag == "dataset_composed") {
    DatasetRecord rec;
    rec.definition = require_field(p, "dataset").get<Dataset>();
    rec.created_order = static_cast<std::int64_t>(datasets_.size());
    rec.derivations = require_field(p, "derivations").get<std::vector<ObjectId>>();
    for (const auto& dj : require_field(p, "new")) {
      auto d = dj.get<Derivation>();
      d.seq = next_seq_++;
      d.state = DerivationState::Defined;
      d.attempts = 0;
      d.claim.reset();
      d.claim_history.clear();
      d.provenance.reset();
      d.failure_reason.clear();
      const auto id = d.id;
      if (derivations_.contains(id)) fail(ErrorKind::CorruptRecord, "derivation " + id.str() + " defined twice");
      by_output_[d.output] = id;
      for (const auto& in : d.inputs) consumers_[in].push_back(id);
      ++state_counts_[static_cast<std::size_t>(DerivationState::Defined)];
      auto& stored = derivations_.emplace(id, std::move(d)).first->second;
      refresh_readiness(stored);
      ++rec.created;
    }
    for (const auto& id : rec.derivations) {
      if (!derivations_.contains(id)) fail(ErrorKind::CorruptRecord, "dataset links unknown derivation " + id.str());
    }
    rec.linked = static_cast<std::int64_t>(rec.derivations.size()) - rec.created;
    const auto ref = rec.definition.ref();
    if (!datasets_.emplace(ref, std::move(rec)).second) {
      fail(ErrorKind::CorruptRecord, "dataset " + ref.str() + " composed twice");
    }
  } else if (tag == "derivation_claimed") {
    auto& d = mutable_derivation(require_field(p, "id").get<ObjectId>());
    if (d.state != DerivationState::Defined) fail(ErrorKind::CorruptRecord, "claim of non-DEFINED derivation");
    ClaimInfo c{require_string(p, "ce"), require_string(p, "site"), parse_rfc3339(require_string(p, "at"))};
    ces_.insert(c.ce);
    d.claim_history.push_back(c);
    ++d.attempts;
    set_state(d, DerivationState::Claimed);
    d.claim = std::move(c);
  } else if (tag == "derivation_completed") {
    auto& d = mutable_derivation(require_field(p, "id").get<ObjectId>());
    if (d.state != DerivationState::Claimed) fail(ErrorKind::CorruptRecord, "completion of unclaimed derivation");
    d.provenance = require_field(p, "provenance").get<Provenance>();
    if (!d.provenance->network_domain.empty()) domains_.insert(d.provenance->network_domain);
    if (!d.provenance->country.empty()) countries_.insert(d.provenance->country);
    set_state(d, DerivationState::Completed);
    add_replica(require_field(p, "replica").get<Replica>());
  } else if (tag == "completion_incident") {
    incidents_.push_back(p.get<NonDeterminismIncident>());
  } else if (tag == "derivation_requeued") {
    auto& d = mutable_derivation(require_field(p, "id").get<ObjectId>());
    if (d.state != DerivationState::Claimed) fail(ErrorKind::CorruptRecord, "requeue of unclaimed derivation");
    set_state(d, DerivationState::Defined);
  } else if (tag == "derivation_failed") {
    auto& d = mutable_derivation(require_field(p, "id").get<ObjectId>());
    if (d.state != DerivationState::Claimed) fail(ErrorKind::CorruptRecord, "failure of unclaimed derivation");
    d.failure_reason = p.value("reason", std::string{});
    set_state(d, DerivationState::Failed);
  } else if (tag == "derivation_retried") {
    auto& d = mutable_derivation(require_field(p, "id").get<ObjectId>());
    if (d.state != DerivationState::Failed) fail(ErrorKind::CorruptRecord, "retry of non-FAILED derivation");
    d.attempts = 0;
    d.failure_reason.clear();
    set_state(d, DerivationState::Defined);
  } else if (tag == "replica_registered") {
    add_replica(p.get<Replica>());
  } else if (tag == "replicas_removed") {
    const auto object = require_field(p, "object_id").get<ObjectId>();
    const auto it = replicas_.find(object);
    if (it != replicas_.end()) {
      replica_count_ -= static_cast<std::int64_t>(it->second.size());
      replicas_.erase(it);
      on_object_unavailable(object);
    }
  } else {
    fail(ErrorKind::CorruptRecord, "unknown event type '" + tag + "'");
  }
}

std::string CatalogState::serialize() const {
  json doc;
  auto& txs = doc["transformations"] = json::array();
  for (const auto& [ref, t] : transformations_) txs.push_back(t);
  auto& recipes = doc["recipes"] = json::array();
  for (const auto& [name, r] : recipes_) recipes.push_back(r);
  auto& datasets = doc["datasets"] = json::array();
  for (const auto& [ref, rec] : datasets_) {
    datasets.push_back({{"definition", rec.definition},
                        {"order", rec.created_order},
                        {"derivations", rec.derivations},
                        {"created", rec.created},
                        {"linked", rec.linked}});
  }
  std::map<ObjectId, const Derivation*> sorted;
  for (const auto& [id, d] : derivations_) sorted.emplace(id, &d);
  auto& derivations = doc["derivations"] = json::array();
  for (const auto& [id, d] : sorted) derivations.push_back(*d);
  auto& replicas = doc["replicas"] = json::array();
  for (const auto& [object, list] : replicas_) {
    for (const auto& r : list) replicas.push_back(r);
  }
  doc["sites"] = site_recipes_;
  doc["incidents"] = incidents_;
  doc["next_seq"] = next_seq_;
  return canonical_encode(doc);
}

// ---------------------------------------------------------------------------
// Journal

Journal::Journal(std::filesystem::path path, std::uint64_t valid_bytes, std::int64_t last_seq, bool sync)
    : path_(std::move(path)), last_seq_(last_seq), sync_(sync) {
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) fail(ErrorKind::IoError, io_error("cannot open journal", path_));
  if (::ftruncate(fd_, static_cast<off_t>(valid_bytes)) != 0) {
    fail(ErrorKind::IoError, io_error("cannot truncate torn journal tail", path_));
  }
  if (valid_bytes > 0) {
    char last = '\n';
    if (::pread(fd_, &last, 1, static_cast<off_t>(valid_bytes - 1)) == 1 && last != '\n') {
      if (::write(fd_, "\n", 1) != 1) fail(ErrorKind::IoError, io_error("cannot terminate journal", path_));
    }
  }
}

Journal::~Journal() {
  if (fd_ >= 0) ::close(fd_);
}

std::int64_t Journal::append(const json& event, Timestamp ts) {
  const std::int64_t seq = last_seq_ + 1;
  json record = event;
  record["seq"] = seq;
  record["ts"] = format_rfc3339(ts);
  std::string line = canonical_encode(record);
  line.push_back('\n');
  const char* data = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    const auto n = ::write(fd_, data, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorKind::IoError, io_error("journal write failed", path_));
    }
    data += n;
    left -= static_cast<std::size_t>(n);
  }
  if (sync_ && ::fdatasync(fd_) != 0) fail(ErrorKind::IoError, io_error("journal sync failed", path_));
  last_seq_ = seq;
  return seq;
}

ReplayResult journal_replay(const std::filesystem::path& path) {
  ReplayResult result;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return result;
    fail(ErrorKind::IoError, io_error("cannot read journal", path));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    ++line_no;
    const auto nl = content.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const auto end = terminated ? nl : content.size();
    const std::string_view line(content.data() + pos, end - pos);
    const std::size_t next = terminated ? nl + 1 : content.size();
    if (line.empty()) {
      pos = next;
      result.valid_bytes = next;
      continue;
    }

    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      if (!terminated) {
        result.dropped_torn_tail = true;
        break;
      }
      fail(ErrorKind::CorruptRecord, "line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      const auto seq = require_int(record, "seq");
      if (seq <= result.last_seq) {
        fail(ErrorKind::CorruptRecord, "sequence number " + std::to_string(seq) + " is not increasing");
      }
      result.state.apply(record);
      result.last_seq = seq;
    } catch (const Error& e) {
      fail(ErrorKind::CorruptRecord, "line " + std::to_string(line_no) + ": " + e.detail());
    } catch (const json::exception& e) {
      fail(ErrorKind::CorruptRecord, "line " + std::to_string(line_no) + ": " + e.what());
    }
    ++result.records;
    pos = next;
    result.valid_bytes = next;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Cookbook

Cookbook::Cookbook() = default;

Cookbook::Cookbook(const std::filesystem::path& journal_path, bool sync, Clock clock) : clock_(std::move(clock)) {
  auto replay = journal_replay(journal_path);
  state_ = std::move(replay.state);
  journal_ = std::make_unique<Journal>(journal_path, replay.valid_bytes, replay.last_seq, sync);
}

Cookbook::~Cookbook() = default;
Cookbook::Cookbook(Cookbook&&) noexcept = default;
Cookbook& Cookbook::operator=(Cookbook&&) noexcept = default;

void Cookbook::commit(json event) {
  if (journal_) journal_->append(event, clock_());
  state_.apply(event);
}

void Cookbook::validate_transformation(const Transformation& t) {
  if (!valid_catalog_name(t.name)) fail(ErrorKind::InvalidSchema, "invalid transformation name '" + t.name + "'");
  if (t.version < 1) fail(ErrorKind::InvalidSchema, "version must be positive");
  if (t.step.empty()) fail(ErrorKind::InvalidSchema, "pipeline step label is empty");
  t.schema.validate();

  std::set<std::string_view> slots;
  for (const auto& s : t.inputs) {
    if (!is_identifier(s.slot) || !slots.insert(s.slot).second || s.step.empty()) {
      fail(ErrorKind::InvalidSchema, "bad or duplicate input slot '" + s.slot + "'");
    }
  }
  for (const auto& name : t.consumed_internally) {
    if (t.schema.find(name) == nullptr) {
      fail(ErrorKind::InvalidSchema, "consumed_internally names unknown parameter '" + name + "'");
    }
  }
  for (const auto& name : t.recipe_template.placeholders()) {
    if (t.schema.find(name) == nullptr && !is_implicit_param(name)) {
      fail(ErrorKind::SchemaTemplateMismatch, "placeholder ${" + name + "} is not in the schema");
    }
  }
  for (const auto& e : t.schema.entries) {
    if (!e.required) continue;
    const bool housed = t.recipe_template.has_placeholder(e.name) ||
                        std::find(t.consumed_internally.begin(), t.consumed_internally.end(), e.name) !=
                            t.consumed_internally.end();
    if (!housed) {
      fail(ErrorKind::SchemaTemplateMismatch,
           "required parameter '" + e.name + "' is neither a placeholder nor consumed internally");
    }
  }
}

VersionRef Cookbook::register_transformation(Transformation t) {
  validate_transformation(t);
  const auto ref = t.ref();
  if (state_.transformation(ref) != nullptr) fail(ErrorKind::DuplicateVersion, ref.str() + " already registered");
  commit(make_event("transformation_registered", json(t)));
  return ref;
}

std::string Cookbook::register_recipe(Recipe r) {
  if (!valid_catalog_name(r.name)) fail(ErrorKind::BadRequest, "invalid recipe name '" + r.name + "'");
  if (r.bindings.empty()) fail(ErrorKind::EmptyBindings, "recipe '" + r.name + "' binds nothing");
  for (const auto& [name, value] : r.bindings) {
    if (!is_identifier(name)) fail(ErrorKind::BadRequest, "invalid parameter name '" + name + "'");
  }
  if (state_.recipe(r.name) != nullptr) fail(ErrorKind::DuplicateName, "recipe '" + r.name + "' exists");
  commit(make_event("recipe_registered", json(r)));
  return r.name;
}

void Cookbook::mark_validated(const std::string& name, const std::string& note) {
  if (state_.recipe(name) == nullptr) fail(ErrorKind::UnknownRecipe, "no recipe '" + name + "'");
  commit(make_event("recipe_validated", {{"name", name}, {"note", note}}));
}

void Cookbook::bind_site(const std::string& site, const std::string& recipe) {
  if (site.empty()) fail(ErrorKind::BadRequest, "site name is empty");
  const auto* r = state_.recipe(recipe);
  if (r == nullptr) fail(ErrorKind::UnknownRecipe, "no recipe '" + recipe + "'");
  if (r->domain != ParamDomain::Site) fail(ErrorKind::DomainViolation, "recipe '" + recipe + "' is not SITE-domain");
  const auto current = state_.site_recipe(site);
  if (current && *current == recipe) return;
  commit(make_event("site_bound", {{"site", site}, {"recipe", recipe}}));
}

BoundParams Cookbook::resolve_bindings(const Dataset& d, const Transformation& tx) const {
  BoundParams out;
  for (const auto& e : tx.schema.entries) {
    if (e.default_value && !is_implicit_param(e.name)) out.of(e.domain)[e.name] = *e.default_value;
  }
  auto bind = [&](const std::string& name, const ParamValue& value, std::optional<ParamDomain> expected,
                  const std::string& source) {
    if (is_implicit_param(name)) {
      fail(ErrorKind::DomainViolation, source + " binds '" + name + "', which is set per partition");
    }
    const auto* entry = tx.schema.find(name);
    if (entry == nullptr) {
      fail(ErrorKind::DomainViolation, source + " binds '" + name + "', unknown to " + tx.ref().str());
    }
    if (expected && entry->domain != *expected) {
      fail(ErrorKind::DomainViolation, source + " (" + std::string(to_string(*expected)) + ") binds '" + name +
                                           "', a " + std::string(to_string(entry->domain)) + " parameter");
    }
    if (!matches_type(value, entry->type)) {
      fail(ErrorKind::IncompleteBindings,
           "'" + name + "' from " + source + " is not of type " + std::string(to_string(entry->type)));
    }
    out.of(entry->domain)[name] = value;
  };

  for (const auto& [domain, name] : d.recipes) {
    const auto* r = state_.recipe(name);
    if (r == nullptr) fail(ErrorKind::UnknownReference, "no recipe '" + name + "'");
    if (r->domain != domain) {
      fail(ErrorKind::DomainViolation, "recipe '" + name + "' is " + std::string(to_string(r->domain)) +
                                           ", referenced as " + std::string(to_string(domain)));
    }
    if (!r->validated) fail(ErrorKind::UnvalidatedRecipe, "recipe '" + name + "' has not been validated");
    for (const auto& [param, value] : r->bindings) bind(param, value, r->domain, "recipe '" + name + "'");
  }
  for (const auto& [param, value] : d.overrides) bind(param, value, std::nullopt, "override");

  std::string missing;
  for (const auto& e : tx.schema.entries) {
    // SITE parameters may be left to the claiming site's recipe.
    if (!e.required || is_implicit_param(e.name) || e.domain == ParamDomain::Site) continue;
    if (!out.of(e.domain).contains(e.name)) missing += (missing.empty() ? "" : ", ") + e.name;
  }
  if (!missing.empty()) fail(ErrorKind::IncompleteBindings, "unbound required parameters: " + missing);
  return out;
}

ComposeResult Cookbook::compose_dataset(const Dataset& d) {
  if (!valid_catalog_name(d.name)) fail(ErrorKind::BadRequest, "invalid dataset name '" + d.name + "'");
  if (d.version < 1) fail(ErrorKind::BadRequest, "dataset version must be positive");
  if (state_.dataset(d.ref()) != nullptr) fail(ErrorKind::DuplicateVersion, "dataset " + d.ref().str() + " exists");
  const auto* tx = state_.transformation(d.transformation);
  if (tx == nullptr) fail(ErrorKind::UnknownReference, "no transformation " + d.transformation.str());
  const BoundParams base = resolve_bindings(d, *tx);
  if (d.partitions < 1) fail(ErrorKind::ZeroPartitions, "dataset " + d.ref().str() + " needs at least 1 partition");

  // Upstream outputs for each slot, in declared slot order.
  std::vector<const DatasetRecord*> upstream;
  for (const auto& slot : tx->inputs) {
    const auto it = d.inputs.find(slot.slot);
    if (it == d.inputs.end()) fail(ErrorKind::InputMismatch, "input slot '" + slot.slot + "' is unbound");
    const auto* rec = state_.dataset(it->second);
    if (rec == nullptr) fail(ErrorKind::UnknownReference, "no dataset " + it->second.str());
    const auto* up_tx = state_.transformation(rec->definition.transformation);
    if (up_tx == nullptr || up_tx->step != slot.step) {
      fail(ErrorKind::InputMismatch, "slot '" + slot.slot + "' expects step '" + slot.step + "', dataset " +
                                         it->second.str() + " produces '" + (up_tx ? up_tx->step : "?") + "'");
    }
    upstream.push_back(rec);
  }
  for (const auto& [slot, ref] : d.inputs) {
    const bool declared =
        std::any_of(tx->inputs.begin(), tx->inputs.end(), [&](const InputSlot& s) { return s.slot == slot; });
    if (!declared) fail(ErrorKind::InputMismatch, tx->ref().str() + " declares no input slot '" + slot + "'");
  }

  std::vector<std::vector<ObjectId>> inputs;
  if (!upstream.empty()) {
    inputs.resize(static_cast<std::size_t>(d.partitions));
    for (std::int64_t i = 0; i < d.partitions; ++i) {
      for (const auto* rec : upstream) {
        const auto& ids = rec->derivations;
        const auto& producer = ids[static_cast<std::size_t>(i) % ids.size()];
        inputs[static_cast<std::size_t>(i)].push_back(state_.derivation(producer)->output);
      }
    }
  }

  const auto entries = identity::expand_partitions(d, *tx, base, inputs);

  ComposeResult result{d.ref(), {}, 0, 0};
  auto fresh = json::array();
  for (const auto& e : entries) {
    const auto id = identity::derivation_id(e.output);
    result.derivations.push_back(id);
    if (state_.derivation(id) != nullptr) {
      ++result.linked;
      continue;
    }
    Derivation dv;
    dv.id = id;
    dv.dataset = d.ref();
    dv.transformation = tx->ref();
    dv.partition_index = e.index;
    dv.params = e.params;
    if (!inputs.empty()) dv.inputs = inputs[static_cast<std::size_t>(e.index)];
    dv.output = e.output;
    fresh.push_back(dv);
    ++result.created;
  }
  commit(make_event("dataset_composed",
                    {{"dataset", d}, {"derivations", result.derivations}, {"new", std::move(fresh)}}));
  return result;
}

void Cookbook::register_replica(Replica r) {
  if (r.site.empty() || r.uri.empty()) fail(ErrorKind::BadRequest, "replica needs a site and a uri");
  for (const auto& x : state_.replicas(r.object)) {
    if (x.site == r.site && x.uri == r.uri) {
      fail(ErrorKind::DuplicateReplica, r.object.str() + " at " + r.site + " (" + r.uri + ")");
    }
  }
  if (r.registered_at == Timestamp{}) r.registered_at = clock_();
  commit(make_event("replica_registered", json(r)));
}

std::vector<Replica> Cookbook::find_replicas(const ObjectId& object) const { return state_.replicas(object); }

std::size_t Cookbook::remove_replicas(const ObjectId& object) {
  const auto n = state_.replicas(object).size();
  if (n > 0) commit(make_event("replicas_removed", {{"object_id", object}}));
  return n;
}

}  // namespace vdc
