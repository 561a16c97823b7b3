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

#include "vdc/server.hpp"

#include <pthread.h>
#include <signal.h>

#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "vdc/error.hpp"
#include "vdc/identity.hpp"

namespace vdc {

using nlohmann::json;

namespace {

Reply error_reply(ErrorKind kind, const std::string& message) {
  return Reply{http_status(kind), json{{"error", to_string(kind)}, {"message", message}}};
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const auto next = path.find('/', pos);
    const auto end = next == std::string_view::npos ? path.size() : next;
    if (end > pos) out.emplace_back(path.substr(pos, end - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::int64_t parse_version(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::BadRequest, "version must be an integer, got '" + s + "'");
}

std::optional<Timestamp> optional_now(const json& body) {
  if (body.is_object() && body.contains("now") && !body.at("now").is_null()) {
    return parse_rfc3339(require_string(body, "now"));
  }
  return std::nullopt;
}

json derivation_summary(const Derivation& d) {
  return json{{"id", d.id},
              {"partition_index", d.partition_index},
              {"output_id", d.output},
              {"state", to_string(d.state)},
              {"attempts", d.attempts}};
}

Cookbook open_cookbook(const ServerConfig& config, Cookbook::Clock clock) {
  try {
    return Cookbook(config.journal, config.fsync, std::move(clock));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CorruptRecord) fail(ErrorKind::JournalCorrupt, config.journal.string() + ": " + e.detail());
    throw;
  }
}

}  // namespace

void ServerConfig::validate() const {
  planner.validate();
  if (journal.empty()) fail(ErrorKind::InvalidConfig, "journal path is empty");
  if (port < 0 || port > 65535) fail(ErrorKind::InvalidConfig, "port out of range");
}

ServerConfig ServerConfig::from_json(const json& j) {
  ServerConfig c;
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  c.journal = j.value("journal", c.journal.string());
  c.fsync = j.value("fsync", c.fsync);
  c.planner.claim_timeout = Duration{j.value("claim_timeout_s", c.planner.claim_timeout.count())};
  c.planner.max_attempts = j.value("max_attempts", c.planner.max_attempts);
  c.planner.gc_period = Duration{j.value("gc_period_s", c.planner.gc_period.count())};
  if (j.contains("site_recipes")) c.site_recipes = j.at("site_recipes").get<std::map<std::string, std::string>>();
  if (j.contains("port_file")) c.port_file = j.at("port_file").get<std::string>();
  return c;
}

// ---------------------------------------------------------------------------
// Service

Service::Service(PlannerConfig planner, Cookbook::Clock clock) : planner_(cookbook_, planner) {
  cookbook_.set_clock(std::move(clock));
}

Service::Service(const ServerConfig& config, Cookbook::Clock clock)
    : cookbook_(open_cookbook(config, std::move(clock))), planner_(cookbook_, config.planner), configured_sites_(config.site_recipes) {}

json Service::status() const {
  return read([](const CatalogState& s) {
    json counts = json::object();
    for (const auto st : {DerivationState::Defined, DerivationState::Claimed, DerivationState::Completed,
                          DerivationState::Failed}) {
      counts[std::string(to_string(st))] = s.count(st);
    }
    return json{{"transformations", s.transformations().size()},
                {"recipes", s.recipes().size()},
                {"datasets", s.datasets().size()},
                {"invocations", s.derivations().size()},
                {"compute_elements", s.compute_elements_seen()},
                {"network_domains", s.network_domains_seen()},
                {"countries", s.countries_seen()},
                {"replicas", s.replica_count()},
                {"incidents", s.incidents().size()},
                {"derivations", std::move(counts)}};
  });
}

Reply Service::handle(std::string_view method, std::string_view path, const json& body) {
  try {
    return dispatch(method, split_path(path), body);
  } catch (const Error& e) {
    return error_reply(e.kind(), e.detail());
  } catch (const json::exception& e) {
    return error_reply(ErrorKind::BadRequest, e.what());
  } catch (const std::exception& e) {
    return error_reply(ErrorKind::Internal, e.what());
  }
}

Reply Service::dispatch(std::string_view method, const std::vector<std::string>& seg, const json& body) {
  const auto n = seg.size();
  auto is = [&](std::size_t i, std::string_view s) { return i < n && seg[i] == s; };
  if (!is(0, "v1") || n < 2) return error_reply(ErrorKind::UnknownReference, "no such endpoint");
  const bool get = method == "GET";
  const bool post = method == "POST";
  const auto& root = seg[1];

  if (root == "status" && n == 2 && get) return {200, status()};

  if (root == "transformations") {
    if (n == 2 && post) {
      auto t = body.get<Transformation>();
      return write([&](Cookbook& cb, Planner&) -> Reply {
        try {
          const auto ref = cb.register_transformation(t);
          return {201, {{"name", ref.name}, {"version", ref.version}, {"body_hash", cb.state().transformation(ref)->body_hash.hex()}}};
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DuplicateVersion) throw;
          // A retried registration with the identical payload succeeds.
          const auto* existing = cb.state().transformation(t.ref());
          t.body_hash = identity::body_hash(t);
          if (existing != nullptr && existing->step == t.step && existing->body_hash == t.body_hash &&
              existing->consumed_internally == t.consumed_internally) {
            return {200, {{"name", t.name}, {"version", t.version}, {"body_hash", t.body_hash.hex()}, {"idempotent", true}}};
          }
          throw;
        }
      });
    }
    if (n == 4 && get) {
      const VersionRef ref{seg[2], parse_version(seg[3])};
      return read([&](const CatalogState& s) -> Reply {
        const auto* t = s.transformation(ref);
        if (t == nullptr) return error_reply(ErrorKind::UnknownTransformation, "no transformation " + ref.str());
        return {200, json(*t)};
      });
    }
  }

  if (root == "recipes") {
    if (n == 2 && post) {
      const auto r = body.get<Recipe>();
      return write([&](Cookbook& cb, Planner&) -> Reply {
        try {
          cb.register_recipe(r);
          if (r.validated) cb.mark_validated(r.name, r.note);
          return {201, {{"name", r.name}}};
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DuplicateName) throw;
          const auto* existing = cb.state().recipe(r.name);
          if (existing != nullptr && existing->domain == r.domain && existing->bindings == r.bindings) {
            return {200, {{"name", r.name}, {"idempotent", true}}};
          }
          throw;
        }
      });
    }
    if (n == 3 && get) {
      return read([&](const CatalogState& s) -> Reply {
        const auto* r = s.recipe(seg[2]);
        if (r == nullptr) return error_reply(ErrorKind::UnknownRecipe, "no recipe '" + seg[2] + "'");
        return {200, json(*r)};
      });
    }
    if (n == 4 && post && seg[3] == "validate") {
      const std::string note = body.is_object() ? body.value("note", std::string{}) : std::string{};
      return write([&](Cookbook& cb, Planner&) -> Reply {
        cb.mark_validated(seg[2], note);
        return {200, json(*cb.state().recipe(seg[2]))};
      });
    }
  }

  if (root == "sites" && n == 2 && post) {
    const auto site = require_string(body, "site");
    const auto recipe = require_string(body, "recipe");
    return write([&](Cookbook& cb, Planner&) -> Reply {
      cb.bind_site(site, recipe);
      return {200, {{"site", site}, {"recipe", recipe}}};
    });
  }

  if (root == "datasets") {
    if (n == 2 && post) {
      const auto d = body.get<Dataset>();
      return write([&](Cookbook& cb, Planner&) -> Reply {
        try {
          const auto r = cb.compose_dataset(d);
          return {201, {{"dataset", r.dataset}, {"created", r.created}, {"linked", r.linked}, {"derivations", r.derivations}}};
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DuplicateVersion) throw;
          const auto* rec = cb.state().dataset(d.ref());
          if (rec == nullptr || !(rec->definition == d)) throw;
          return {200,
                  {{"dataset", d.ref()}, {"created", rec->created}, {"linked", rec->linked},
                   {"derivations", rec->derivations}, {"idempotent", true}}};
        }
      });
    }
    if (n == 5 && get && seg[4] == "derivations") {
      const VersionRef ref{seg[2], parse_version(seg[3])};
      return read([&](const CatalogState& s) -> Reply {
        const auto* rec = s.dataset(ref);
        if (rec == nullptr) return error_reply(ErrorKind::UnknownDataset, "no dataset " + ref.str());
        auto list = json::array();
        for (const auto& id : rec->derivations) list.push_back(derivation_summary(*s.derivation(id)));
        return {200, {{"dataset", ref}, {"definition", rec->definition}, {"derivations", std::move(list)}}};
      });
    }
    if (n == 4 && post && seg[3] == "reprocess") {
      const auto recipe = require_string(body, "recipe");
      return write([&](Cookbook&, Planner& p) -> Reply { return {200, json(p.reprocess(seg[2], recipe))}; });
    }
  }

  if (root == "work" && n == 3 && seg[2] == "claim" && post) {
    const auto ce = require_string(body, "ce_id");
    const auto site = require_string(body, "site");
    const auto now = optional_now(body);
    return write([&](Cookbook& cb, Planner& p) -> Reply {
      if (!cb.state().site_recipe(site)) {
        // Sites named in the server config bind once their recipe exists.
        if (const auto it = configured_sites_.find(site);
            it != configured_sites_.end() && cb.state().recipe(it->second)) {
          cb.bind_site(site, it->second);
        }
      }
      auto claimed = p.claim_next(ce, site, now.value_or(cb.now()));
      if (!claimed) return {204, nullptr};
      return {200, {{"derivation", claimed->derivation}, {"recipe", claimed->recipe}}};
    });
  }

  if (root == "derivations" && n >= 3) {
    const auto id = ObjectId::parse(seg[2]);
    if (n == 3 && get) {
      return read([&](const CatalogState& s) -> Reply {
        const auto* d = s.derivation(id);
        if (d == nullptr) return error_reply(ErrorKind::UnknownDerivation, id.str());
        return {200, json(*d)};
      });
    }
    if (n == 4 && get && seg[3] == "provenance") {
      return read([&](const CatalogState& s) -> Reply {
        const auto* d = s.derivation(id);
        if (d == nullptr) return error_reply(ErrorKind::UnknownDerivation, id.str());
        if (!d->provenance) {
          return error_reply(ErrorKind::UnknownObject, "no provenance: " + id.str() + " is " + std::string(to_string(d->state)));
        }
        return {200, json(*d->provenance)};
      });
    }
    if (n == 4 && post && seg[3] == "complete") {
      const auto prov = require_field(body, "provenance").get<Provenance>();
      const auto ce = body.contains("ce_id") ? require_string(body, "ce_id") : prov.compute_element;
      if (ce != prov.compute_element) fail(ErrorKind::BadRequest, "ce_id does not match provenance.compute_element");
      return write([&](Cookbook&, Planner& p) -> Reply {
        return {200, {{"outcome", to_string(p.complete(id, ce, prov))}}};
      });
    }
    if (n == 4 && post && seg[3] == "fail") {
      const auto ce = require_string(body, "ce_id");
      const auto reason = body.value("reason", std::string{});
      return write([&](Cookbook&, Planner& p) -> Reply {
        return {200, {{"state", to_string(p.fail(id, ce, reason))}}};
      });
    }
    if (n == 4 && post && seg[3] == "retry") {
      return write([&](Cookbook&, Planner& p) -> Reply {
        p.retry(id);
        return {200, {{"state", "DEFINED"}}};
      });
    }
  }

  if (root == "materialize" && n == 2 && post) {
    const auto target = require_field(body, "target").get<ObjectId>();
    return read([&](const CatalogState&) -> Reply { return {200, json(planner_.plan_materialization(target))}; });
  }

  if (root == "replicas") {
    if (n == 2 && post) {
      const auto r = body.get<Replica>();
      return write([&](Cookbook& cb, Planner&) -> Reply {
        cb.register_replica(r);
        return {201, json(cb.find_replicas(r.object).back())};
      });
    }
    if (n == 3 && get) {
      const auto id = ObjectId::parse(seg[2]);
      return read([&](const CatalogState& s) -> Reply {
        return {200, {{"object_id", id}, {"replicas", s.replicas(id)}}};
      });
    }
    if (n == 3 && method == "DELETE") {
      const auto id = ObjectId::parse(seg[2]);
      return write([&](Cookbook& cb, Planner&) -> Reply { return {200, {{"removed", cb.remove_replicas(id)}}}; });
    }
  }

  if (root == "gc" && n == 2 && post) {
    const auto now = optional_now(body);
    return write([&](Cookbook& cb, Planner& p) -> Reply {
      return {200, {{"requeued", p.gc_sweep(now.value_or(cb.now()))}}};
    });
  }

  return error_reply(ErrorKind::UnknownReference, "no endpoint " + std::string(method) + " /" + [&] {
    std::string joined;
    for (const auto& s : seg) joined += (joined.empty() ? "" : "/") + s;
    return joined;
  }());
}

// ---------------------------------------------------------------------------
// HTTP

HttpServer::HttpServer(Service& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    if (!req.body.empty()) {
      try {
        body = json::parse(req.body);
      } catch (const json::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", "BadRequest"}, {"message", e.what()}}.dump(), "application/json");
        return;
      }
    }
    const auto reply = service_.handle(req.method, req.path, body);
    res.status = reply.status;
    if (reply.status != 204) res.set_content(reply.body.dump(), "application/json");
  };
  server_->Get(R"(/.*)", handler);
  server_->Post(R"(/.*)", handler);
  server_->Delete(R"(/.*)", handler);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorKind::BindFailure, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

int serve(const ServerConfig& config) {
  config.validate();

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Service service(config);
  const auto replayed = service.read([](const CatalogState& s) { return s.derivations().size(); });
  HttpServer http(service);
  const int port = http.bind(config.host, config.port);
  if (config.port_file) {
    const auto tmp = config.port_file->string() + ".tmp";
    std::ofstream(tmp) << port << "\n";
    std::filesystem::rename(tmp, *config.port_file);
  }
  std::cerr << "vdc: serving http://" << config.host << ":" << port << " journal " << config.journal.string()
            << " (" << replayed << " derivations replayed)\n";

  std::mutex mu;
  std::condition_variable cv;
  bool stopping = false;
  std::thread gc([&] {
    std::unique_lock lock(mu);
    while (!cv.wait_for(lock, config.planner.gc_period, [&] { return stopping; })) {
      lock.unlock();
      try {
        service.write([&](Cookbook& cb, Planner& p) { return p.gc_sweep(cb.now()); });
      } catch (const std::exception& e) {
        std::cerr << "vdc: gc sweep failed: " << e.what() << "\n";
      }
      lock.lock();
    }
  });
  std::thread([&http, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    http.stop();
  }).detach();

  http.listen();
  {
    std::lock_guard lock(mu);
    stopping = true;
  }
  cv.notify_all();
  gc.join();
  return 0;
}

// ---------------------------------------------------------------------------
// Transports and client

Reply LocalTransport::call(std::string_view method, const std::string& path, const json& body) {
  return service_.handle(method, path, body);
}

HttpTransport::HttpTransport(std::string url, std::chrono::milliseconds timeout)
    : url_(std::move(url)), client_(std::make_unique<httplib::Client>(url_)) {
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client_->set_connection_timeout(secs.count(), usecs.count());
  client_->set_read_timeout(secs.count(), usecs.count());
  client_->set_write_timeout(secs.count(), usecs.count());
}

HttpTransport::~HttpTransport() = default;

Reply HttpTransport::call(std::string_view method, const std::string& path, const json& body) {
  httplib::Result res{nullptr, httplib::Error::Unknown};
  if (method == "GET") {
    res = client_->Get(path);
  } else if (method == "POST") {
    res = client_->Post(path, body.is_null() ? std::string("{}") : body.dump(), "application/json");
  } else if (method == "DELETE") {
    res = client_->Delete(path);
  } else {
    fail(ErrorKind::BadRequest, "unsupported method " + std::string(method));
  }
  if (!res) fail(ErrorKind::ServerUnreachable, url_ + path + ": " + httplib::to_string(res.error()));
  Reply reply{res->status, nullptr};
  if (!res->body.empty()) {
    try {
      reply.body = json::parse(res->body);
    } catch (const json::exception&) {
      reply.body = json{{"error", "Internal"}, {"message", res->body}};
    }
  }
  return reply;
}

json Client::checked(const Reply& reply) {
  if (reply.status >= 200 && reply.status < 300) return reply.body;
  ErrorKind kind = ErrorKind::Internal;
  std::string message = "HTTP " + std::to_string(reply.status);
  if (reply.body.is_object()) {
    if (const auto k = error_kind_from_string(reply.body.value("error", std::string{}))) kind = *k;
    message = reply.body.value("message", message);
  }
  throw Error(kind, message);
}

json Client::get(const std::string& path) { return checked(transport_.call("GET", path, nullptr)); }

json Client::post(const std::string& path, const json& body) { return checked(transport_.call("POST", path, body)); }

json Client::del(const std::string& path) { return checked(transport_.call("DELETE", path, nullptr)); }

std::optional<json> Client::claim(const std::string& ce, const std::string& site, std::optional<Timestamp> now) {
  json body{{"ce_id", ce}, {"site", site}};
  if (now) body["now"] = format_rfc3339(*now);
  const auto reply = transport_.call("POST", "/v1/work/claim", body);
  if (reply.status == 204) return std::nullopt;
  return checked(reply);
}

std::string Client::complete(const ObjectId& id, const std::string& ce, const Provenance& provenance) {
  const auto reply = post("/v1/derivations/" + id.str() + "/complete", {{"ce_id", ce}, {"provenance", provenance}});
  return reply.value("outcome", std::string{});
}

}  // namespace vdc
