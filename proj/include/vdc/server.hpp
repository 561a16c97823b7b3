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

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "json.hpp"
#include "vdc/cookbook.hpp"
#include "vdc/planner.hpp"

namespace httplib {
class Server;
class Client;
}  // namespace httplib

namespace vdc {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path journal = "vdc.journal";
  bool fsync = false;
  PlannerConfig planner;
  std::map<std::string, std::string> site_recipes;  // site -> SITE recipe name
  std::optional<std::filesystem::path> port_file;

  void validate() const;
  static ServerConfig from_json(const nlohmann::json& j);
};

struct Reply {
  int status = 200;
  nlohmann::json body;
};

/// The catalog server logic. handle() is the whole wire surface; the HTTP
/// layer and the in-process transport both call it. Mutations take the
/// writer lock and are journaled before they are acknowledged; reads share
/// a reader lock and see a consistent snapshot.
class Service {
 public:
  /// In-memory catalog without a journal.
  explicit Service(PlannerConfig planner, Cookbook::Clock clock = wall_clock_now);
  /// Replays the configured journal. Throws JournalCorrupt on a corrupt
  /// record (the message names the line).
  explicit Service(const ServerConfig& config, Cookbook::Clock clock = wall_clock_now);
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Reply handle(std::string_view method, std::string_view path, const nlohmann::json& body);

  template <class F>
  decltype(auto) read(F&& f) const {
    std::shared_lock lock(mu_);
    return std::forward<F>(f)(cookbook_.state());
  }

  template <class F>
  decltype(auto) write(F&& f) {
    std::unique_lock lock(mu_);
    return std::forward<F>(f)(cookbook_, planner_);
  }

  Timestamp now() const { return cookbook_.now(); }
  nlohmann::json status() const;

 private:
  Reply dispatch(std::string_view method, const std::vector<std::string>& seg, const nlohmann::json& body);

  mutable std::shared_mutex mu_;
  Cookbook cookbook_;
  Planner planner_;
  std::map<std::string, std::string> configured_sites_;
};

/// cpp-httplib front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and returns the port. Throws BindFailure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

/// Runs the central server until SIGINT/SIGTERM. Replays the journal first,
/// binds the configured site recipes, and sweeps expired claims every
/// gc_period. Returns the process exit code.
int serve(const ServerConfig& config);

class Transport {
 public:
  virtual ~Transport() = default;
  /// Throws Error(ServerUnreachable) when the server cannot be reached.
  virtual Reply call(std::string_view method, const std::string& path, const nlohmann::json& body) = 0;
  virtual std::string describe() const = 0;
};

class LocalTransport final : public Transport {
 public:
  explicit LocalTransport(Service& service) : service_(service) {}
  Reply call(std::string_view method, const std::string& path, const nlohmann::json& body) override;
  std::string describe() const override { return "in-process"; }

 private:
  Service& service_;
};

class HttpTransport final : public Transport {
 public:
  /// `url` like "http://127.0.0.1:8080".
  explicit HttpTransport(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~HttpTransport() override;
  Reply call(std::string_view method, const std::string& path, const nlohmann::json& body) override;
  std::string describe() const override { return url_; }

 private:
  std::string url_;
  std::unique_ptr<httplib::Client> client_;
};

/// Thin typed wrapper over a Transport. Error replies are rethrown as
/// vdc::Error with the server's error kind.
class Client {
 public:
  explicit Client(Transport& transport) : transport_(transport) {}

  nlohmann::json get(const std::string& path);
  nlohmann::json post(const std::string& path, const nlohmann::json& body = nlohmann::json::object());
  nlohmann::json del(const std::string& path);

  /// nullopt on 204 (nothing ready).
  std::optional<nlohmann::json> claim(const std::string& ce, const std::string& site,
                                      std::optional<Timestamp> now = std::nullopt);
  std::string complete(const ObjectId& id, const std::string& ce, const Provenance& provenance);

  Transport& transport() noexcept { return transport_; }

 private:
  nlohmann::json checked(const Reply& reply);
  Transport& transport_;
};

}  // namespace vdc
