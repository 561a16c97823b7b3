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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "vdc/error.hpp"
#include "vdc/server.hpp"
#include "vdc/simnet.hpp"

namespace {

using nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitConnectivity = 2;
constexpr const char* kDefaultServer = "http://127.0.0.1:8080";

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) vdc::fail(vdc::ErrorKind::BadRequest, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    vdc::fail(vdc::ErrorKind::BadRequest, path + ": " + e.what());
  }
}

struct Options {
  std::string server;
  bool as_json = false;
};

std::string server_url(const Options& opt) {
  if (!opt.server.empty()) return opt.server;
  if (const char* env = std::getenv("VDC_SERVER"); env != nullptr && *env != '\0') return env;
  return kDefaultServer;
}

std::string text_of(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void print_fields(const json& j, const std::string& indent = "") {
  for (const auto& [k, v] : j.items()) {
    if (v.is_object() && !v.empty()) {
      std::cout << indent << k << ":\n";
      print_fields(v, indent + "  ");
    } else {
      std::cout << indent << k << ": " << text_of(v) << "\n";
    }
  }
}

void print_plan(const json& plan) {
  std::cout << "target: " << text_of(plan.at("target")) << "\n";
  const auto& stages = plan.at("stages");
  if (stages.empty()) std::cout << "nothing to run; a replica already exists\n";
  for (std::size_t i = 0; i < stages.size(); ++i) {
    std::cout << "stage " << i << ":\n";
    for (const auto& id : stages[i]) std::cout << "  " << text_of(id) << "\n";
  }
  if (!plan.at("pruned").empty()) {
    std::cout << "pruned (replicated):\n";
    for (const auto& id : plan.at("pruned")) std::cout << "  " << text_of(id) << "\n";
  }
}

void print_dataset_status(const json& listing) {
  std::map<std::string, int> counts;
  for (const auto& d : listing.at("derivations")) ++counts[d.at("state").get<std::string>()];
  std::cout << "dataset " << text_of(listing.at("dataset").at("name")) << "@"
            << listing.at("dataset").at("version").dump() << ": " << listing.at("derivations").size()
            << " derivations\n";
  for (const auto& [state, n] : counts) std::cout << "  " << state << ": " << n << "\n";
  for (const auto& d : listing.at("derivations")) {
    std::cout << "  [" << d.at("partition_index").dump() << "] " << text_of(d.at("id")) << " "
              << text_of(d.at("state")) << " attempts=" << d.at("attempts").dump() << "\n";
  }
}

void print_reprocess(const json& r) {
  std::cout << "invalidated: " << r.at("invalidated_count").dump() << "\n"
            << "reused: " << r.at("reused_count").dump() << "\n";
  for (const auto& d : r.at("datasets")) std::cout << "  new " << d.dump() << "\n";
  for (const auto& id : r.at("invalidated")) std::cout << "  " << text_of(id) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vdc: virtual data catalog client and server"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--server", opt.server, "Catalog server URL (default $VDC_SERVER or " + std::string(kDefaultServer) + ")");
  app.add_flag("--json", opt.as_json, "Print machine-readable JSON");

  // The action to run once parsing succeeds, with a printer for text mode.
  std::function<json(vdc::Client&)> action;
  std::function<void(const json&)> printer = [](const json& j) { print_fields(j); };
  bool local_action = false;
  std::function<int()> local;

  auto* tx = app.add_subcommand("tx", "Transformations")->require_subcommand(1);
  std::string file;
  std::string name;
  int version = 0;
  auto* tx_add = tx->add_subcommand("add", "Register a transformation from a JSON file");
  tx_add->add_option("file", file)->required();
  tx_add->callback([&] { action = [&](vdc::Client& c) { return c.post("/v1/transformations", read_json_file(file)); }; });
  auto* tx_show = tx->add_subcommand("show", "Show a transformation");
  tx_show->add_option("name", name)->required();
  tx_show->add_option("version", version)->required();
  tx_show->callback([&] {
    action = [&](vdc::Client& c) { return c.get("/v1/transformations/" + name + "/" + std::to_string(version)); };
  });

  auto* recipe = app.add_subcommand("recipe", "Recipes")->require_subcommand(1);
  std::string note;
  auto* recipe_add = recipe->add_subcommand("add", "Register a recipe from a JSON file");
  recipe_add->add_option("file", file)->required();
  recipe_add->callback([&] { action = [&](vdc::Client& c) { return c.post("/v1/recipes", read_json_file(file)); }; });
  auto* recipe_validate = recipe->add_subcommand("validate", "Mark a recipe validated");
  recipe_validate->add_option("name", name)->required();
  recipe_validate->add_option("--note", note, "Validation note");
  recipe_validate->callback([&] {
    action = [&](vdc::Client& c) { return c.post("/v1/recipes/" + name + "/validate", {{"note", note}}); };
  });

  auto* site = app.add_subcommand("site", "Sites")->require_subcommand(1);
  std::string site_recipe;
  auto* site_bind = site->add_subcommand("bind", "Bind a site to its SITE recipe");
  site_bind->add_option("site", name)->required();
  site_bind->add_option("recipe", site_recipe)->required();
  site_bind->callback([&] {
    action = [&](vdc::Client& c) { return c.post("/v1/sites", {{"site", name}, {"recipe", site_recipe}}); };
  });

  auto* dataset = app.add_subcommand("dataset", "Datasets")->require_subcommand(1);
  auto* ds_compose = dataset->add_subcommand("compose", "Compose a dataset from a JSON file");
  ds_compose->add_option("file", file)->required();
  ds_compose->callback([&] { action = [&](vdc::Client& c) { return c.post("/v1/datasets", read_json_file(file)); }; });
  auto* ds_status = dataset->add_subcommand("status", "Show a dataset's derivations");
  ds_status->add_option("name", name)->required();
  ds_status->add_option("version", version)->required();
  ds_status->callback([&] {
    action = [&](vdc::Client& c) {
      return c.get("/v1/datasets/" + name + "/" + std::to_string(version) + "/derivations");
    };
    printer = print_dataset_status;
  });

  auto* run = app.add_subcommand("run", "Planner operations")->require_subcommand(1);
  run->add_subcommand("gc", "Re-queue expired claims now")->callback([&] {
    action = [&](vdc::Client& c) { return c.post("/v1/gc"); };
  });

  std::string target;
  auto* materialize = app.add_subcommand("materialize", "Plan the derivations that produce an object");
  materialize->add_option("object-id", target)->required();
  materialize->callback([&] {
    action = [&](vdc::Client& c) { return c.post("/v1/materialize", {{"target", target}}); };
    printer = print_plan;
  });

  auto* reprocess = app.add_subcommand("reprocess", "Compose new dataset versions under a changed recipe");
  reprocess->add_option("dataset", name)->required();
  reprocess->add_option("--recipe", site_recipe, "Replacement recipe")->required();
  reprocess->callback([&] {
    action = [&](vdc::Client& c) { return c.post("/v1/datasets/" + name + "/reprocess", {{"recipe", site_recipe}}); };
    printer = print_reprocess;
  });

  auto* provenance = app.add_subcommand("provenance", "Show a completed derivation's provenance");
  provenance->add_option("derivation-id", target)->required();
  provenance->callback([&] {
    action = [&](vdc::Client& c) { return c.get("/v1/derivations/" + target + "/provenance"); };
  });

  auto* status = app.add_subcommand("status", "Catalog summary");
  status->callback([&] { action = [&](vdc::Client& c) { return c.get("/v1/status"); }; });

  auto* simulate = app.add_subcommand("simulate", "Run the production simulation");
  simulate->add_option("config", file, "Simulation config JSON")->required();
  simulate->callback([&] {
    local_action = true;
    local = [&] {
      const auto config = vdc::sim::SimConfig::from_json(read_json_file(file));
      std::unique_ptr<vdc::HttpTransport> remote;
      if (!opt.server.empty() || std::getenv("VDC_SERVER") != nullptr) {
        remote = std::make_unique<vdc::HttpTransport>(server_url(opt));
      }
      const auto report = vdc::sim::run_simulation(config, remote.get());
      if (opt.as_json) {
        std::cout << report.to_json().dump() << "\n";
      } else {
        std::cout << report.table();
      }
      return 0;
    };
  });

  auto* serve = app.add_subcommand("serve", "Run the catalog server");
  std::string config_file;
  vdc::ServerConfig server_config;
  std::string journal;
  std::string port_file;
  std::optional<int> port;
  serve->add_option("--config", config_file, "Server config JSON");
  serve->add_option("--port", port, "Listen port (0 picks one)");
  serve->add_option("--journal", journal, "Journal path");
  serve->add_option("--port-file", port_file, "Write the bound port here");
  serve->add_flag("--fsync", server_config.fsync, "fdatasync every journal append");
  serve->callback([&] {
    local_action = true;
    local = [&] {
      auto config = config_file.empty() ? vdc::ServerConfig{} : vdc::ServerConfig::from_json(read_json_file(config_file));
      if (port) config.port = *port;
      if (!journal.empty()) config.journal = journal;
      if (!port_file.empty()) config.port_file = port_file;
      if (server_config.fsync) config.fsync = true;
      return vdc::serve(config);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (local_action) return local();
    vdc::HttpTransport transport(server_url(opt));
    vdc::Client client(transport);
    const auto result = action(client);
    if (opt.as_json) {
      std::cout << result.dump() << "\n";
    } else {
      printer(result);
    }
    return 0;
  } catch (const vdc::Error& e) {
    if (opt.as_json) {
      std::cerr << json{{"error", vdc::to_string(e.kind())}, {"message", e.what()}}.dump() << "\n";
    } else {
      std::cerr << "vdc: " << e.what() << "\n";
    }
    return e.kind() == vdc::ErrorKind::ServerUnreachable ? kExitConnectivity : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "vdc: " << e.what() << "\n";
    return kExitValidation;
  }
}
