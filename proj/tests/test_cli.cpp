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

#include <fstream>

#include "doctest.h"
#include "process.hpp"
#include "support.hpp"
#include "vdc/server.hpp"

using namespace vdc;
using namespace vdc::test;
using nlohmann::json;

namespace {

const std::string kVdc = VDC_BINARY;

void write_json(const std::filesystem::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

/// A live `vdc serve` plus helpers to run the CLI against it.
struct Fixture {
  TempDir dir;
  ServerProcess server{kVdc,
                       {"serve", "--port", "0", "--journal", (dir / "j.log").string(), "--port-file",
                        (dir / "port").string()},
                       dir / "port"};
  std::string url;

  Fixture() { url = "http://127.0.0.1:" + std::to_string(server.start()); }

  CommandResult vdc(const std::string& args) { return run_command(kVdc + " --server " + url + " " + args + " 2>/dev/null"); }

  /// Runs with --json and checks the output is one canonical-stable JSON document.
  json vdc_json(const std::string& args, int expected_exit = 0) {
    const auto r = vdc("--json " + args);
    INFO("vdc " << args << " -> " << r.out);
    REQUIRE(r.exit_code == expected_exit);
    const auto j = json::parse(r.out);
    CHECK(json::parse(j.dump()) == j);
    CHECK(r.out == j.dump() + "\n");
    return j;
  }

  std::string file(const std::string& name, const json& j) {
    write_json(dir / name, j);
    return (dir / name).string();
  }
};

}  // namespace

TEST_CASE("every subcommand emits round-trippable JSON") {
  Fixture f;
  HttpTransport transport(f.url);
  Client direct(transport);

  const auto tx = f.vdc_json("tx add " + f.file("tx.json", json(make_tx("evgen", "evgen"))));
  CHECK(tx.at("name") == "evgen");
  const auto shown = f.vdc_json("tx show evgen 1");
  CHECK(shown == direct.get("/v1/transformations/evgen/1"));
  CHECK(shown.at("body_hash") == tx.at("body_hash"));

  f.vdc_json("recipe add " + f.file("r.json", json(make_recipe("r", ParamDomain::Repro,
                                                               {{"events", std::int64_t{2}}}, false))));
  const auto validated = f.vdc_json("recipe validate r --note gurus");
  CHECK(validated.at("validated") == true);
  CHECK(validated.at("note") == "gurus");
  f.vdc_json("recipe add " + f.file("s.json", json(make_recipe("site.a.recipe", ParamDomain::Site,
                                                               {{"workdir", std::string("/w")}}))));
  f.vdc_json("site bind site.a site.a.recipe");

  const auto composed = f.vdc_json(
      "dataset compose " +
      f.file("d.json", json(make_dataset("d", make_tx("evgen", "evgen"), 3, {{ParamDomain::Repro, "r"}}))));
  CHECK(composed.at("created") == 3);
  const auto listing = f.vdc_json("dataset status d 1");
  CHECK(listing == direct.get("/v1/datasets/d/1/derivations"));
  CHECK(listing.at("derivations").size() == 3);

  const auto job = direct.claim("ce1", kSite);
  REQUIRE(job);
  const auto d = job->at("derivation").get<Derivation>();
  direct.complete(d.id, "ce1", provenance_for("ce1", sha256("payload")));

  const auto prov = f.vdc_json("provenance " + d.id.str());
  CHECK(prov.at("compute_element") == "ce1");
  CHECK(prov == direct.get("/v1/derivations/" + d.id.str() + "/provenance"));

  const auto plan = f.vdc_json("materialize " + d.output.str());
  CHECK(plan.at("stages").empty());
  CHECK(plan.at("pruned") == json::array({d.output.str()}));
  const auto other = listing.at("derivations")[2].at("output_id").get<std::string>();
  CHECK(f.vdc_json("materialize " + other).at("stages").size() == 1);

  CHECK(f.vdc_json("run gc").at("requeued").empty());

  f.vdc_json("recipe add " + f.file("r2.json", json(make_recipe("r2", ParamDomain::Repro,
                                                                {{"events", std::int64_t{9}}}))));
  const auto re = f.vdc_json("reprocess d --recipe r2");
  CHECK(re.at("invalidated_count") == 3);
  CHECK(re.at("datasets")[0] == json{{"name", "d"}, {"version", 2}});

  const auto status = f.vdc_json("status");
  CHECK(status == direct.get("/v1/status"));
  CHECK(status.at("datasets") == 2);

  const auto sim = f.vdc_json("simulate " + f.file("sim.json", {{"compute_elements", 4},
                                                                 {"network_domains", 2},
                                                                 {"countries", 1},
                                                                 {"transformations", 4},
                                                                 {"invocations", 20},
                                                                 {"datasets", 4}}));
  CHECK(sim.at("completed") == 20);
}

TEST_CASE("exit codes: 1 for API errors, 2 for connectivity") {
  Fixture f;
  CHECK(f.vdc("tx show missing 1").exit_code == 1);
  CHECK(f.vdc("dataset status missing 1").exit_code == 1);
  CHECK(f.vdc("tx add /nonexistent/file.json").exit_code == 1);
  CHECK(f.vdc("provenance not-an-id").exit_code == 1);
  CHECK(f.vdc("reprocess missing --recipe r").exit_code == 1);
  CHECK(f.vdc("nosuchcommand").exit_code == 1);

  const auto err = run_command(kVdc + " --json tx show missing 1 --server " + f.url + " 2>&1 >/dev/null");
  CHECK(json::parse(err.out).at("error") == "UnknownTransformation");

  CHECK(run_command(kVdc + " --server http://127.0.0.1:1 status 2>/dev/null").exit_code == 2);
  CHECK(run_command("VDC_SERVER=http://127.0.0.1:1 " + kVdc + " status 2>/dev/null").exit_code == 2);
  CHECK(run_command("VDC_SERVER=" + f.url + " " + kVdc + " status >/dev/null 2>&1").exit_code == 0);
}

TEST_CASE("text output is human readable") {
  Fixture f;
  const auto r = f.vdc("status");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("transformations: 0") != std::string::npos);
  const auto sim = run_command(kVdc + " simulate " + f.file("sim.json", {{"compute_elements", 3},
                                                                          {"network_domains", 1},
                                                                          {"countries", 1},
                                                                          {"transformations", 2},
                                                                          {"invocations", 6},
                                                                          {"datasets", 2}}));
  CHECK(sim.exit_code == 0);
  CHECK(sim.out.find("Transformation Invocation") != std::string::npos);
}

TEST_CASE("serve refuses a corrupt journal") {
  TempDir dir;
  std::ofstream(dir / "j.log") << "{\"broken\"\n{}\n";
  const auto r = run_command(kVdc + " serve --port 0 --journal " + (dir / "j.log").string() + " 2>&1");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("line 1") != std::string::npos);
}
