#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "wsc/instance_io.hpp"
#include "wsc/plan_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run wsc_run(std::vector<std::string> args) {
  args.insert(args.begin(), "wsc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = wsc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string kTravel = std::string(WSC_FIXTURE_DIR) + "/travel.json";

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "wsc_cli_test";
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

}  // namespace

TEST_CASE("compose") {
  const auto r = wsc_run({"compose", kTravel});
  CHECK(r.code == 0);
  CHECK(r.out.find("getAirplaneTicket") != std::string::npos);
  CHECK(r.err.find("solved: 3 calls") != std::string::npos);

  CHECK(wsc_run({"compose", kTravel, "--max-iterations", "0"}).code == 1);
  CHECK(wsc_run({"compose", kTravel, "--max-objects", "0"}).code == 1);
  CHECK(wsc_run({"compose", "/nonexistent.json"}).code == 1);
  CHECK(wsc_run({"compose"}).code == 1);
  CHECK(wsc_run({"frobnicate"}).code == 1);

  CHECK(wsc_run({"compose", kTravel, "--prune", "--injective"}).code == 0);
  const auto bare = wsc_run({"compose", kTravel, "--no-rule-calls"});
  CHECK(bare.code == 0);
  CHECK(bare.out.find("getDestinationCityRule") == std::string::npos);
}

TEST_CASE("unsolvable instance exits 2") {
  const auto dir = scratch_dir();
  write(dir / "stuck.json", R"({"ontology": {"concepts": ["A", "B"]}, "repository": [],
    "query": {"provided": [{"name": "a", "concept": "A"}], "wanted": [{"name": "b", "concept": "B"}]}})");
  const auto stuck = wsc_run({"compose", (dir / "stuck.json").string()});
  CHECK(stuck.code == 2);
  CHECK(stuck.out.find("NoProgress") != std::string::npos);
}

TEST_CASE("verify") {
  const auto dir = scratch_dir();
  const auto plan_path = (dir / "plan.json").string();
  REQUIRE(wsc_run({"compose", kTravel, "--out", plan_path}).code == 0);
  const auto ok = wsc_run({"verify", kTravel, plan_path});
  CHECK(ok.code == 0);
  CHECK(ok.out == "valid\n");

  const auto problem = wsc::parse_instance(wsc::read_file(kTravel));
  auto plan = wsc::parse_plan(wsc::read_file(plan_path), problem.ontology);
  std::swap(plan.calls[0], plan.calls[2]);
  write(dir / "tampered.json", wsc::serialize_plan(problem.ontology, plan, {}));
  const auto bad = wsc_run({"verify", kTravel, (dir / "tampered.json").string()});
  CHECK(bad.code == 2);
  CHECK(bad.out.find("invalid at step 1") == 0);

  const auto bare_path = (dir / "bare.json").string();
  REQUIRE(wsc_run({"compose", kTravel, "--no-rule-calls", "--out", bare_path}).code == 0);
  CHECK(wsc_run({"verify", kTravel, bare_path}).code == 0);

  write(dir / "garbage.json", "{ not json");
  CHECK(wsc_run({"verify", kTravel, (dir / "garbage.json").string()}).code == 1);
}

TEST_CASE("gen") {
  const auto dir = scratch_dir();
  const auto a = wsc_run({"gen", "--seed", "5"});
  CHECK(a.code == 0);
  CHECK(a.out == wsc_run({"gen", "--seed", "5"}).out);
  CHECK_NOTHROW(wsc::parse_instance(a.out));

  const auto path = (dir / "gen.json").string();
  CHECK(wsc_run({"gen", "--seed", "6", "--services", "10", "--depth", "4", "--out", path}).code == 0);
  CHECK(wsc_run({"compose", path}).code == 0);
  CHECK(wsc_run({"gen", "--seed", "6", "--unsolvable", "--out", path}).code == 0);
  CHECK(wsc_run({"compose", path, "--max-objects", "500"}).code == 2);

  CHECK(wsc_run({"gen"}).code == 1);
  CHECK(wsc_run({"gen", "--seed", "1", "--depth", "1"}).code == 1);
}

TEST_CASE("match") {
  const auto r = wsc_run({"match", kTravel, "--service", "getUnivLocation"});
  CHECK(r.code == 0);
  CHECK(r.out == "bindings 1\n  univ=#2\n");
  const auto rule = wsc_run({"match", kTravel, "--service", "getDestinationCityRule", "--dump"});
  CHECK(rule.code == 0);
  CHECK(rule.out.find("objects 3") == 0);
  CHECK(rule.out.find("bindings 0") != std::string::npos);
  CHECK(wsc_run({"match", kTravel, "--service", "nothing"}).code == 1);
}
