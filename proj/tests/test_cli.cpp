// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "warmlab/cli.hpp"
#include "warmlab/manifest.hpp"

using namespace warmlab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("warmlab-cli-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

json load(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST_CASE("params") {
  const fs::path out = scratch("params-ok");
  const Result ok = run({"params", "--m", "100", "--c1", "1", "--M", "1000", "--q", "0.0001", "--out", out.string()});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("\nok\n") != std::string::npos);
  CHECK(fs::exists(out / "run.json"));
  CHECK(fs::exists(out / "validation.json"));

  const Result mmn = run({"params", "--m", "100", "--c1", "1", "--M", "800", "--q", "0.0001", "--out", scratch("mmn").string()});
  CHECK(mmn.code == kExitValidation);
  CHECK(mmn.out.find("violation Mmn") != std::string::npos);

  const fs::path cfg = scratch("bad.cfg");
  std::ofstream(cfg) << "m = 100\nc1\n";
  CHECK(run({"params", "--config", cfg.string(), "--out", scratch("bad").string()}).code == kExitUsage);
  std::ofstream(cfg) << "nonsense = 3\n";
  CHECK(run({"params", "--config", cfg.string(), "--out", scratch("bad").string()}).code == kExitUsage);
}

TEST_CASE("flags override the config file") {
  const fs::path cfg = scratch("over.cfg");
  std::ofstream(cfg) << "# test\nm = 50\nc1 = 1\nM = 1000\nq = 0.0001\n";
  const fs::path out = scratch("over");
  const Result r = run({"params", "--config", cfg.string(), "--m", "100", "--out", out.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("m = 100") != std::string::npos);
  CHECK(r.out.find("c1 = 1") != std::string::npos);
}

TEST_CASE("urn simulate and verify") {
  const fs::path out = scratch("sim");
  const Result r = run({"urn", "simulate", "--m", "3", "--c1", "1", "--n", "50", "--replicas", "200", "--out", out.string()});
  CHECK(r.code == kExitOk);
  const json s = load(out / "summary.json");
  CHECK(s["estimates"]["event"]["trials"] == 200);
  CHECK(fs::exists(out / "outcomes.jsonl"));

  const Result seq = run({"urn", "simulate", "--engine", "sequential", "--m", "2", "--n", "2", "--M", "17",
                          "--replicas", "100", "--out", scratch("seq").string()});
  CHECK(seq.code == kExitOk);

  const fs::path v = scratch("verify");
  CHECK(run({"urn", "verify", "--prop", "p_growing", "--m", "100", "--c1", "1", "--out", v.string()}).code == kExitOk);
  CHECK(fs::exists(v / "report.json"));
  CHECK(fs::exists(v / "cells.csv"));
  CHECK(run({"urn", "verify", "--prop", "p_delta", "--delta", "0", "--c1", "1", "--out", scratch("pd").string()}).code ==
        kExitValidation);
  CHECK(run({"urn", "verify", "--prop", "nope", "--out", scratch("nope").string()}).code == kExitUsage);
}

TEST_CASE("warm on a tree and on a composite") {
  const fs::path out = scratch("warm");
  const Result r = run({"warm", "--n", "2", "--depth", "2", "--horizon", "5", "--replicas", "10", "--trajectories", "2",
                        "--out", out.string()});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(out / "trajectories" / "r000001" / "events.csv"));
  CHECK_FALSE(fs::exists(out / "trajectories" / "r000002"));
  CHECK(load(out / "summary.json")["counts"]["replicas"] == 10);

  const fs::path blocks = scratch("blocks.txt");
  std::ofstream(blocks) << "# two trees\n2 0.5 2\n3 0.4 1\n";
  const fs::path comp = scratch("comp");
  CHECK(run({"warm", "--composite", blocks.string(), "--horizon", "3", "--replicas", "5", "--out", comp.string()}).code ==
        kExitOk);
  // the block file travels with the manifest
  CHECK(read_manifest(comp / kManifestName).config["files"].size() == 1);

  CHECK(run({"warm", "--horizon", "0", "--out", scratch("h0").string()}).code == kExitUsage);
  CHECK(run({"warm", "--horizon", "5", "--replicas", "2", "--event-cap", "3", "--out", scratch("cap").string()}).code ==
        kExitCap);
}

TEST_CASE("report merges compatible runs") {
  const fs::path a = scratch("ra");
  const fs::path b = scratch("rb");
  const fs::path c = scratch("rc");
  const std::vector<std::string> base{"warm", "--n", "2", "--depth", "2", "--horizon", "4", "--replicas", "8"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> v = base;
    v.insert(v.end(), extra.begin(), extra.end());
    return v;
  };
  REQUIRE(run(with({"--seed", "1", "--out", a.string()})).code == kExitOk);
  REQUIRE(run(with({"--seed", "2", "--out", b.string()})).code == kExitOk);
  const fs::path merged = scratch("merged");
  CHECK(run({"report", a.string(), b.string(), "--out", merged.string()}).code == kExitOk);
  const json m = load(merged / "merged.json")["summary"];
  const json one = load(a / "summary.json");
  CHECK(m["estimates"]["time_good"]["trials"] == 2 * one["estimates"]["time_good"]["trials"].get<std::int64_t>());
  CHECK(m["counts"]["replicas"] == 16);

  CHECK(run({"report", "--out", scratch("empty").string()}).code == kExitUsage);
  CHECK(run({"report", a.string(), a.string(), "--out", scratch("dup").string()}).code == kExitUsage);

  REQUIRE(run({"warm", "--n", "3", "--depth", "2", "--horizon", "4", "--replicas", "8", "--seed", "3", "--out",
               c.string()})
              .code == kExitOk);
  const Result mismatch = run({"report", a.string(), c.string(), "--out", scratch("mm").string()});
  CHECK(mismatch.code == kExitUsage);
  CHECK(mismatch.err.find("\"op\"") != std::string::npos);
}

TEST_CASE("replay reproduces outputs across thread counts") {
  const fs::path a = scratch("rep-a");
  REQUIRE(run({"urn", "simulate", "--m", "3", "--c1", "1", "--n", "40", "--replicas", "300", "--threads", "1", "--out",
               a.string()})
              .code == kExitOk);
  const fs::path b = scratch("rep-b");
  const Result r = run({"replay", (a / kManifestName).string(), "--threads", "4", "--out", b.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("differs") == std::string::npos);
  CHECK(read_manifest(a / kManifestName).outputs == read_manifest(b / kManifestName).outputs);
}

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"urn", "simulate", "--replicas", "0", "--out", scratch("zero").string()}).code == kExitUsage);
}
