#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gclab/errors.hpp"
#include "gclab/lab.hpp"

using namespace gclab;
using namespace gclab::lab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("gclab_lab_" + name);
  fs::remove_all(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("config round trip") {
  const char* text = R"(experiment: carleman
grid: {n_points: 256, L: 12.5}
time: {dt: 0.001, K: 400}
physics:
  R: 16
  eps: 0.1
  gamma: 0.6
  mu_rule: scaled
  z: [0.1, 1]
  kappa: 0.30000000000000004
potential: {id: sech2, amplitude: 0.2}
selection: {test_function: bump-2}
output: {dir: out/here, assert: true}
)";
  const RunConfig c = RunConfig::parse(text);
  CHECK(c.experiment == "carleman");
  CHECK(c.count("n_points", 0) == 256);
  CHECK(c.num("kappa", 0) == 0.30000000000000004);
  CHECK(c.z == cplx(0.1, 1.0));
  CHECK(c.choice("test_function", "") == "bump-2");
  CHECK(c.assert_checks);
  const RunConfig back = RunConfig::parse(c.to_yaml());
  CHECK(back == c);
  CHECK(back.to_yaml() == c.to_yaml());
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(RunConfig::parse("grid: {width: 3}\n"), PreconditionError);
  CHECK_THROWS_AS(RunConfig::parse("extras: {a: 1}\n"), PreconditionError);
  CHECK_THROWS_AS(RunConfig::parse("physics: {L: 3}\n"), PreconditionError);
  CHECK_THROWS_AS(RunConfig::parse("grid: {n_points: 12.5}\n"), PreconditionError);
  CHECK_THROWS_AS(RunConfig::parse("physics: {gamma: abc}\n"), PreconditionError);
  CHECK_THROWS_AS(RunConfig::parse("selection: {colour: red}\n"), PreconditionError);
}

TEST_CASE("set routes keys to their section") {
  RunConfig c;
  c.set("dt", 0.01);
  c.set("R", 8);
  c.set("L", 20);
  CHECK(c.time.at("dt") == 0.01);
  CHECK(c.physics.at("R") == 8);
  CHECK(c.grid.at("L") == 20);
  CHECK_THROWS_AS(c.set("K", 1.5), PreconditionError);
  CHECK_THROWS_AS(c.set("nonsense", 1), PreconditionError);
}

TEST_CASE("experiment registry") {
  CHECK(experiment_names().size() == 15);
  for (const char* n : {"evolve", "convexity", "interpolate", "smoothing", "appel-check", "commutator", "carleman",
                        "l110", "annulus", "threshold", "hardy-pipeline", "airy", "ode-a", "counterexample", "suite"}) {
    CHECK(is_experiment(n));
  }
  CHECK_FALSE(is_experiment("nope"));
}

TEST_CASE("run record is written") {
  const auto out = scratch("commutator");
  RunConfig c;
  c.experiment = "commutator";
  c.selection["identity"] = "I1";
  c.assert_checks = true;
  auto rec = run_experiment(c, out);
  CHECK(rec.exit_code == 0);
  CHECK(rec.all_passed());
  auto j = read_json(out / "run_record.json");
  CHECK(j["experiment"] == "commutator");
  CHECK(j["passed"] == true);
  CHECK(RunConfig::parse(j["config_yaml"].get<std::string>()) == c);
  for (const auto& a : j["artifacts"]) CHECK(fs::exists(out / a.get<std::string>()));
  fs::remove_all(out);
}

TEST_CASE("failed assertion still writes the record") {
  const auto out = scratch("threshold");
  RunConfig c;
  c.experiment = "threshold";
  c.set("gamma", 0.4);
  c.assert_positive = true;
  auto rec = run_experiment(c, out);
  CHECK(rec.exit_code == 2);
  auto j = read_json(out / "run_record.json");
  CHECK(j["passed"] == false);
  CHECK(j["exit_code"] == 2);
  fs::remove_all(out);
}

TEST_CASE("precondition failures propagate after the record") {
  const auto out = scratch("carleman_bad");
  RunConfig c;
  c.experiment = "carleman";
  c.set("R", 1.0);
  CHECK_THROWS_AS(run_experiment(c, out), PreconditionError);
  CHECK(fs::exists(out / "run_record.json"));
  fs::remove_all(out);
}

TEST_CASE("criterion registry") {
  CHECK(criterion_ids().size() == 14);
  SuiteOptions o;
  auto r = evaluate_criterion(1, o);
  CHECK(r.passed);
  CHECK(!r.checks.empty());
  auto t = evaluate_criterion(6, o);
  CHECK(t.passed);
}
