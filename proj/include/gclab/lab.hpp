#pragma once

// Run configuration, run records, the experiment registry behind the command
// line tool, and the acceptance suite.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gclab/grid_field.hpp"

namespace gclab::lab {

// YAML document with the sections below. Unknown keys and unknown sections are
// errors. Every numeric value is a double; integer-valued keys are checked.
//
//   experiment: convexity
//   grid:      {n_points, L}
//   time:      {dt, K, t_final}
//   physics:   {gamma, alpha, beta, kappa, R, eps, mu, mu_rule, z: [re, im], s, rho,
//               lambda, a, alpha_exp, M, delta, C, eps_max, gamma_min, gamma_max,
//               gamma_step, slack, offset, R_min, R_max, R_step}
//   potential: {id, amplitude}
//   selection: {identity, test_function, boundary, solution, profile, fail_fast}
//   output:    {dir, assert, assert_positive}
struct RunConfig {
  std::string experiment;
  std::map<std::string, double> grid;
  std::map<std::string, double> time;
  std::map<std::string, double> physics;
  std::optional<std::string> mu_rule;  // "scaled" or "fixed"
  std::optional<cplx> z;
  std::optional<std::string> potential_id;
  std::optional<double> amplitude;
  std::map<std::string, std::string> selection;
  std::optional<std::string> out_dir;
  bool assert_checks = false;
  bool assert_positive = false;

  static RunConfig parse(const std::string& yaml_text);
  static RunConfig load(const std::filesystem::path& path);
  std::string to_yaml() const;
  nlohmann::json to_json() const;
  bool operator==(const RunConfig& other) const = default;

  double num(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  std::string choice(const std::string& key, const std::string& fallback) const;
  // Writes a numeric key into the section that owns it.
  void set(const std::string& key, double value);
  static bool is_numeric_key(const std::string& key);
};

const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);

struct Check {
  std::string name;
  bool passed;
  double value;
  double threshold;
  std::string detail;
};

struct RunRecord {
  RunConfig config;
  std::string code_version;
  std::string started_at;
  double wall_seconds = 0.0;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;
  nlohmann::json summary;
  std::string error;   // set on a failed run
  int exit_code = 0;

  bool all_passed() const;
  nlohmann::json json() const;
};

// Validates the config, runs the experiment, writes artifacts and the record
// (run_record.json) into `out`. PreconditionError from validation propagates;
// the record is still written when the experiment itself fails.
RunRecord run_experiment(const RunConfig& cfg, const std::filesystem::path& out,
                         unsigned threads = 1);

// ---- acceptance suite ---------------------------------------------------------

struct CriterionResult {
  int id;
  std::string title;
  bool passed;
  std::vector<Check> checks;
  double seconds;
  std::string error;
};

struct SuiteOptions {
  std::string profile = "quick";  // quick or full
  bool fail_fast = false;
  std::optional<double> dt_override;  // negative control
  unsigned threads = 1;
};

struct SuiteSummary {
  std::string profile;
  std::vector<CriterionResult> criteria;
  double seconds = 0.0;
  bool all_passed = false;

  std::string markdown() const;
  nlohmann::json json() const;
};

const std::vector<int>& criterion_ids();
std::string criterion_title(int id);
CriterionResult evaluate_criterion(int id, const SuiteOptions& opts);
// Criteria 1 to 13, then 14 from the measured wall time and a rerun
// comparison of CSV artifacts written under `scratch`.
SuiteSummary suite_run(const SuiteOptions& opts, const std::filesystem::path& scratch);

}  // namespace gclab::lab
