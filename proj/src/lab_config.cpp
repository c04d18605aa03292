#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "gclab/errors.hpp"
#include "gclab/lab.hpp"
#include "gclab/reports.hpp"

namespace gclab::lab {
namespace {

const std::map<std::string, std::vector<std::string>>& numeric_sections() {
  static const std::map<std::string, std::vector<std::string>> s{
      {"grid", {"n_points", "L"}},
      {"time", {"dt", "K", "t_final"}},
      {"physics",
       {"gamma", "alpha", "beta", "kappa", "R", "eps", "mu", "s", "rho", "lambda", "a",
        "alpha_exp", "M", "delta", "C", "eps_max", "gamma_min", "gamma_max", "gamma_step",
        "slack", "offset", "R_min", "R_max", "R_step"}},
  };
  return s;
}

const std::set<std::string> kIntegerKeys{"n_points", "K"};
const std::set<std::string> kSelectionKeys{"identity", "test_function", "boundary",
                                           "profile",  "fail_fast",     "solution"};

std::string section_of(const std::string& key) {
  for (const auto& [section, keys] : numeric_sections()) {
    if (std::find(keys.begin(), keys.end(), key) != keys.end()) return section;
  }
  return {};
}

std::map<std::string, double>& section_map(RunConfig& c, const std::string& section) {
  if (section == "grid") return c.grid;
  if (section == "time") return c.time;
  return c.physics;
}

const std::map<std::string, double>& section_map(const RunConfig& c, const std::string& section) {
  if (section == "grid") return c.grid;
  if (section == "time") return c.time;
  return c.physics;
}

double as_number(const YAML::Node& n, const std::string& where) {
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    throw PreconditionError("config: " + where + " must be a number");
  }
}

std::string as_text(const YAML::Node& n, const std::string& where) {
  if (!n.IsScalar()) throw PreconditionError("config: " + where + " must be a scalar");
  return n.as<std::string>();
}

bool as_flag(const YAML::Node& n, const std::string& where) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    throw PreconditionError("config: " + where + " must be true or false");
  }
}

void require_map(const YAML::Node& n, const std::string& where) {
  if (!n.IsMap()) throw PreconditionError("config: section '" + where + "' must be a mapping");
}

void unknown(const std::string& where) {
  throw PreconditionError("config: unknown key '" + where + "'");
}

}  // namespace

bool RunConfig::is_numeric_key(const std::string& key) { return !section_of(key).empty(); }

RunConfig RunConfig::parse(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw PreconditionError(std::string("config: YAML parse error: ") + e.what());
  }
  RunConfig c;
  if (root.IsNull()) return c;
  require_map(root, "<root>");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "experiment") {
      c.experiment = as_text(v, key);
    } else if (numeric_sections().count(key)) {
      require_map(v, key);
      for (const auto& item : v) {
        const auto name = item.first.as<std::string>();
        const std::string where = key + "." + name;
        if (key == "physics" && name == "mu_rule") {
          c.mu_rule = as_text(item.second, where);
          continue;
        }
        if (key == "physics" && name == "z") {
          if (!item.second.IsSequence() || item.second.size() != 2) {
            throw PreconditionError("config: physics.z must be a pair [re, im]");
          }
          c.z = cplx(as_number(item.second[0], where), as_number(item.second[1], where));
          continue;
        }
        if (section_of(name) != key) unknown(where);
        const double x = as_number(item.second, where);
        if (kIntegerKeys.count(name) && (x != std::floor(x) || x < 0)) {
          throw PreconditionError("config: " + where + " must be a non-negative integer");
        }
        section_map(c, key)[name] = x;
      }
    } else if (key == "potential") {
      require_map(v, key);
      for (const auto& item : v) {
        const auto name = item.first.as<std::string>();
        if (name == "id") c.potential_id = as_text(item.second, "potential.id");
        else if (name == "amplitude") c.amplitude = as_number(item.second, "potential.amplitude");
        else unknown("potential." + name);
      }
    } else if (key == "selection") {
      require_map(v, key);
      for (const auto& item : v) {
        const auto name = item.first.as<std::string>();
        if (!kSelectionKeys.count(name)) unknown("selection." + name);
        c.selection[name] = as_text(item.second, "selection." + name);
      }
    } else if (key == "output") {
      require_map(v, key);
      for (const auto& item : v) {
        const auto name = item.first.as<std::string>();
        if (name == "dir") c.out_dir = as_text(item.second, "output.dir");
        else if (name == "assert") c.assert_checks = as_flag(item.second, "output.assert");
        else if (name == "assert_positive") c.assert_positive = as_flag(item.second, "output.assert_positive");
        else unknown("output." + name);
      }
    } else {
      unknown(key);
    }
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("config: cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::to_yaml() const {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  if (!experiment.empty()) out << YAML::Key << "experiment" << YAML::Value << experiment;
  for (const std::string section : {"grid", "time", "physics"}) {
    const auto& m = section_map(*this, section);
    const bool extra = section == "physics" && (mu_rule || z);
    if (m.empty() && !extra) continue;
    out << YAML::Key << section << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : m) out << YAML::Key << k << YAML::Value << v;
    if (section == "physics") {
      if (mu_rule) out << YAML::Key << "mu_rule" << YAML::Value << *mu_rule;
      if (z) {
        out << YAML::Key << "z" << YAML::Value << YAML::Flow << YAML::BeginSeq << z->real()
            << z->imag() << YAML::EndSeq;
      }
    }
    out << YAML::EndMap;
  }
  if (potential_id || amplitude) {
    out << YAML::Key << "potential" << YAML::Value << YAML::BeginMap;
    if (potential_id) out << YAML::Key << "id" << YAML::Value << *potential_id;
    if (amplitude) out << YAML::Key << "amplitude" << YAML::Value << *amplitude;
    out << YAML::EndMap;
  }
  if (!selection.empty()) {
    out << YAML::Key << "selection" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : selection) out << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
    out << YAML::EndMap;
  }
  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  if (out_dir) out << YAML::Key << "dir" << YAML::Value << YAML::DoubleQuoted << *out_dir;
  out << YAML::Key << "assert" << YAML::Value << assert_checks;
  out << YAML::Key << "assert_positive" << YAML::Value << assert_positive;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["grid"] = grid;
  j["time"] = time;
  j["physics"] = physics;
  if (mu_rule) j["physics"]["mu_rule"] = *mu_rule;
  if (z) j["physics"]["z"] = {z->real(), z->imag()};
  if (potential_id) j["potential"]["id"] = *potential_id;
  if (amplitude) j["potential"]["amplitude"] = *amplitude;
  j["selection"] = selection;
  j["output"] = {{"assert", assert_checks}, {"assert_positive", assert_positive}};
  if (out_dir) j["output"]["dir"] = *out_dir;
  return j;
}

double RunConfig::num(const std::string& key, double fallback) const {
  const std::string section = section_of(key);
  require(!section.empty(), "config: no numeric key '" + key + "'");
  const auto& m = section_map(*this, section);
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

std::size_t RunConfig::count(const std::string& key, std::size_t fallback) const {
  const double v = num(key, static_cast<double>(fallback));
  require(v >= 0 && v == std::floor(v), "config: " + key + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::string RunConfig::choice(const std::string& key, const std::string& fallback) const {
  auto it = selection.find(key);
  return it == selection.end() ? fallback : it->second;
}

void RunConfig::set(const std::string& key, double value) {
  const std::string section = section_of(key);
  require(!section.empty(), "config: no numeric key '" + key + "'");
  if (kIntegerKeys.count(key)) {
    require(value >= 0 && value == std::floor(value), "config: " + key + " must be a non-negative integer");
  }
  section_map(*this, section)[key] = value;
}

// ---- run record -----------------------------------------------------------------

bool RunRecord::all_passed() const {
  if (!error.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

nlohmann::json check_json(const Check& c) {
  return {{"name", c.name},
          {"passed", c.passed},
          {"value", format_double(c.value)},
          {"threshold", format_double(c.threshold)},
          {"detail", c.detail}};
}

nlohmann::json RunRecord::json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) checks_json.push_back(check_json(c));
  return {{"schema_version", kSchemaVersion},
          {"experiment", config.experiment},
          {"config", config.to_json()},
          {"config_yaml", config.to_yaml()},
          {"code_version", code_version},
          {"started_at", started_at},
          {"wall_seconds", wall_seconds},
          {"checks", checks_json},
          {"passed", all_passed()},
          {"artifacts", artifacts},
          {"summary", summary},
          {"error", error},
          {"exit_code", exit_code}};
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace gclab::lab
