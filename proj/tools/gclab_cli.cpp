// gclab: command-line front end for the experiment registry.
//
//   gclab <subcommand> [--config PATH] [--out DIR] [--assert] [numeric flags]
//
// Exit codes: 0 success, 1 configuration error, 2 assertion failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "gclab/errors.hpp"
#include "gclab/lab.hpp"
#include "gclab/reports.hpp"
#include "gclab/version.hpp"

namespace fs = std::filesystem;
using gclab::lab::RunConfig;

namespace {

struct Flags {
  std::string config;
  std::string out;
  bool assert_checks = false;
  bool assert_positive = false;
  bool fail_fast = false;
  unsigned threads = 1;
  std::map<std::string, std::optional<double>> numbers;
  std::map<std::string, std::optional<std::string>> texts;
  std::optional<double> z_re, z_im, amplitude;
  std::optional<std::string> potential, mu_rule;
};

// flag name -> config key
const std::vector<std::pair<std::string, std::string>>& numeric_flags() {
  static const std::vector<std::pair<std::string, std::string>> f{
      {"--n-points", "n_points"}, {"--L", "L"},         {"--dt", "dt"},
      {"--K", "K"},               {"--t-final", "t_final"}, {"--gamma", "gamma"},
      {"--alpha", "alpha"},       {"--beta", "beta"},   {"--kappa", "kappa"},
      {"--R", "R"},               {"--eps", "eps"},     {"--mu", "mu"},
      {"--s", "s"},               {"--rho", "rho"},     {"--lambda", "lambda"},
      {"--a", "a"},               {"--alpha-exp", "alpha_exp"}, {"--M", "M"},
      {"--delta", "delta"},       {"--C", "C"},         {"--eps-max", "eps_max"},
      {"--gamma-min", "gamma_min"}, {"--gamma-max", "gamma_max"}, {"--gamma-step", "gamma_step"},
      {"--slack", "slack"},       {"--offset", "offset"}, {"--R-min", "R_min"},
      {"--R-max", "R_max"},       {"--R-step", "R_step"},
  };
  return f;
}

const std::vector<std::pair<std::string, std::string>>& text_flags() {
  static const std::vector<std::pair<std::string, std::string>> f{
      {"--identity", "identity"}, {"--test-function", "test_function"},
      {"--boundary", "boundary"}, {"--solution", "solution"}, {"--profile", "profile"}};
  return f;
}

void add_flags(CLI::App* sub, Flags& fl) {
  sub->add_option("--config", fl.config, "YAML run configuration");
  sub->add_option("--out", fl.out, "output directory (relative paths resolve under $GCLAB_OUT)");
  sub->add_flag("--assert", fl.assert_checks, "exit 2 if any check fails");
  sub->add_flag("--assert-positive", fl.assert_positive, "threshold: require sup_eps E > 0");
  sub->add_flag("--fail-fast", fl.fail_fast, "suite: stop at the first failing criterion");
  sub->add_option("--threads", fl.threads, "worker threads for internal scans")->check(CLI::Range(1u, 256u));
  for (const auto& [flag, key] : numeric_flags()) sub->add_option(flag, fl.numbers[key]);
  for (const auto& [flag, key] : text_flags()) sub->add_option(flag, fl.texts[key]);
  sub->add_option("--z-re", fl.z_re, "Re z (z = a + ib)");
  sub->add_option("--z-im", fl.z_im, "Im z");
  sub->add_option("--potential", fl.potential, "zero, sech2, complex_sech2, pulsed_sech2, bump");
  sub->add_option("--amplitude", fl.amplitude, "potential amplitude");
  sub->add_option("--mu-rule", fl.mu_rule, "scaled or fixed");
}

RunConfig build_config(const std::string& experiment, const Flags& fl) {
  RunConfig c = fl.config.empty() ? RunConfig{} : RunConfig::load(fl.config);
  if (!c.experiment.empty() && c.experiment != experiment) {
    throw gclab::PreconditionError("config names experiment '" + c.experiment + "' but the subcommand is '" +
                                   experiment + "'");
  }
  c.experiment = experiment;
  for (const auto& [key, v] : fl.numbers) {
    if (v) c.set(key, *v);
  }
  for (const auto& [key, v] : fl.texts) {
    if (v) c.selection[key] = *v;
  }
  if (fl.fail_fast) c.selection["fail_fast"] = "true";
  if (fl.z_re || fl.z_im) {
    const gclab::cplx base = c.z.value_or(gclab::cplx(0.0, 1.0));
    c.z = gclab::cplx(fl.z_re.value_or(base.real()), fl.z_im.value_or(base.imag()));
  }
  if (fl.potential) c.potential_id = *fl.potential;
  if (fl.amplitude) c.amplitude = *fl.amplitude;
  if (fl.mu_rule) c.mu_rule = *fl.mu_rule;
  if (!fl.out.empty()) c.out_dir = fl.out;
  c.assert_checks = c.assert_checks || fl.assert_checks;
  c.assert_positive = c.assert_positive || fl.assert_positive;
  return c;
}

fs::path output_dir(const RunConfig& c) {
  const char* env = std::getenv("GCLAB_OUT");
  const fs::path root = env && *env ? fs::path(env) : fs::path("runs");
  if (!c.out_dir) return root / c.experiment;
  const fs::path p(*c.out_dir);
  return p.is_absolute() || !(env && *env) ? p : root / p;
}

int run(const std::string& experiment, const Flags& fl) {
  RunConfig cfg = build_config(experiment, fl);
  const fs::path out = output_dir(cfg);
  const auto rec = gclab::lab::run_experiment(cfg, out, fl.threads);
  for (const auto& k : rec.checks) {
    std::cout << (k.passed ? "PASS  " : "FAIL  ") << k.name << "  value=" << gclab::format_double(k.value)
              << "  threshold=" << gclab::format_double(k.threshold);
    if (!k.detail.empty()) std::cout << "  " << k.detail;
    std::cout << "\n";
  }
  if (!rec.error.empty()) std::cerr << "error: " << rec.error << "\n";
  std::cout << "record: " << (out / "run_record.json").string() << "\n";
  return rec.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gclab: Gaussian-mean, Carleman and Hardy-threshold laboratory"};
  app.set_version_flag("--version", gclab::kVersion);
  app.require_subcommand(1);
  Flags fl;
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : gclab::lab::experiment_names()) {
    auto* sub = app.add_subcommand(name);
    add_flags(sub, fl);
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      return run(name, fl);
    } catch (const gclab::PreconditionError& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return 1;
}
