// Command-line front end for the dispatch toolkit. Talks to the shared
// library exclusively through its C interface.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmdp/mmdp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int exit_code(mmdp_status status) {
  switch (status) {
    case MMDP_OK: return kExitOk;
    case MMDP_ERR_CONFIG:
    case MMDP_ERR_INVALID_ARGUMENT: return kExitConfig;
    default: return kExitRuntime;
  }
}

int fail(mmdp_status status) {
  std::cerr << "error: " << mmdp_last_error() << "\n";
  return exit_code(status);
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

struct ConfigDeleter {
  void operator()(mmdp_config* c) const { mmdp_config_free(c); }
};
using ConfigPtr = std::unique_ptr<mmdp_config, ConfigDeleter>;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::string policy;
  std::int64_t seed = -1;
  int trials = -1;
  double duration = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_out_dir) {
  cmd->add_option("--config", opts.config_path, "configuration file (JSON)");
  if (with_out_dir)
    cmd->add_option("--out", opts.out_dir, "output directory")->required();
  cmd->add_option("--seed", opts.seed, "master random seed");
  cmd->add_option("--policy", opts.policy, "restrict to a single policy");
  cmd->add_option("--trials", opts.trials, "number of trials");
  cmd->add_option("--duration", opts.duration, "trial duration in seconds");
  cmd->add_option("--override", opts.overrides, "config override key.path=value (repeatable)");
}

ConfigPtr load_config(const CommonOpts& opts, int& rc) {
  std::string text;
  if (!opts.config_path.empty() && !read_file(opts.config_path, text)) {
    std::cerr << "error: cannot read config file " << opts.config_path << "\n";
    rc = kExitConfig;
    return nullptr;
  }
  ConfigPtr config(mmdp_config_create(text.c_str()));
  if (!config) {
    rc = fail(MMDP_ERR_CONFIG);
    return nullptr;
  }
  std::vector<std::string> overrides;
  if (opts.seed >= 0) overrides.push_back("seed=" + std::to_string(opts.seed));
  if (!opts.policy.empty()) overrides.push_back("policies=[\"" + opts.policy + "\"]");
  if (opts.trials >= 0) overrides.push_back("sim.trials=" + std::to_string(opts.trials));
  if (opts.duration >= 0.0) overrides.push_back("sim.duration_s=" + std::to_string(opts.duration));
  overrides.insert(overrides.end(), opts.overrides.begin(), opts.overrides.end());
  for (const std::string& kv : overrides) {
    const mmdp_status st = mmdp_config_override(config.get(), kv.c_str());
    if (st != MMDP_OK) {
      rc = fail(st);
      return nullptr;
    }
  }
  rc = kExitOk;
  return config;
}

int emit(const char* text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kExitRuntime;
  }
  out << text << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"micro-mobility dispatch experiments"};
  app.require_subcommand(1);

  CommonOpts run_opts, b1_opts, smin_opts;
  std::vector<double> b1_values{0.0, 0.1, 0.3, 0.5};
  std::vector<double> smin_values{0.3, 0.35, 0.4, 0.5, 0.7, 1.0};
  int smin_instances = 30;

  CLI::App* run = app.add_subcommand("run", "simulate the configured policies");
  add_common(run, run_opts, true);

  CLI::App* sb1 = app.add_subcommand("sweep-b1", "wait time as a function of the station weight");
  add_common(sb1, b1_opts, true);
  sb1->add_option("--values", b1_values, "station-weight values")->delimiter(',');

  CLI::App* ssm = app.add_subcommand("sweep-smin",
                                     "reverse-anneal quality as a function of the pause point");
  add_common(ssm, smin_opts, true);
  ssm->add_option("--values", smin_values, "pause-point values")->delimiter(',');
  ssm->add_option("--instances", smin_instances, "number of random instances");

  std::string problem_path, report_path;
  bool with_timing = false;
  CommonOpts solve_opts;
  CLI::App* solve = app.add_subcommand("solve", "sample a serialized problem");
  solve->add_option("problem", problem_path, "problem file (JSON)")->required();
  solve->add_option("--config", solve_opts.config_path, "configuration file (JSON)");
  solve->add_option("--seed", solve_opts.seed, "master random seed");
  solve->add_option("--override", solve_opts.overrides, "config override (repeatable)");
  solve->add_option("--out", report_path, "report file (default: stdout)");
  solve->add_flag("--timing", with_timing, "include wall-clock timing (not reproducible)");

  std::string oracle_problem_path, oracle_out_path;
  CLI::App* oracle = app.add_subcommand("oracle", "exhaustive minimum of a serialized problem");
  oracle->add_option("problem", oracle_problem_path, "problem file (JSON)")->required();
  oracle->add_option("--out", oracle_out_path, "result file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (run->parsed()) {
    int rc = 0;
    ConfigPtr config = load_config(run_opts, rc);
    if (!config) return rc;
    const mmdp_status st = mmdp_run(config.get(), run_opts.out_dir.c_str());
    return st == MMDP_OK ? kExitOk : fail(st);
  }

  if (sb1->parsed()) {
    int rc = 0;
    ConfigPtr config = load_config(b1_opts, rc);
    if (!config) return rc;
    const mmdp_status st = mmdp_sweep_b1(config.get(), b1_values.data(), b1_values.size(),
                                         b1_opts.out_dir.c_str());
    return st == MMDP_OK ? kExitOk : fail(st);
  }

  if (ssm->parsed()) {
    int rc = 0;
    ConfigPtr config = load_config(smin_opts, rc);
    if (!config) return rc;
    const mmdp_status st = mmdp_sweep_smin(config.get(), smin_values.data(), smin_values.size(),
                                           smin_instances, smin_opts.out_dir.c_str());
    return st == MMDP_OK ? kExitOk : fail(st);
  }

  if (solve->parsed()) {
    int rc = 0;
    ConfigPtr config = load_config(solve_opts, rc);
    if (!config) return rc;
    std::string text;
    if (!read_file(problem_path, text)) {
      std::cerr << "error: cannot read problem file " << problem_path << "\n";
      return kExitConfig;
    }
    mmdp_qubo* problem = mmdp_qubo_from_json(text.c_str());
    if (!problem) return fail(MMDP_ERR_INVALID_ARGUMENT);
    char* report = mmdp_solve(problem, config.get(), with_timing ? 1 : 0);
    mmdp_qubo_free(problem);
    if (!report) return fail(MMDP_ERR_RUNTIME);
    const int rc2 = emit(report, report_path);
    mmdp_string_free(report);
    return rc2;
  }

  if (oracle->parsed()) {
    std::string text;
    if (!read_file(oracle_problem_path, text)) {
      std::cerr << "error: cannot read problem file " << oracle_problem_path << "\n";
      return kExitConfig;
    }
    mmdp_qubo* problem = mmdp_qubo_from_json(text.c_str());
    if (!problem) return fail(MMDP_ERR_INVALID_ARGUMENT);
    char* result = mmdp_oracle(problem);
    mmdp_qubo_free(problem);
    if (!result) return fail(MMDP_ERR_RUNTIME);
    const int rc2 = emit(result, oracle_out_path);
    mmdp_string_free(result);
    return rc2;
  }

  return kExitConfig;
}
