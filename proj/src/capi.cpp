#include "mmdp/mmdp.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "experiment.hpp"
#include "json.hpp"
#include "qubo.hpp"
#include "solver.hpp"

using nlohmann::json;

struct mmdp_config {
  nlohmann::json raw;               // as supplied plus overrides
  mmdp::ExperimentConfig parsed;    // validated view
};

struct mmdp_qubo {
  mmdp::QuboProblem problem;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mmdp_status status_of(const std::exception& e) {
  if (dynamic_cast<const mmdp::ConfigError*>(&e)) return MMDP_ERR_CONFIG;
  if (dynamic_cast<const std::invalid_argument*>(&e) ||
      dynamic_cast<const std::out_of_range*>(&e))
    return MMDP_ERR_INVALID_ARGUMENT;
  return MMDP_ERR_RUNTIME;
}

template <typename F>
mmdp_status guarded(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MMDP_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return status_of(e);
  } catch (...) {
    set_error("unknown error");
    return MMDP_ERR_RUNTIME;
  }
}

template <typename F>
auto guarded_ptr(F&& fn) -> decltype(fn()) {
  try {
    auto out = fn();
    g_last_error.clear();
    return out;
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  } catch (...) {
    set_error("unknown error");
    return nullptr;
  }
}

std::vector<double> to_vector(const double* values, size_t n) {
  if (n > 0 && values == nullptr) throw std::invalid_argument("value array is null");
  return std::vector<double>(values, values + n);
}

}  // namespace

extern "C" {

const char* mmdp_version(void) { return "1.0.0"; }

const char* mmdp_last_error(void) { return g_last_error.c_str(); }

void mmdp_string_free(char* s) { std::free(s); }

mmdp_config* mmdp_config_create(const char* json_text) {
  return guarded_ptr([&]() -> mmdp_config* {
    const std::string text = (json_text && *json_text) ? json_text : "{}";
    auto* config = new mmdp_config;
    try {
      config->raw = json::parse(text);
    } catch (const std::exception& e) {
      delete config;
      throw mmdp::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
      config->parsed = mmdp::ExperimentConfig::from_json_text(config->raw.dump());
    } catch (...) {
      delete config;
      throw;
    }
    return config;
  });
}

void mmdp_config_free(mmdp_config* config) { delete config; }

mmdp_status mmdp_config_override(mmdp_config* config, const char* key_equals_value) {
  return guarded([&] {
    if (!config) throw std::invalid_argument("config is null");
    if (!key_equals_value) throw std::invalid_argument("override is null");
    const std::string kv = key_equals_value;
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw mmdp::ConfigError("override must look like key.path=value");
    std::string path = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    for (char& ch : path)
      if (ch == '.') ch = '/';
    json parsed;
    try {
      parsed = json::parse(value);
    } catch (...) {
      parsed = value;  // plain string
    }
    json candidate = config->raw;
    candidate[json::json_pointer("/" + path)] = parsed;
    // validate before committing
    mmdp::ExperimentConfig next = mmdp::ExperimentConfig::from_json_text(candidate.dump());
    config->raw = std::move(candidate);
    config->parsed = std::move(next);
  });
}

char* mmdp_config_json(const mmdp_config* config) {
  return guarded_ptr([&]() -> char* {
    if (!config) throw std::invalid_argument("config is null");
    return dup_string(config->parsed.to_json_text());
  });
}

mmdp_status mmdp_run(const mmdp_config* config, const char* out_dir) {
  return guarded([&] {
    if (!config || !out_dir) throw std::invalid_argument("config and out_dir are required");
    const mmdp::ExperimentResult result = mmdp::run_experiment(config->parsed);
    mmdp::write_result_files(config->parsed, result, "run", out_dir);
  });
}

mmdp_status mmdp_sweep_b1(const mmdp_config* config, const double* b1_values, size_t n_values,
                          const char* out_dir) {
  return guarded([&] {
    if (!config || !out_dir) throw std::invalid_argument("config and out_dir are required");
    const auto values = to_vector(b1_values, n_values);
    const mmdp::ExperimentResult result = mmdp::sweep_b1(config->parsed, values);
    mmdp::write_result_files(config->parsed, result, "sweep-b1", out_dir);
  });
}

mmdp_status mmdp_sweep_smin(const mmdp_config* config, const double* smin_values, size_t n_values,
                            int instance_count, const char* out_dir) {
  return guarded([&] {
    if (!config || !out_dir) throw std::invalid_argument("config and out_dir are required");
    const auto values = to_vector(smin_values, n_values);
    const mmdp::ExperimentResult result =
        mmdp::sweep_smin(config->parsed, values, instance_count);
    mmdp::write_result_files(config->parsed, result, "sweep-smin", out_dir);
  });
}

mmdp_qubo* mmdp_qubo_from_json(const char* json_text) {
  return guarded_ptr([&]() -> mmdp_qubo* {
    if (!json_text) throw std::invalid_argument("json_text is null");
    auto* q = new mmdp_qubo{mmdp::QuboProblem::from_json(json_text)};
    return q;
  });
}

void mmdp_qubo_free(mmdp_qubo* problem) { delete problem; }

char* mmdp_qubo_to_json(const mmdp_qubo* problem) {
  return guarded_ptr([&]() -> char* {
    if (!problem) throw std::invalid_argument("problem is null");
    return dup_string(problem->problem.to_json());
  });
}

int mmdp_qubo_num_vars(const mmdp_qubo* problem) {
  return problem ? problem->problem.num_vars() : -1;
}

mmdp_status mmdp_qubo_energy(const mmdp_qubo* problem, const uint8_t* bits, size_t n_bits,
                             double* out_energy) {
  return guarded([&] {
    if (!problem || !bits || !out_energy)
      throw std::invalid_argument("problem, bits and out_energy are required");
    *out_energy = problem->problem.energy({bits, n_bits});
  });
}

char* mmdp_solve(const mmdp_qubo* problem, const mmdp_config* config, int with_timing) {
  return guarded_ptr([&]() -> char* {
    if (!problem) throw std::invalid_argument("problem is null");
    mmdp::ExperimentConfig cfg =
        config ? config->parsed : mmdp::ExperimentConfig::from_json_text("{}");
    return dup_string(
        mmdp::solve_problem_text(problem->problem.to_json(), cfg, with_timing != 0));
  });
}

char* mmdp_oracle(const mmdp_qubo* problem) {
  return guarded_ptr([&]() -> char* {
    if (!problem) throw std::invalid_argument("problem is null");
    return dup_string(mmdp::oracle_problem_text(problem->problem.to_json()));
  });
}

}  // extern "C"
