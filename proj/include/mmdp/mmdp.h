/* Micro-mobility dispatch toolkit: C interface to the core library.
 *
 * All structured data crosses the boundary as JSON text; handles are opaque.
 * Functions returning a pointer yield NULL on failure, functions returning
 * mmdp_status yield a nonzero code; mmdp_last_error() describes the most
 * recent failure on the calling thread. Strings returned by the library must
 * be released with mmdp_string_free().
 */
#ifndef MMDP_H
#define MMDP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MMDP_API __declspec(dllexport)
#else
#define MMDP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmdp_status {
  MMDP_OK = 0,
  MMDP_ERR_INVALID_ARGUMENT = 1,
  MMDP_ERR_CONFIG = 2,
  MMDP_ERR_RUNTIME = 3
} mmdp_status;

typedef struct mmdp_config mmdp_config;
typedef struct mmdp_qubo mmdp_qubo;

MMDP_API const char* mmdp_version(void);

/* Message for the last failure on this thread; empty string if none. */
MMDP_API const char* mmdp_last_error(void);

MMDP_API void mmdp_string_free(char* s);

/* ---- configuration ---- */

/* Parses, fills defaults and validates. json_text may be NULL or "" for the
 * default configuration. */
MMDP_API mmdp_config* mmdp_config_create(const char* json_text);
MMDP_API void mmdp_config_free(mmdp_config* config);

/* Applies one dotted-path override, e.g. "weights.b1=0.5" or
 * "policies=[\"greedy\"]". Values parse as JSON when possible, else as
 * strings. */
MMDP_API mmdp_status mmdp_config_override(mmdp_config* config, const char* key_equals_value);

/* Effective configuration (defaults filled) as JSON. */
MMDP_API char* mmdp_config_json(const mmdp_config* config);

/* ---- experiments: write results.csv and summary.json under out_dir ---- */

MMDP_API mmdp_status mmdp_run(const mmdp_config* config, const char* out_dir);
MMDP_API mmdp_status mmdp_sweep_b1(const mmdp_config* config, const double* b1_values,
                                   size_t n_values, const char* out_dir);
MMDP_API mmdp_status mmdp_sweep_smin(const mmdp_config* config, const double* smin_values,
                                     size_t n_values, int instance_count, const char* out_dir);

/* ---- problems and solvers ---- */

MMDP_API mmdp_qubo* mmdp_qubo_from_json(const char* json_text);
MMDP_API void mmdp_qubo_free(mmdp_qubo* problem);
MMDP_API char* mmdp_qubo_to_json(const mmdp_qubo* problem);
MMDP_API int mmdp_qubo_num_vars(const mmdp_qubo* problem);

/* Energy of one bitstring (bits are 0/1 bytes, one per variable). */
MMDP_API mmdp_status mmdp_qubo_energy(const mmdp_qubo* problem, const uint8_t* bits,
                                      size_t n_bits, double* out_energy);

/* Samples the problem with the configured annealer; returns a report as
 * JSON. with_timing adds wall-clock fields, which are not reproducible. */
MMDP_API char* mmdp_solve(const mmdp_qubo* problem, const mmdp_config* config, int with_timing);

/* Exhaustive ground state as JSON {"bits": [...], "energy": ...}; problems
 * of more than 24 variables are rejected. */
MMDP_API char* mmdp_oracle(const mmdp_qubo* problem);

#ifdef __cplusplus
}
#endif

#endif /* MMDP_H */
