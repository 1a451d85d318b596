/* branchtail C API: simulation of integer-valued branching processes with
 * immigration, exact generating-function oracles, and heavy-tail statistics.
 *
 * All objects are opaque handles created/destroyed through this interface.
 * Functions return BT_OK (0) on success or an error code; bt_last_error()
 * gives a thread-local message for the most recent failure on the calling
 * thread.  Strings returned through char** are owned by the caller and must
 * be released with bt_string_free().
 */
#ifndef BRANCHTAIL_H
#define BRANCHTAIL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define BT_OK 0
#define BT_ERR_INVALID_ARGUMENT 1 /* bad parameters or malformed config */
#define BT_ERR_NOT_ERGODIC 2      /* model fails the stationarity gate */
#define BT_ERR_RUNTIME 3          /* statistical guard or numeric failure */
#define BT_ERR_IO 4               /* file system problem */

typedef struct bt_rng bt_rng;
typedef struct bt_dist bt_dist;
typedef struct bt_model bt_model;
typedef struct bt_result bt_result;

const char* bt_version(void);
const char* bt_last_error(void);
void bt_string_free(char* s);

/* Random streams: (master_seed, stream_index) determines the sequence. */
int bt_rng_create(uint64_t master_seed, uint64_t stream_index, bt_rng** out);
void bt_rng_free(bt_rng* rng);

/* Distributions, specified as JSON, e.g.
 *   {"family":"discrete_pareto","alpha":0.8,"scale":1.0}            */
int bt_dist_from_json(const char* json, bt_dist** out);
void bt_dist_free(bt_dist* dist);
int bt_dist_to_json(const bt_dist* dist, char** out);
int bt_dist_sample(const bt_dist* dist, bt_rng* rng, uint64_t* out);
int bt_dist_tail(const bt_dist* dist, uint64_t x, double* out);   /* P(X > x) */
int bt_dist_pgf(const bt_dist* dist, double s, double* out);      /* E s^X    */
int bt_dist_moments(const bt_dist* dist, double* mean, double* second_moment,
                    int* log_moment_finite);

/* Models, specified as JSON, e.g.
 *   {"offspring":{"family":"bernoulli","p":0.5},
 *    "immigration":{"family":"discrete_pareto","alpha":0.8},
 *    "variant":"sum","regime":"model1"}                            */
int bt_model_from_json(const char* json, bt_model** out);
void bt_model_free(bt_model* model);
int bt_model_ergodicity(const bt_model* model, double* mu, int* log_moment_ok,
                        double* fw_integral, int* ergodic);
/* Simulates `length` post-burn-in states into caller storage. */
int bt_model_simulate(const bt_model* model, int64_t length, int64_t burn_in,
                      uint64_t master_seed, uint64_t stream, uint64_t* values);
/* One stationary draw via the backward series (automatic depth). */
int bt_model_stationary_sample(const bt_model* model, bt_rng* rng, uint64_t* out);

/* Experiment orchestration.  config_json holds the full experiment config
 * (see the README for schemas); writes <out_dir>/<experiment>.csv and
 * <out_dir>/<experiment>.summary.json.  seed_override < 0 keeps the config
 * seed; threads <= 0 selects the hardware default.  Outputs are byte-stable
 * across reruns and thread counts. */
int bt_experiment_run(const char* config_json, const char* out_dir,
                      int64_t seed_override, int threads, bt_result** out);
const char* bt_result_digest(const bt_result* result);
const char* bt_result_summary_json(const bt_result* result);
void bt_result_free(bt_result* result);

/* Validates a config; on success writes the normalized config JSON. */
int bt_config_validate(const char* config_json, char** normalized_out);

#ifdef __cplusplus
}
#endif

#endif /* BRANCHTAIL_H */
