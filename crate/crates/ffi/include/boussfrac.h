#ifndef BOUSSFRAC_H
#define BOUSSFRAC_H

#include <stddef.h>
#include <stdint.h>

/*
 Result codes.
 */
typedef enum BfStatus {
  BF_STATUS_OK = 0,
  BF_STATUS_NULL_POINTER = 1,
  BF_STATUS_INVALID_ARGUMENT = 2,
  BF_STATUS_CONFIG = 3,
  BF_STATUS_DOMAIN = 4,
  BF_STATUS_BLOW_UP = 5,
  BF_STATUS_IO = 6,
  BF_STATUS_COUNTEREXAMPLE = 7,
  BF_STATUS_BUFFER_TOO_SMALL = 8,
  BF_STATUS_PANIC = 9,
} BfStatus;

/*
 Solver configuration.
 */
typedef struct BfConfig BfConfig;

/*
 Time series, verdicts and metadata of one run or study.
 */
typedef struct BfReport BfReport;

/*
 A `(zeta, u, t)` state on a periodic grid.
 */
typedef struct BfState BfState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *bf_version(void);

/*
 Message of the last failure on this thread; valid until the next call
 that fails on the same thread.
 */
const char *bf_last_error(void);

/*
 Default configuration.

 # Safety
 `out` must be a valid pointer.
 */
enum BfStatus bf_config_new(struct BfConfig **out);

/*
 Sets one `key = value` entry using the config-file syntax.

 # Safety
 `cfg` must come from `bf_config_new`; `key` and `value` must be
 NUL-terminated strings.
 */
enum BfStatus bf_config_set(struct BfConfig *cfg, const char *key, const char *value);

/*
 # Safety
 `cfg` must come from `bf_config_new` or be null.
 */
void bf_config_free(struct BfConfig *cfg);

/*
 Initial data selected by the configuration's `data` key.

 # Safety
 `cfg` must be a live handle and `out` a valid pointer.
 */
enum BfStatus bf_state_from_config(const struct BfConfig *cfg, struct BfState **out);

/*
 State from `n` samples of `zeta` and `u` on `[-half_length, half_length)`.

 # Safety
 `zeta` and `u` must point to `n` doubles; `out` must be valid.
 */
enum BfStatus bf_state_new(double half_length,
                           uintptr_t n,
                           const double *zeta,
                           const double *u,
                           struct BfState **out);

/*
 Number of grid nodes.

 # Safety
 `state` must be live and `n` valid.
 */
enum BfStatus bf_state_len(const struct BfState *state, uintptr_t *n);

/*
 Copies the samples of `zeta` and `u` into arrays of length `n`.

 # Safety
 `zeta` and `u` must hold `n` doubles.
 */
enum BfStatus bf_state_samples(const struct BfState *state, double *zeta, double *u, uintptr_t n);

/*
 Time stamp and total entropy of a state.

 # Safety
 `state` must be live; `t` and `entropy` may be null.
 */
enum BfStatus bf_state_info(const struct BfState *state, double *t, double *entropy);

/*
 # Safety
 `state` must come from this library or be null.
 */
void bf_state_free(struct BfState *state);

/*
 Evolves `state` to the configured final time with the configured
 monitors. `report` and `final_state` may be null when not wanted.

 # Safety
 Handles must be live; out pointers valid or null.
 */
enum BfStatus bf_evolve(const struct BfConfig *cfg,
                        const struct BfState *state,
                        struct BfReport **report,
                        struct BfState **final_state);

/*
 Runs a study by its CLI name (`converge-eps`, `bona-smith`, ...).

 # Safety
 `cfg` must be live, `study` NUL-terminated, `out` valid.
 */
enum BfStatus bf_study_run(const struct BfConfig *cfg, const char *study, struct BfReport **out);

/*
 `|K|_{L^1}` and `|K_x|_{L^1} (eps t)^{1/lambda}` of the kernel of
 `exp(-eps t |xi|^lambda)`. Either out pointer may be null.

 # Safety
 Out pointers valid or null.
 */
enum BfStatus bf_kernel_norms(double lambda, double eps, double t, double *l1, double *dx_scaled);

/*
 1 if every verdict passed, else 0.

 # Safety
 `report` must be live and `pass` valid.
 */
enum BfStatus bf_report_pass(const struct BfReport *report, int *pass);

/*
 Writes the report as JSON into `buf`. With a null or short buffer the
 call fails with `BufferTooSmall` and `*len` holds the size needed.

 # Safety
 `buf` must hold `cap` bytes or be null; `len` valid or null.
 */
enum BfStatus bf_report_json(const struct BfReport *report,
                             char *buf,
                             uintptr_t cap,
                             uintptr_t *len);

/*
 Same as `bf_report_json` for the CSV table.

 # Safety
 As `bf_report_json`.
 */
enum BfStatus bf_report_csv(const struct BfReport *report,
                            char *buf,
                            uintptr_t cap,
                            uintptr_t *len);

/*
 # Safety
 `report` must come from this library or be null.
 */
void bf_report_free(struct BfReport *report);

/*
 Runs the command-line front end on `argv[0..argc]` and returns its exit
 code (0 pass, 2 fail, 1 usage or configuration error).

 # Safety
 `argv` must hold `argc` NUL-terminated strings.
 */
int bf_cli_run(int argc, const char *const *argv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOUSSFRAC_H */
