#ifndef CHAINSKIP_H
#define CHAINSKIP_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum cs_scheme {
  CS_SCHEME_BASELINE = 0,
  CS_SCHEME_SKIPPER = 1,
  CS_SCHEME_SKIPPER_G = 2,
} cs_scheme;

/*
 Result of every fallible call.
 */
typedef enum cs_status {
  CS_STATUS_OK = 0,
  CS_STATUS_INTERNAL = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_IO = 3,
  CS_STATUS_EMBEDDING_FAILED = 4,
  CS_STATUS_NULL_POINTER = 5,
  CS_STATUS_NOT_AVAILABLE = 6,
  CS_STATUS_PANIC = 7,
} cs_status;

/*
 An Ising model.
 */
typedef struct cs_model cs_model;

/*
 The report of one run.
 */
typedef struct cs_report cs_report;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failing call on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *cs_last_error(void);

/*
 Frees a string returned by this library. Null is ignored.
 */
void cs_string_free(char *s);

/*
 Parses a model from its JSON form.
 */
enum cs_status cs_model_from_json(const char *json, struct cs_model **out);

/*
 Seeded Barabasi-Albert model with standard-normal couplings. Linear
 terms are standard normal when `normal_linear` is set, zero otherwise.
 */
enum cs_status cs_model_generate_ba(size_t n,
                                    size_t m,
                                    uint64_t seed,
                                    bool normal_linear,
                                    struct cs_model **out);

void cs_model_free(struct cs_model *model);

/*
 Number of variables, or 0 for a null handle.
 */
size_t cs_model_num_variables(const struct cs_model *model);

/*
 Variable ids in ascending order, written to `ids` (capacity `len`).
 */
enum cs_status cs_model_variables(const struct cs_model *model, uint32_t *ids, size_t len);

enum cs_status cs_model_to_json(const struct cs_model *model, char **out);

/*
 Energy of the assignment giving `spins[k]` (`-1` or `+1`) to the k-th
 variable in ascending id order. `len` must equal the variable count.
 */
enum cs_status cs_model_energy(const struct cs_model *model,
                               const int8_t *spins,
                               size_t len,
                               double *out);

/*
 Exhaustive ground state. `spins` (capacity `len`) receives the state in
 ascending id order; it may be null when `len` is 0.
 */
enum cs_status cs_model_ground_state(const struct cs_model *model,
                                     int8_t *spins,
                                     size_t len,
                                     double *energy);

/*
 Runs a scheme on `model`. `config_json` is an experiment configuration
 object (null for defaults); its `model` field is ignored.
 */
enum cs_status cs_run(const struct cs_model *model,
                      const char *config_json,
                      struct cs_report **out);

void cs_report_free(struct cs_report *report);

/*
 Best energy found, NaN for a null handle.
 */
double cs_report_best_energy(const struct cs_report *report);

/*
 QMIs executed, 0 for a null handle.
 */
size_t cs_report_n_qmi(const struct cs_report *report);

/*
 Gap to the exact optimum; `NotAvailable` when the model was too large
 to enumerate.
 */
enum cs_status cs_report_energy_residual(const struct cs_report *report, double *out);

enum cs_status cs_report_to_json(const struct cs_report *report, char **out);

/*
 Sequential end-to-end runtime in seconds under the default timing
 assumptions.
 */
enum cs_status cs_runtime_total(enum cs_scheme scheme,
                                size_t n_qmi,
                                size_t cuts,
                                bool dedicated,
                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHAINSKIP_H */
