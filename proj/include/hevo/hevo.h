/* Copyright 2026 The hevo Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef HEVO_HEVO_H
#define HEVO_HEVO_H

#include <stddef.h>
#include <stdint.h>

#if defined(HEVO_BUILDING_LIBRARY)
#define HEVO_API __attribute__((visibility("default")))
#else
#define HEVO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure the message is available
 * from hevo_last_error() on the same thread until the next failing call. */
typedef enum hevo_status {
  HEVO_OK = 0,
  HEVO_TAIL_TOO_LARGE = 1,
  HEVO_NON_FINITE_COEFFICIENT = 2,
  HEVO_UNSUPPORTED_INPUT = 3,
  HEVO_INVALID_WEIGHTS = 4,
  HEVO_NOT_MARKOV = 5,
  HEVO_INVALID_PARAMETER = 6,
  HEVO_MISSING_CERTIFICATE = 7,
  HEVO_PARSE_ERROR = 8,
  HEVO_IO_ERROR = 9,
  HEVO_INVALID_ARGUMENT = 10,
  HEVO_INTERNAL_ERROR = 11
} hevo_status;

typedef enum hevo_method {
  HEVO_METHOD_SCHUR = 0,
  HEVO_METHOD_HILBERT_SCHMIDT = 1,
  HEVO_METHOD_ROWSUM = 2
} hevo_method;

typedef struct hevo_policy {
  size_t cutoff;
  double abs_tol;
  double max_tail;
} hevo_policy;

typedef struct hevo_element hevo_element;
typedef struct hevo_kernel hevo_kernel;
typedef struct hevo_distribution hevo_distribution;
typedef struct hevo_certificate hevo_certificate;
typedef struct hevo_simulation hevo_simulation;

HEVO_API const char* hevo_status_name(hevo_status status);
HEVO_API const char* hevo_last_error(void);
HEVO_API hevo_policy hevo_default_policy(void);

/* Strings returned through char** are owned by the caller. */
HEVO_API void hevo_string_free(char* s);

/* Shortest round-trip text of x (integral values keep ".0"), NUL-terminated
 * in buf. Returns the untruncated length; 32 bytes always suffice. */
HEVO_API size_t hevo_format_double(double x, char* buf, size_t size);

/* ---- elements ---------------------------------------------------------- */

HEVO_API hevo_status hevo_element_basis(uint64_t index, hevo_element** out);
HEVO_API hevo_status hevo_element_parse(const char* text, hevo_element** out);
HEVO_API hevo_status hevo_element_load(const char* path, hevo_element** out);
HEVO_API void hevo_element_free(hevo_element* e);

HEVO_API size_t hevo_element_size(const hevo_element* e);
HEVO_API hevo_status hevo_element_entry(const hevo_element* e, size_t pos, uint64_t* index,
                                        double* value);
HEVO_API double hevo_element_tail(const hevo_element* e);
HEVO_API double hevo_element_norm(const hevo_element* e);
HEVO_API hevo_status hevo_element_format(const hevo_element* e, char** out);

/* ---- kernels ----------------------------------------------------------- */

/* Kernel text: `kernel v1`, then a `builtin ...` line or `row i k p` lines
 * closed by `end`. */
HEVO_API hevo_status hevo_kernel_parse(const char* text, hevo_kernel** out);
HEVO_API hevo_status hevo_kernel_load(const char* path, hevo_kernel** out);
HEVO_API void hevo_kernel_free(hevo_kernel* k);
HEVO_API const char* hevo_kernel_description(const hevo_kernel* k);

/* Writes the number of violations among the first `states` states and a
 * human-readable report. */
HEVO_API hevo_status hevo_kernel_validate(const hevo_kernel* k, size_t states,
                                          const hevo_policy* policy, size_t* violations,
                                          char** report);

/* ---- algebra and operator (structure constants c_ki = p_ik) ------------ */

HEVO_API hevo_status hevo_square(const hevo_kernel* k, uint64_t i, const hevo_policy* policy,
                                 hevo_element** out);
HEVO_API hevo_status hevo_product(const hevo_kernel* k, const hevo_element* v,
                                  const hevo_element* w, const hevo_policy* policy,
                                  hevo_element** out);
HEVO_API hevo_status hevo_evolution_apply(const hevo_kernel* k, const hevo_element* v,
                                          const hevo_policy* policy, hevo_element** out);
HEVO_API hevo_status hevo_continuity_bound(const hevo_kernel* k, const hevo_element* v,
                                           const hevo_policy* policy, double* m_v, int* exact);

/* alpha / beta may be NULL for unit weights. */
HEVO_API hevo_status hevo_certify(const hevo_kernel* k, hevo_method method,
                                  const hevo_element* alpha, const hevo_element* beta,
                                  const hevo_policy* policy, hevo_certificate** out);
HEVO_API void hevo_certificate_free(hevo_certificate* c);
HEVO_API int hevo_certificate_certified(const hevo_certificate* c);
/* HEVO_INVALID_ARGUMENT when the certificate is inconclusive. */
HEVO_API hevo_status hevo_certificate_norm_bound(const hevo_certificate* c, double* out);
/* M1 and M2 for Schur, m for RowSum (in m1), the HS sum (in m1), or the
 * offending partial sum (in m1) when inconclusive. m2 is 0 unless Schur. */
HEVO_API void hevo_certificate_constants(const hevo_certificate* c, double* m1, double* m2);
HEVO_API double hevo_certificate_measured_sup(const hevo_certificate* c);
HEVO_API hevo_status hevo_certificate_render(const hevo_certificate* c, char** out);

/* ---- distributions ----------------------------------------------------- */

HEVO_API hevo_status hevo_distribution_point(uint64_t state, hevo_distribution** out);
HEVO_API hevo_status hevo_distribution_parse(const char* text, double tol,
                                             hevo_distribution** out);
HEVO_API hevo_status hevo_distribution_load(const char* path, double tol,
                                            hevo_distribution** out);
HEVO_API void hevo_distribution_free(hevo_distribution* d);
HEVO_API size_t hevo_distribution_size(const hevo_distribution* d);
HEVO_API hevo_status hevo_distribution_entry(const hevo_distribution* d, size_t pos,
                                             uint64_t* state, double* probability);
HEVO_API double hevo_distribution_probability(const hevo_distribution* d, uint64_t state);
HEVO_API double hevo_distribution_deficit(const hevo_distribution* d);
/* `state<TAB>probability` rows then `#deficit <x>`. */
HEVO_API hevo_status hevo_distribution_format_tsv(const hevo_distribution* d, char** out);

HEVO_API hevo_status hevo_evolve(const hevo_kernel* k, const hevo_distribution* init,
                                 size_t steps, const hevo_policy* policy,
                                 hevo_distribution** out);
/* n-step law from `from`, computed independently of the operator. */
HEVO_API hevo_status hevo_nstep(const hevo_kernel* k, uint64_t from, size_t steps,
                                const hevo_policy* policy, hevo_distribution** out);

/* ---- Monte Carlo ------------------------------------------------------- */

HEVO_API hevo_status hevo_simulate(const hevo_kernel* k, const hevo_distribution* init,
                                   size_t steps, size_t paths, uint64_t seed,
                                   const hevo_policy* policy, hevo_simulation** out);
HEVO_API void hevo_simulation_free(hevo_simulation* s);
HEVO_API size_t hevo_simulation_paths(const hevo_simulation* s);
HEVO_API size_t hevo_simulation_escaped(const hevo_simulation* s);
HEVO_API size_t hevo_simulation_size(const hevo_simulation* s);
HEVO_API hevo_status hevo_simulation_entry(const hevo_simulation* s, size_t pos, uint64_t* state,
                                           size_t* count);

#ifdef __cplusplus
}
#endif

#endif /* HEVO_HEVO_H */
