// Copyright 2026 The chi-contract Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CHICONTRACT_C_API_H_
#define CHICONTRACT_C_API_H_

#include <stddef.h>
#include <stdint.h>

#if defined(CHICONTRACT_BUILDING_SHARED)
#define CC_API __attribute__((visibility("default")))
#else
#define CC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cc_status {
  CC_OK = 0,
  CC_INVALID_ARGUMENT = 1,
  CC_OUT_OF_RANGE = 2,
  CC_FAILED_PRECONDITION = 3,
  CC_RESOURCE_EXHAUSTED = 4,
  CC_UNIMPLEMENTED = 5,
  CC_INTERNAL = 6,
} cc_status_t;

typedef struct cc_channel cc_channel_t;
typedef struct cc_family cc_family_t;
typedef struct cc_hmatrix cc_hmatrix_t;

/* Message of the last failed call on this thread; never NULL. */
CC_API const char* cc_last_error(void);
/* Name of a status code, e.g. "INVALID_ARGUMENT". */
CC_API const char* cc_status_name(cc_status_t status);
/* Frees strings returned through char** out-parameters. */
CC_API void cc_free_string(char* s);
CC_API const char* cc_version(void);

/* Channels. JSON form: {"k": K, "m": M, "W": [[...], ...]} with one row per
 * output letter. */
CC_API cc_status_t cc_channel_from_json(const char* json, cc_channel_t** out);
CC_API cc_status_t cc_channel_to_json(const cc_channel_t* w, char** out);
/* name: identity, constant, parity, quantizer, randomized_response.
 * param: m for constant, bits for quantizer, rho for randomized_response. */
CC_API cc_status_t cc_channel_standard(const char* name, int k, double param,
                                       cc_channel_t** out);
/* signs has k/2 entries in {-1, +1}. */
CC_API cc_status_t cc_channel_pair_partition(const int* signs, size_t count,
                                             cc_channel_t** out);
/* Random channel with 2^bits outputs. */
CC_API cc_status_t cc_channel_random_comm(int k, int bits, uint64_t seed,
                                          cc_channel_t** out);
/* Random rho-LDP channel with m outputs. */
CC_API cc_status_t cc_channel_random_ldp(int k, int m, double rho, uint64_t seed,
                                         cc_channel_t** out);
CC_API int cc_channel_k(const cc_channel_t* w);
CC_API int cc_channel_m(const cc_channel_t* w);
/* Checks bits >= 1 (communication) or rho > 0 (privacy); exactly one of them
 * must be set, the other left at 0. Writes the constraint verdict and a JSON
 * report with the H(W) norms against their bounds. */
CC_API cc_status_t cc_channel_check(const cc_channel_t* w, int bits, double rho,
                                    int* satisfied, char** report_json);
CC_API void cc_channel_free(cc_channel_t* w);

/* H(W) and the mean of H(W_j) over a sequence. */
CC_API cc_status_t cc_hmatrix_compute(const cc_channel_t* w, cc_hmatrix_t** out);
CC_API cc_status_t cc_hmatrix_average(const cc_channel_t* const* channels,
                                      size_t count, cc_hmatrix_t** out);
CC_API double cc_hmatrix_nuclear(const cc_hmatrix_t* h);
CC_API double cc_hmatrix_frobenius_sq(const cc_hmatrix_t* h);
CC_API double cc_hmatrix_spectral_radius(const cc_hmatrix_t* h);
CC_API cc_status_t cc_hmatrix_to_json(const cc_hmatrix_t* h, char** out);
/* exact_log_mgf is NaN when the dimension is too large to enumerate. */
CC_API cc_status_t cc_chaos_mgf(const cc_hmatrix_t* h, double lambda,
                                double* exact_log_mgf, double* bound, int* valid);
CC_API void cc_hmatrix_free(cc_hmatrix_t* h);

/* Families. JSON form: {"q": [...], "scale": s,
 * "zeta": "rademacher" | {"matrix_V": [[...]]}}. */
CC_API cc_status_t cc_family_paninski(int k, double eps, cc_family_t** out);
CC_API cc_status_t cc_family_from_json(const char* json, cc_family_t** out);
CC_API cc_status_t cc_family_to_json(const cc_family_t* f, char** out);
CC_API int cc_family_k(const cc_family_t* f);
CC_API void cc_family_free(cc_family_t* f);

/* kind: chi2 | decoupled | induced_chi2 | induced_decoupled | ingster.
 * chi2 and decoupled ignore the channels; induced_chi2 uses channels[0];
 * induced_decoupled uses all of them; ingster uses the channels when given
 * and otherwise n raw samples. options_json may be NULL or
 * {"mc_samples": N, "seed": S, "method": "closed_form"|"exhaustive"|"monte_carlo"}.
 * Writes a JSON report. */
CC_API cc_status_t cc_fluctuation(const cc_family_t* f,
                                  const cc_channel_t* const* channels,
                                  size_t count, int n, const char* kind,
                                  const char* options_json, char** report_json);

/* Exact {chi2, tv, bayes_error} of the n-player mixture against the nominal
 * product. With count == 0 the players see raw samples. */
CC_API cc_status_t cc_mixture_stats(const cc_family_t* f,
                                    const cc_channel_t* const* channels,
                                    size_t count, int n, char** report_json);

/* The bottom-eigenspace family for the channel sequence. options_json may be
 * NULL or {"c": c, "C": C, "trials": T, "seed": S}. */
CC_API cc_status_t cc_adversary(const cc_channel_t* const* channels, size_t count,
                                double eps, const char* options_json,
                                cc_family_t** family_out, char** report_json);
CC_API cc_status_t cc_maxmin_gap(const cc_channel_t* const* channels, size_t count,
                                 double eps, char** report_json);

/* Lower-bound table. bits <= 0 or rho <= 0 omit that row. format: "json" or
 * "csv". */
CC_API cc_status_t cc_bound_table(int k, double eps, int bits, double rho,
                                  const char* format, char** out);
/* task: learning | testing_public | testing_private. Writes a JSON report. */
CC_API cc_status_t cc_bound_general(const char* task, int k, double eps,
                                    double sup_nuclear, double sup_frobenius,
                                    char** report_json);
CC_API cc_status_t cc_hamming_ball_log2(int m, int t, double* out);

/* config_json: {"n": N, "coin_mode": "private"|"public",
 * "statistic": "joint"|"sum", "seed": S,
 * "assignments": [{"weight": w, "channels": [channel, ...]}],
 * "family": family, "null": distribution (optional, defaults to the family
 * nominal), "trials": T}. `seed` and `trials` override the config when
 * nonnegative. Writes a trial-report/1 JSON document and, if counts_csv is
 * not NULL, the per-state counts as CSV. */
CC_API cc_status_t cc_simulate(const char* config_json, int64_t seed,
                               int64_t trials, char** report_json,
                               char** counts_csv);
CC_API cc_status_t cc_separation_demo(int k, int n, double eps, char** report_json);

/* Runs the invariant suite. all_pass is set to 1 iff every check passed. */
CC_API cc_status_t cc_verify(int quick, uint64_t seed, int* all_pass,
                             char** report_json);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // CHICONTRACT_C_API_H_
