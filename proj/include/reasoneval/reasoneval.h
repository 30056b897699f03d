// Copyright 2026 The ReasonEval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the reasoneval library. Every call returns a status code;
 * on failure the thread-local reval_last_error() describes it. Strings
 * returned through char** are owned by the caller and released with
 * reval_string_free. Handles are opaque and released with their _free call;
 * passing NULL to a _free call is a no-op. */
#ifndef REASONEVAL_REASONEVAL_H_
#define REASONEVAL_REASONEVAL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define REVAL_API __declspec(dllexport)
#else
#define REVAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum reval_status {
  REVAL_OK = 0,
  REVAL_E_INVALID_ARGUMENT = 1,
  REVAL_E_IO = 2,
  REVAL_E_PARSE = 3,
  REVAL_E_CONFIG = 4,
  REVAL_E_PROVIDER_RETRIES = 5,
  REVAL_E_PROVIDER_TIMEOUT = 6,
  REVAL_E_PROVIDER_SCHEMA = 7,
  REVAL_E_PROVIDER_HTTP = 8,
  REVAL_E_ALL_ROWS_FAILED = 9,
  REVAL_E_INTERNAL = 10
} reval_status;

typedef struct reval_config reval_config;
typedef struct reval_record reval_record;
typedef struct reval_kb reval_kb;
typedef struct reval_report reval_report;

REVAL_API const char* reval_version(void);
REVAL_API const char* reval_status_name(reval_status status);
/* Message of the last failed call on this thread; "" when none. */
REVAL_API const char* reval_last_error(void);
REVAL_API void reval_string_free(char* s);

/* Config. path may be NULL for defaults. */
REVAL_API reval_status reval_config_load(const char* path, reval_config** out);
REVAL_API reval_status reval_config_from_json(const char* json, reval_config** out);
/* Overrides one top-level key with a JSON value, e.g. ("seed", "7"). */
REVAL_API reval_status reval_config_set(reval_config* config, const char* key, const char* json_value);
REVAL_API reval_status reval_config_to_json(const reval_config* config, char** out);
REVAL_API void reval_config_free(reval_config* config);

/* Records. Format follows the extension: .csv or .bin. */
REVAL_API reval_status reval_record_load(const char* path, reval_record** out);
REVAL_API reval_status reval_record_save(const reval_record* record, const char* path);
/* {record_id, sampling_rate_hz, n_samples, leads}. */
REVAL_API reval_status reval_record_info(const reval_record* record, char** out_json);
/* Copies up to capacity samples of one lead; *n_written receives the count. */
REVAL_API reval_status reval_record_lead(const reval_record* record, const char* lead, float* buffer,
                                         size_t capacity, size_t* n_written);
/* Feature table JSON. delineation_path may be NULL to run the builtin
 * delineator; config may be NULL for defaults. */
REVAL_API reval_status reval_record_features(const reval_record* record, const reval_config* config,
                                             const char* delineation_path, char** out_json);
/* Synthesizes a record from a spec JSON; truth_json (may be NULL) receives
 * the exact delineation. */
REVAL_API reval_status reval_synthesize(const char* spec_json, reval_record** out, char** truth_json);
REVAL_API void reval_record_free(reval_record* record);

/* Findings extracted from free text, as JSON. */
REVAL_API reval_status reval_extract(const char* text, const reval_config* config, char** out_json);

/* Knowledge base. */
REVAL_API reval_status reval_kb_build(const char* corpus_dir, const char* label_map_path,
                                      const reval_config* config, reval_kb** out, char** log_json);
REVAL_API reval_status reval_kb_load(const char* dir, reval_kb** out);
REVAL_API reval_status reval_kb_save(const reval_kb* kb, const char* dir);
REVAL_API size_t reval_kb_size(const reval_kb* kb);
REVAL_API reval_status reval_kb_query(const reval_kb* kb, const reval_config* config, const char* text, size_t k,
                                      char** out_json);
REVAL_API void reval_kb_free(reval_kb* kb);

/* Runs. When every row fails the report is still produced and the call
 * returns REVAL_E_ALL_ROWS_FAILED. */
REVAL_API reval_status reval_eval_run(const char* manifest_path, const reval_kb* kb, const reval_config* config,
                                      reval_report** out);
REVAL_API reval_status reval_assess(const char* manifest_path, int adversarial, const reval_config* config,
                                    reval_report** out);
/* Loads a report JSON and verifies it against its own per-trace entries. */
REVAL_API reval_status reval_report_load(const char* path, reval_report** out);
REVAL_API reval_status reval_report_to_json(const reval_report* report, char** out);
REVAL_API size_t reval_report_success_count(const reval_report* report);
REVAL_API size_t reval_report_failure_count(const reval_report* report);
/* formats: comma-separated subset of "json,csv,svg". */
REVAL_API reval_status reval_report_emit(const reval_report* report, const char* out_dir, const char* formats);
REVAL_API void reval_report_free(reval_report* report);

/* Utilities. */
REVAL_API reval_status reval_split(const char* manifest_path, double ratio, uint64_t seed, const char* first_path,
                                   const char* second_path, size_t* n_first, size_t* n_second);
/* *defined is 0 when either side has zero variance. */
REVAL_API reval_status reval_pearson(const double* x, const double* y, size_t n, double* r, int* defined);

#ifdef __cplusplus
}
#endif

#endif /* REASONEVAL_REASONEVAL_H_ */
