/* Copyright 2026 The DiscoBox Engine Authors
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the structured-teacher engine. Every call returns a
 * dbx_status; on failure dbx_last_error() holds a message for the calling
 * thread until its next failing call. Strings handed out through char**
 * are released with dbx_string_free. */

#ifndef DISCOBOX_DISCOBOX_H_
#define DISCOBOX_DISCOBOX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(DISCOBOX_BUILDING_LIBRARY)
#define DBX_API __attribute__((visibility("default")))
#else
#define DBX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dbx_status {
  DBX_OK = 0,
  DBX_INVALID_ARGUMENT = 1,
  DBX_IO_FAILURE = 2,
  DBX_BAD_MAGIC = 3,
  DBX_UNSUPPORTED_VERSION = 4,
  DBX_BAD_MANIFEST = 5,
  DBX_TRUNCATED_BLOB = 6,
  DBX_OVERLAPPING_ENTRIES = 7,
  DBX_NON_FINITE_VALUE = 8,
  DBX_DIM_MISMATCH = 9,
  DBX_OUT_OF_RANGE = 10,
  DBX_MISSING_ENTRY = 11,
  DBX_PARSE_ERROR = 12,
  DBX_NON_FINITE_COST = 13,
  DBX_NUMERICAL_UNDERFLOW = 14,
  DBX_NON_FINITE_BELIEF = 15,
  DBX_EMPTY_BAG_SET = 16,
  DBX_LENGTH_MISMATCH = 17,
  DBX_UNKNOWN_CONFIG_KEY = 18,
  DBX_INTERNAL = 99
} dbx_status;

typedef enum dbx_dtype { DBX_F32 = 0, DBX_U8 = 1 } dbx_dtype;

typedef struct dbx_bundle dbx_bundle;
typedef struct dbx_config dbx_config;
typedef struct dbx_bank dbx_bank;

DBX_API const char* dbx_version(void);
DBX_API const char* dbx_last_error(void);
DBX_API const char* dbx_status_name(dbx_status status);
/* Non-zero for failures of the numeric kernels (non-finite costs or
 * beliefs, transport underflow). */
DBX_API int dbx_status_is_numeric(dbx_status status);
DBX_API void dbx_string_free(char* text);

/* Tensor bundles. */
DBX_API dbx_status dbx_bundle_create(dbx_bundle** out);
DBX_API dbx_status dbx_bundle_read(const char* path, dbx_bundle** out);
DBX_API dbx_status dbx_bundle_write(const dbx_bundle* bundle, const char* path);
DBX_API void dbx_bundle_destroy(dbx_bundle* bundle);
DBX_API dbx_status dbx_bundle_count(const dbx_bundle* bundle, size_t* count);
/* Name pointer stays valid until the bundle is modified or destroyed. */
DBX_API dbx_status dbx_bundle_entry_name(const dbx_bundle* bundle, size_t index,
                                         const char** name);
/* shape receives up to *rank dimensions; *rank is set to the true rank. */
DBX_API dbx_status dbx_bundle_entry_info(const dbx_bundle* bundle, const char* name,
                                         dbx_dtype* dtype, int64_t* shape, size_t* rank);
DBX_API dbx_status dbx_bundle_add_f32(dbx_bundle* bundle, const char* name,
                                      const int64_t* shape, size_t rank, const float* data);
DBX_API dbx_status dbx_bundle_add_u8(dbx_bundle* bundle, const char* name,
                                     const int64_t* shape, size_t rank, const uint8_t* data);
/* Copies exactly count values; u8 entries convert by value. */
DBX_API dbx_status dbx_bundle_read_f32(const dbx_bundle* bundle, const char* name,
                                       float* out, size_t count);
DBX_API dbx_status dbx_bundle_read_u8(const dbx_bundle* bundle, const char* name,
                                      uint8_t* out, size_t count);

/* Run configuration: flat key=value settings. */
DBX_API dbx_status dbx_config_create(dbx_config** out);
DBX_API void dbx_config_destroy(dbx_config* config);
DBX_API dbx_status dbx_config_set(dbx_config* config, const char* key, const char* value);
DBX_API dbx_status dbx_config_load_file(dbx_config* config, const char* path);
DBX_API dbx_status dbx_config_to_text(const dbx_config* config, char** text);

/* Per-category memory bank. Calls on one bank handle are serialized. */
DBX_API dbx_status dbx_bank_create(dbx_bank** out);
DBX_API dbx_status dbx_bank_load(const char* dir, dbx_bank** out);
DBX_API dbx_status dbx_bank_save(const dbx_bank* bank, const char* dir);
DBX_API void dbx_bank_destroy(dbx_bank* bank);
DBX_API dbx_status dbx_bank_size(const dbx_bank* bank, int category, int* size);

/* Refines every object of input against bank (may be NULL for an empty
 * bank) and pushes them into it afterwards. */
DBX_API dbx_status dbx_refine(const dbx_bundle* input, dbx_bank* bank,
                              const dbx_config* config, dbx_bundle** output);
DBX_API dbx_status dbx_match(const dbx_bundle* a, const dbx_bundle* b,
                             const dbx_config* config, dbx_bundle** output);
/* JSON texts in, JSON report out. */
DBX_API dbx_status dbx_eval_corr(const char* predictions_json, const char* annotations_json,
                                 char** report_json);
DBX_API dbx_status dbx_bench(const dbx_config* config, int roi_size, int pairs,
                             char** report_json);

/* Synthetic fixtures. */
DBX_API dbx_status dbx_gen_shapes(uint64_t seed, int count, int size, double noise_rate,
                                  dbx_bundle** objects, dbx_bundle** truth);
DBX_API dbx_status dbx_gen_permuted_pair(uint64_t seed, int size, dbx_bundle** a,
                                         dbx_bundle** b);
DBX_API dbx_status dbx_gen_metric_fixture(uint64_t seed, int n_pairs, double noise_px,
                                          char** annotations_json, char** predictions_json);

#ifdef __cplusplus
}
#endif

#endif /* DISCOBOX_DISCOBOX_H_ */
