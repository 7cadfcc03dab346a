/* Copyright 2026 The ARGAN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
/* C interface to the argan library.
 *
 * Every function returns an argan_status; on failure a human-readable
 * message is available from argan_last_error() on the same thread until the
 * next call into the library. Handles are opaque and owned by the caller.
 * Strings crossing the boundary are UTF-8 and NUL-terminated.
 */
#ifndef ARGAN_ARGAN_H_
#define ARGAN_ARGAN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ARGAN_API __declspec(dllexport)
#else
#define ARGAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum argan_status {
  ARGAN_OK = 0,
  ARGAN_ERR_INVALID_ARGUMENT = 1, /* bad key, value, or precondition on inputs */
  ARGAN_ERR_IO = 2,
  ARGAN_ERR_PARSE = 3,
  ARGAN_ERR_NUMERIC = 4, /* non-finite losses and the like */
  ARGAN_ERR_STATE = 5,   /* a prerequisite artifact is missing */
  ARGAN_ERR_INTERNAL = 6
} argan_status;

ARGAN_API const char* argan_version(void);
ARGAN_API const char* argan_status_name(argan_status status);
/* Message of the last failed call on this thread; "" after a success. */
ARGAN_API const char* argan_last_error(void);

/* ---- experiment configuration ------------------------------------------ */

typedef struct argan_config argan_config;
typedef void (*argan_log_fn)(const char* line, void* user);

/* Defaults; relative paths resolve against the current directory. */
ARGAN_API argan_status argan_config_new(argan_config** out);
/* Parses a key=value file ("[section]" headers prefix keys). Relative paths
 * inside resolve against the file's directory. Unknown keys are rejected. */
ARGAN_API argan_status argan_config_load(const char* path, argan_config** out);
ARGAN_API void argan_config_free(argan_config* config);

ARGAN_API argan_status argan_config_set(argan_config* config, const char* key, const char* value);
/* String outputs: *len receives the size including the terminator. With
 * buf == NULL or cap too small nothing is copied and, for a short buffer,
 * ARGAN_ERR_INVALID_ARGUMENT is returned. */
ARGAN_API argan_status argan_config_get(const argan_config* config, const char* key, char* buf, size_t cap,
                                        size_t* len);
ARGAN_API argan_status argan_config_text(const argan_config* config, char* buf, size_t cap, size_t* len);
ARGAN_API argan_status argan_config_validate(const argan_config* config);
/* Progress lines of the pipeline commands; fn may be NULL. */
ARGAN_API argan_status argan_config_set_log(argan_config* config, argan_log_fn fn, void* user);

/* ---- pipeline stages ---------------------------------------------------- */

ARGAN_API argan_status argan_prepare(const argan_config* config);
ARGAN_API argan_status argan_train_gan(const argan_config* config, int resume);
/* NULL or "" selects the default for checkpoint, input manifest and out_dir. */
ARGAN_API argan_status argan_translate(const argan_config* config, const char* label, const char* checkpoint,
                                       const char* input_manifest, const char* out_dir);
/* mode: "classic" or "synthetic". */
ARGAN_API argan_status argan_augment(const argan_config* config, const char* mode);
/* instance: "X", "X_plus_XC" or "X_plus_XS". */
ARGAN_API argan_status argan_train_classifier(const argan_config* config, const char* instance);
/* instance as above, or "gan" for translator FID/NIMA. */
ARGAN_API argan_status argan_evaluate(const argan_config* config, const char* instance);
ARGAN_API argan_status argan_report(const argan_config* config);

/* ---- metric arithmetic on caller buffers -------------------------------- */

/* x: n_x × dim and y: n_y × dim, row-major; n_x, n_y ≥ 2. */
ARGAN_API argan_status argan_fid(const double* x, size_t n_x, const double* y, size_t n_y, size_t dim, double* out);
/* One label map pair of n_pixels entries in [0, n_labels). out receives
 * per-pixel accuracy, per-class accuracy, its recall-normalized variant and
 * mean class IoU. */
ARGAN_API argan_status argan_seg_scores(const int32_t* predicted, const int32_t* truth, size_t n_pixels,
                                        int32_t n_labels, double out[4]);

#ifdef __cplusplus
}
#endif

#endif /* ARGAN_ARGAN_H_ */
