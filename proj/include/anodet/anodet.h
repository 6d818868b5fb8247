// Copyright 2026 The anodet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef ANODET_ANODET_H_
#define ANODET_ANODET_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ANODET_BUILDING)
#    define ANODET_API __declspec(dllexport)
#  else
#    define ANODET_API __declspec(dllimport)
#  endif
#else
#  define ANODET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct anodet_image anodet_image;
typedef struct anodet_config anodet_config;
typedef struct anodet_result anodet_result;

typedef enum anodet_status {
  ANODET_OK = 0,
  ANODET_ERR_INVALID_ARGUMENT = 1,
  ANODET_ERR_DOMAIN = 2,
  ANODET_ERR_SIZE = 3,
  ANODET_ERR_CONTRACT = 4,
  ANODET_ERR_NOT_FOUND = 5,
  ANODET_ERR_UNSUPPORTED_FORMAT = 6,
  ANODET_ERR_CORRUPT_INPUT = 7,
  ANODET_ERR_IO = 8,
  ANODET_ERR_FORMAT = 9,
  ANODET_ERR_DEGENERATE_INPUT = 10,
  ANODET_ERR_LAYOUT = 11,
  ANODET_ERR_EMPTY_DATASET = 12,
  ANODET_ERR_UNDEFINED_METRIC = 13,
  ANODET_ERR_BUFFER_TOO_SMALL = 14,
  ANODET_ERR_INTERNAL = 99
} anodet_status;

typedef enum anodet_calibration_mode {
  ANODET_CALIBRATE_INJECTED = 0,  /* i.i.d. Gaussian feature maps */
  ANODET_CALIBRATE_PIPELINE = 1   /* noise images through the detector */
} anodet_calibration_mode;

typedef struct anodet_diagnostics {
  int requested_scales;
  int used_scales;
  int channels;
  int finest_dof;  /* degrees of freedom of channel 0 at the finest scale */
  double tests_per_map;
  double tests_all_maps;
  double candidate_threshold;
} anodet_diagnostics;

typedef struct anodet_eval_summary {
  int images;
  double roc_auc;
  double roc_auc_per_image_mean;
  double gap;
  double youden_at_threshold;
  double youden_max;
} anodet_eval_summary;

typedef struct anodet_filter_summary {
  int kernels;
  int channels;
  /* max |<k_i, k_j> - [i == j]| within each side; for Gabor banks only the
     norms are checked since the kernels are not orthogonal. */
  double max_gram_error;
} anodet_filter_summary;

ANODET_API const char* anodet_version(void);
ANODET_API const char* anodet_status_name(anodet_status status);
/* Message of the last failed call on this thread, "" if none. */
ANODET_API const char* anodet_last_error(void);

/* Images hold planar channel-major doubles: data[(c * height + y) * width + x]. */
ANODET_API anodet_status anodet_image_load(const char* path, anodet_image** out);
ANODET_API anodet_status anodet_image_create(int channels, int height, int width, const double* data,
                                             anodet_image** out);
ANODET_API anodet_status anodet_image_shape(const anodet_image* image, int* channels, int* height, int* width);
ANODET_API const double* anodet_image_data(const anodet_image* image);
ANODET_API void anodet_image_free(anodet_image* image);

ANODET_API anodet_status anodet_config_create(anodet_config** out);
ANODET_API anodet_status anodet_config_load_file(anodet_config* config, const char* path);
ANODET_API anodet_status anodet_config_set(anodet_config* config, const char* key, const char* value);
/* String getters copy into buf (NUL-terminated) and report the required
   size, including the terminator, through *needed when it is non-null. */
ANODET_API anodet_status anodet_config_get(const anodet_config* config, const char* key, char* buf, size_t capacity,
                                           size_t* needed);
ANODET_API anodet_status anodet_config_to_string(const anodet_config* config, char* buf, size_t capacity,
                                                 size_t* needed);
ANODET_API anodet_status anodet_config_validate(const anodet_config* config);
ANODET_API void anodet_config_free(anodet_config* config);

ANODET_API anodet_status anodet_detect(const anodet_image* image, const anodet_config* config, anodet_result** out);
ANODET_API anodet_status anodet_detect_multilight(const anodet_image* const* shots, size_t count,
                                                  const anodet_config* config, anodet_result** out);
ANODET_API anodet_status anodet_detect_external(const char* feature_dir, const anodet_config* config,
                                                anodet_result** out);

ANODET_API anodet_status anodet_result_shape(const anodet_result* result, int* height, int* width);
/* Anomaly score, -log10 NFA, row-major. */
ANODET_API const double* anodet_result_scores(const anodet_result* result);
ANODET_API const uint8_t* anodet_result_mask(const anodet_result* result);
ANODET_API anodet_status anodet_result_diagnostics(const anodet_result* result, anodet_diagnostics* out);
/* as.pfm, mask.png, heatmap.png and config.txt; header lines go to
   config.txt as comments. */
ANODET_API anodet_status anodet_result_write(const anodet_result* result, const char* out_dir, const char* header);
ANODET_API void anodet_result_free(anodet_result* result);

/* One PFM per kernel plus montage.png. The image is needed for patch_pca
   and ignored for gabor. */
ANODET_API anodet_status anodet_dump_filters(const anodet_config* config, const anodet_image* image,
                                             const char* out_dir, anodet_filter_summary* out);

ANODET_API anodet_status anodet_evaluate(const char* dataset_root, const anodet_config* config, const char* out_dir,
                                         anodet_eval_summary* out);
ANODET_API anodet_status anodet_calibrate(const anodet_config* config, int trials, uint64_t seed,
                                          anodet_calibration_mode mode, int size, const char* csv_path);
ANODET_API anodet_status anodet_write_synthetic_dataset(const char* root, int per_type, uint64_t seed, int* written);

#ifdef __cplusplus
}
#endif

#endif  // ANODET_ANODET_H_
