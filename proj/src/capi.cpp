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

#include "anodet/anodet.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "config.hpp"
#include "detector.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "features.hpp"
#include "filter_dump.hpp"
#include "image.hpp"
#include "image_io.hpp"

struct anodet_image {
  anodet::Image image;
};

struct anodet_config {
  anodet::DetectorConfig config;
};

struct anodet_result {
  anodet::DetectionResult result;
};

namespace {

thread_local std::string last_error;

anodet_status status_of(anodet::ErrorKind kind) {
  using anodet::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidArgument: return ANODET_ERR_INVALID_ARGUMENT;
    case ErrorKind::Domain: return ANODET_ERR_DOMAIN;
    case ErrorKind::Size: return ANODET_ERR_SIZE;
    case ErrorKind::Contract: return ANODET_ERR_CONTRACT;
    case ErrorKind::NotFound: return ANODET_ERR_NOT_FOUND;
    case ErrorKind::UnsupportedFormat: return ANODET_ERR_UNSUPPORTED_FORMAT;
    case ErrorKind::CorruptInput: return ANODET_ERR_CORRUPT_INPUT;
    case ErrorKind::Io: return ANODET_ERR_IO;
    case ErrorKind::Format: return ANODET_ERR_FORMAT;
    case ErrorKind::DegenerateInput: return ANODET_ERR_DEGENERATE_INPUT;
    case ErrorKind::Layout: return ANODET_ERR_LAYOUT;
    case ErrorKind::EmptyDataset: return ANODET_ERR_EMPTY_DATASET;
    case ErrorKind::UndefinedMetric: return ANODET_ERR_UNDEFINED_METRIC;
  }
  return ANODET_ERR_INTERNAL;
}

anodet_status set_error(anodet_status status, std::string msg) {
  last_error = std::move(msg);
  return status;
}

template <class F>
anodet_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return ANODET_OK;
  } catch (const anodet::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ANODET_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ANODET_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(ANODET_ERR_INTERNAL, "unknown exception");
  }
}

#define ANODET_REQUIRE(cond, what) \
  if (!(cond)) return set_error(ANODET_ERR_INVALID_ARGUMENT, what)

anodet_status copy_out(const std::string& s, char* buf, size_t capacity, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf) return capacity == 0 ? ANODET_OK : set_error(ANODET_ERR_INVALID_ARGUMENT, "null buffer");
  if (capacity < s.size() + 1) return set_error(ANODET_ERR_BUFFER_TOO_SMALL, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return ANODET_OK;
}

}  // namespace

extern "C" {

const char* anodet_version(void) { return ANODET_VERSION_STRING; }

const char* anodet_status_name(anodet_status status) {
  switch (status) {
    case ANODET_OK: return "ok";
    case ANODET_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case ANODET_ERR_INTERNAL: return "internal error";
    case ANODET_ERR_INVALID_ARGUMENT: return anodet::to_string(anodet::ErrorKind::InvalidArgument);
    case ANODET_ERR_DOMAIN: return anodet::to_string(anodet::ErrorKind::Domain);
    case ANODET_ERR_SIZE: return anodet::to_string(anodet::ErrorKind::Size);
    case ANODET_ERR_CONTRACT: return anodet::to_string(anodet::ErrorKind::Contract);
    case ANODET_ERR_NOT_FOUND: return anodet::to_string(anodet::ErrorKind::NotFound);
    case ANODET_ERR_UNSUPPORTED_FORMAT: return anodet::to_string(anodet::ErrorKind::UnsupportedFormat);
    case ANODET_ERR_CORRUPT_INPUT: return anodet::to_string(anodet::ErrorKind::CorruptInput);
    case ANODET_ERR_IO: return anodet::to_string(anodet::ErrorKind::Io);
    case ANODET_ERR_FORMAT: return anodet::to_string(anodet::ErrorKind::Format);
    case ANODET_ERR_DEGENERATE_INPUT: return anodet::to_string(anodet::ErrorKind::DegenerateInput);
    case ANODET_ERR_LAYOUT: return anodet::to_string(anodet::ErrorKind::Layout);
    case ANODET_ERR_EMPTY_DATASET: return anodet::to_string(anodet::ErrorKind::EmptyDataset);
    case ANODET_ERR_UNDEFINED_METRIC: return anodet::to_string(anodet::ErrorKind::UndefinedMetric);
  }
  return "unknown status";
}

const char* anodet_last_error(void) { return last_error.c_str(); }

// ---------------------------------------------------------------- images

anodet_status anodet_image_load(const char* path, anodet_image** out) {
  ANODET_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new anodet_image{anodet::load_image(path)}; });
}

anodet_status anodet_image_create(int channels, int height, int width, const double* data, anodet_image** out) {
  ANODET_REQUIRE(data && out, "null argument");
  ANODET_REQUIRE(channels > 0 && height > 0 && width > 0, "image dimensions must be positive");
  *out = nullptr;
  return guarded([&] {
    anodet::Image img(channels, height, width);
    std::memcpy(img.data.data(), data, img.data.size() * sizeof(double));
    *out = new anodet_image{std::move(img)};
  });
}

anodet_status anodet_image_shape(const anodet_image* image, int* channels, int* height, int* width) {
  ANODET_REQUIRE(image, "null image");
  if (channels) *channels = image->image.channels;
  if (height) *height = image->image.height;
  if (width) *width = image->image.width;
  return ANODET_OK;
}

const double* anodet_image_data(const anodet_image* image) { return image ? image->image.data.data() : nullptr; }

void anodet_image_free(anodet_image* image) { delete image; }

// ---------------------------------------------------------------- config

anodet_status anodet_config_create(anodet_config** out) {
  ANODET_REQUIRE(out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new anodet_config{}; });
}

anodet_status anodet_config_load_file(anodet_config* config, const char* path) {
  ANODET_REQUIRE(config && path, "null argument");
  return guarded([&] { anodet::apply_config_file(config->config, path); });
}

anodet_status anodet_config_set(anodet_config* config, const char* key, const char* value) {
  ANODET_REQUIRE(config && key && value, "null argument");
  return guarded([&] { anodet::set_config_value(config->config, key, value); });
}

anodet_status anodet_config_get(const anodet_config* config, const char* key, char* buf, size_t capacity,
                                size_t* needed) {
  ANODET_REQUIRE(config && key, "null argument");
  std::string value;
  const anodet_status st = guarded([&] { value = anodet::get_config_value(config->config, key); });
  return st == ANODET_OK ? copy_out(value, buf, capacity, needed) : st;
}

anodet_status anodet_config_to_string(const anodet_config* config, char* buf, size_t capacity, size_t* needed) {
  ANODET_REQUIRE(config, "null config");
  std::string text;
  const anodet_status st = guarded([&] { text = anodet::to_config_text(config->config); });
  return st == ANODET_OK ? copy_out(text, buf, capacity, needed) : st;
}

anodet_status anodet_config_validate(const anodet_config* config) {
  ANODET_REQUIRE(config, "null config");
  return guarded([&] { config->config.validate(); });
}

void anodet_config_free(anodet_config* config) { delete config; }

// ---------------------------------------------------------------- detection

anodet_status anodet_detect(const anodet_image* image, const anodet_config* config, anodet_result** out) {
  ANODET_REQUIRE(image && config && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new anodet_result{anodet::detect(image->image, config->config)}; });
}

anodet_status anodet_detect_multilight(const anodet_image* const* shots, size_t count, const anodet_config* config,
                                       anodet_result** out) {
  ANODET_REQUIRE(shots && config && out, "null argument");
  *out = nullptr;
  std::vector<anodet::Image> images;
  for (size_t i = 0; i < count; ++i) {
    ANODET_REQUIRE(shots[i], "null shot");
    images.push_back(shots[i]->image);
  }
  return guarded([&] { *out = new anodet_result{anodet::detect_multilight(images, config->config)}; });
}

anodet_status anodet_detect_external(const char* feature_dir, const anodet_config* config, anodet_result** out) {
  ANODET_REQUIRE(feature_dir && config && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const anodet::FeatureStack fs = anodet::load_external_features(feature_dir);
    *out = new anodet_result{anodet::detect_features(fs, config->config)};
  });
}

anodet_status anodet_result_shape(const anodet_result* result, int* height, int* width) {
  ANODET_REQUIRE(result, "null result");
  if (height) *height = result->result.anomaly_score.height;
  if (width) *width = result->result.anomaly_score.width;
  return ANODET_OK;
}

const double* anodet_result_scores(const anodet_result* result) {
  return result ? result->result.anomaly_score.data.data() : nullptr;
}

const uint8_t* anodet_result_mask(const anodet_result* result) {
  return result ? result->result.mask.data.data() : nullptr;
}

anodet_status anodet_result_diagnostics(const anodet_result* result, anodet_diagnostics* out) {
  ANODET_REQUIRE(result && out, "null argument");
  const auto& d = result->result.diagnostics;
  out->requested_scales = d.requested_scales;
  out->used_scales = d.used_scales;
  out->channels = d.channels;
  out->finest_dof = d.dof.empty() || d.dof.front().empty() ? 0 : d.dof.front().front();
  out->tests_per_map = d.tests_per_map;
  out->tests_all_maps = d.tests_all_maps;
  out->candidate_threshold = d.candidate_threshold;
  return ANODET_OK;
}

anodet_status anodet_result_write(const anodet_result* result, const char* out_dir, const char* header) {
  ANODET_REQUIRE(result && out_dir, "null argument");
  return guarded([&] { anodet::write_detection(result->result, out_dir, header ? header : ""); });
}

void anodet_result_free(anodet_result* result) { delete result; }

// ---------------------------------------------------------------- tools

anodet_status anodet_dump_filters(const anodet_config* config, const anodet_image* image, const char* out_dir,
                                  anodet_filter_summary* out) {
  ANODET_REQUIRE(config && out_dir, "null argument");
  return guarded([&] {
    const anodet::DetectorConfig& cfg = config->config;
    cfg.validate();
    anodet_filter_summary summary{0, 0, 0.0};
    if (cfg.variant == anodet::Variant::Gabor) {
      const anodet::FilterBank bank = anodet::make_gabor_bank(cfg.gabor);
      anodet::write_filter_bank(bank, out_dir);
      summary = {bank.size(), 1, anodet::gram_error(bank, false)};
    } else if (cfg.variant == anodet::Variant::PatchPca) {
      if (!image) anodet::fail(anodet::ErrorKind::InvalidArgument, "patch_pca filters are learned from an image");
      const anodet::Image& img = image->image;
      summary.channels = img.channels;
      for (int c = 0; c < img.channels; ++c) {
        const anodet::FilterBank bank = anodet::learn_patch_pca_filters(img.channel(c), cfg.patch_size, cfg.components);
        const std::string prefix = img.channels == 1 ? "" : "channel" + std::to_string(c) + "_";
        anodet::write_filter_bank(bank, out_dir, prefix);
        summary.kernels += bank.size();
        summary.max_gram_error = std::max(summary.max_gram_error, anodet::gram_error(bank, true));
      }
    } else {
      anodet::fail(anodet::ErrorKind::InvalidArgument, "external features have no filter bank");
    }
    if (out) *out = summary;
  });
}

anodet_status anodet_evaluate(const char* dataset_root, const anodet_config* config, const char* out_dir,
                              anodet_eval_summary* out) {
  ANODET_REQUIRE(dataset_root && config, "null argument");
  return guarded([&] {
    const anodet::EvalReport rep = anodet::evaluate_dataset(dataset_root, config->config);
    if (out_dir) anodet::write_eval_report(rep, out_dir);
    if (out) {
      *out = {static_cast<int>(rep.images.size()), rep.roc_auc, rep.roc_auc_per_image_mean, rep.gap,
              rep.youden_at_threshold, rep.youden_max};
    }
  });
}

anodet_status anodet_calibrate(const anodet_config* config, int trials, uint64_t seed, anodet_calibration_mode mode,
                               int size, const char* csv_path) {
  ANODET_REQUIRE(config && csv_path, "null argument");
  ANODET_REQUIRE(mode == ANODET_CALIBRATE_INJECTED || mode == ANODET_CALIBRATE_PIPELINE, "unknown calibration mode");
  return guarded([&] {
    const auto m = mode == ANODET_CALIBRATE_INJECTED ? anodet::CalibrationMode::Injected
                                                     : anodet::CalibrationMode::Pipeline;
    anodet::write_calibration_csv(anodet::calibrate_noise(config->config, trials, seed, m, size), csv_path);
  });
}

anodet_status anodet_write_synthetic_dataset(const char* root, int per_type, uint64_t seed, int* written) {
  ANODET_REQUIRE(root, "null argument");
  return guarded([&] {
    const int n = anodet::write_synthetic_dataset(root, per_type, seed);
    if (written) *written = n;
  });
}

}  // extern "C"
