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

#pragma once

#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "features.hpp"
#include "image.hpp"
#include "image_io.hpp"

namespace anodet {

/// Empirical mean and variance of each response map; components whose
/// variance falls below 1e-10 times the largest are dropped.
struct ComponentStats {
  std::vector<double> means;
  std::vector<double> variances;
  std::vector<int> retained;

  int dof() const { return static_cast<int>(retained.size()); }
};

/// Squared Mahalanobis distance of every pixel's feature vector.
struct MahalanobisMap {
  Map values;
  int dof = 0;
};

/// log10 NFA per pixel for one channel (or a merge of channels) at one scale.
struct NfaMap {
  Map log10_nfa;
  double tests = 0.0;      // N_T
  int scale_index = 0;
  int channel_index = -1;  // -1 once channels are merged
};

struct BlockNfaParams {
  int size = 51;
  int stride = 10;
  double p_value = 0.01;
  int subsampling = 17;
};

struct DetectionDiagnostics {
  int requested_scales = 0;
  int used_scales = 0;
  int channels = 0;
  std::vector<std::vector<int>> dof;  // [scale][channel]
  double tests_per_map = 0.0;        // N_T of the finest scale
  double tests_all_maps = 0.0;       // N_T summed over every scale and channel
  double candidate_threshold = 0.0;  // tau of block NFA at the finest scale, 0 for pixel NFA
};

struct DetectionResult {
  Map anomaly_score;              // -log10 NFA
  Mask mask;                      // anomaly_score >= threshold
  std::vector<NfaMap> per_scale;  // channel-merged, native resolution
  std::vector<std::vector<NfaMap>> per_channel;  // [scale][channel]
  DetectorConfig config;
  DetectionDiagnostics diagnostics;
};

ComponentStats estimate_component_stats(const FeatureStack& fs, int channel);
ComponentStats estimate_component_stats(std::span<const Map> maps);

MahalanobisMap mahalanobis_map(const FeatureStack& fs, int channel, const ComponentStats& stats);
MahalanobisMap mahalanobis_map(std::span<const Map> maps, const ComponentStats& stats);

/// log10 NFA = log10(H W) + log10 P(chi2(dof) > d).
NfaMap pixel_nfa(const MahalanobisMap& dm);

/// Candidates are pixels with D above the chi2 quantile of `p_value`. Each
/// w x w block (origins every `stride`, last one flush with the border)
/// scores log10(H W g^2 / w^2) + log10 B(floor(w^2/g^2), floor(|L|/g^2), p);
/// a pixel takes the minimum over the blocks covering it.
NfaMap block_nfa(const MahalanobisMap& dm, const BlockNfaParams& params);

/// Block origins along one axis.
std::vector<int> block_origins(int length, int size, int stride);

NfaMap merge_channels(std::span<const NfaMap> maps);

/// Upsamples every map to height x width, takes the pixelwise minimum and
/// converts to anomaly score; mask = score >= threshold_as.
DetectionResult merge_scales(std::span<const NfaMap> per_scale, int height, int width, double threshold_as = 0.0);

/// Full pipeline for the patch_pca and gabor variants.
DetectionResult detect(const Image& img, const DetectorConfig& cfg);

/// Aligned single-channel shots under different lights: keeps the last
/// `keep_last` principal components and runs detect on them.
DetectionResult detect_multilight(const std::vector<Image>& shots, const DetectorConfig& cfg);

/// Single-scale pipeline on externally computed feature maps, after PCA
/// reduction to cfg.external_variance_fraction.
DetectionResult detect_features(const FeatureStack& fs, const DetectorConfig& cfg);

/// Smallest level side the configuration can analyse.
int required_level_side(const DetectorConfig& cfg);

/// Writes as.pfm, mask.png, heatmap.png (+ range sidecar) and config.txt to
/// `out_dir`; `header` lines are written as comments at the top of
/// config.txt. Per-scale maps go to cfg.debug_dir when it is set.
void write_detection(const DetectionResult& result, const std::string& out_dir, const std::string& header = {});

}  // namespace anodet
