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

#include <cstdint>
#include <string>

#include "features.hpp"

namespace anodet {

enum class Variant { PatchPca, Gabor, External };
enum class NfaMode { Pixel, Block };

struct BlockParams {
  int size = 51;
  int stride = 10;
  double p_value = 0.01;
  int subsampling = 0;  // 0: the largest kernel side
};

struct MultilightParams {
  bool enabled = false;
  int keep_last = 3;
};

/// Every knob of a detection run. Defaults follow the reference setup:
/// Patch-PCA with 45 components of 17x17 patches over 4 scales, or a 72
/// kernel Gabor bank (sides 7..31); block NFA with 51x51 blocks, stride 10,
/// candidate p-value 0.01.
struct DetectorConfig {
  Variant variant = Variant::PatchPca;
  NfaMode nfa = NfaMode::Pixel;
  ComponentSpec components = ComponentSpec::fixed(45);
  int patch_size = 17;
  int scales = 4;
  BlockParams block;
  GaborGeometry gabor;
  bool gabor_decorrelate = false;
  double external_variance_fraction = 0.9;
  MultilightParams multilight;
  double threshold_as = 0.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string debug_dir;

  /// Largest kernel side of the configured front-end.
  int max_kernel_side() const;
  /// Throws InvalidArgument on inconsistent values.
  void validate() const;
};

const char* to_string(Variant v);
const char* to_string(NfaMode m);
Variant parse_variant(const std::string& s);  // accepts patch_pca / patch-pca
NfaMode parse_nfa_mode(const std::string& s);

/// Sets one key ("scales", "block.size", "patch_pca.m", ...). Unknown keys
/// and unparsable values throw InvalidArgument.
void set_config_value(DetectorConfig& cfg, const std::string& key, const std::string& value);

/// Reads the current value of a key in the same textual form.
std::string get_config_value(const DetectorConfig& cfg, const std::string& key);

/// Applies `key = value` lines; `[section]` headers prefix the following
/// keys with "section.". '#' starts a comment.
void apply_config_text(DetectorConfig& cfg, const std::string& text);
void apply_config_file(DetectorConfig& cfg, const std::string& path);

/// Complete, re-loadable description of `cfg`.
std::string to_config_text(const DetectorConfig& cfg);

}  // namespace anodet
