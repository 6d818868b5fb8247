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

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "image.hpp"

namespace anodet {

enum class FilterSource { PatchPca, Gabor };

/// Ordered convolution kernels. Patch-PCA banks carry their eigenvalues
/// (variance of each projection) in decreasing order.
struct FilterBank {
  std::vector<Map> kernels;
  FilterSource source = FilterSource::PatchPca;
  std::vector<double> eigenvalues;

  int size() const { return static_cast<int>(kernels.size()); }
  int max_side() const;
};

/// Per channel, one response map per retained feature.
struct FeatureStack {
  int height = 0;
  int width = 0;
  std::vector<std::vector<Map>> channels;

  int channel_count() const { return static_cast<int>(channels.size()); }
  int dof() const { return channels.empty() ? 0 : static_cast<int>(channels.front().size()); }
};

/// Either a fixed component count or the smallest count whose cumulative
/// eigenvalue share reaches a fraction.
struct ComponentSpec {
  int count = 45;
  double variance_fraction = 0.0;  // used when > 0

  static ComponentSpec fixed(int m) { return {m, 0.0}; }
  static ComponentSpec fraction(double f) { return {0, f}; }
};

/// Number of leading eigenvalues kept under `spec`.
int select_component_count(const std::vector<double>& eigenvalues, const ComponentSpec& spec);

/// Learns s x s kernels from one channel: subtract the global mean, form the
/// covariance of every fully interior patch, keep the leading eigenvectors.
/// Throws DegenerateInput ("no texture") when the covariance trace is <= 1e-12.
FilterBank learn_patch_pca_filters(const Map& channel, int side, const ComponentSpec& spec);

/// Patch covariance (divided by the patch count) of an already centred
/// channel over all fully interior patches. Index of pixel (dy, dx) in a
/// patch is dy * side + dx.
Eigen::MatrixXd patch_covariance(const Map& centered, int side);

struct GaborGeometry {
  std::vector<int> sizes = {7, 15, 23, 31};
  int orientations = 6;
  int wavelengths = 3;  // side/2, side/4, side/8, ...
  bool odd_phase = false;
};

/// Real Gabor kernels, zero-mean and unit L2 norm. Envelope sigma = side/6.
/// Order: size, then wavelength, then orientation (then phase).
FilterBank make_gabor_bank(const GaborGeometry& geometry);

/// Convolves every mean-subtracted channel of `img` with every kernel.
FeatureStack apply_filter_bank(const Image& img, const FilterBank& bank);

/// Responses of an already centred channel to a set of same-size kernels.
std::vector<Map> filter_responses(const Map& centered, const std::vector<Map>& kernels);

/// Per-pixel PCA across aligned single-channel shots; returns the q
/// lowest-variance components, ordered from eigen index k-q to k-1.
Image multilight_pca(const std::vector<Image>& shots, int keep_last);

/// Reads `<dir>/manifest.txt` (count=, dims=HxW, then one PFM per line).
/// The maps form a single channel.
FeatureStack load_external_features(const std::string& dir);

/// Per channel, replaces the maps by their decorrelated principal
/// components, keeping the smallest count whose cumulative variance share
/// reaches `variance_fraction`. Zero-variance directions are always dropped.
FeatureStack pca_reduce_features(const FeatureStack& fs, double variance_fraction);

}  // namespace anodet
