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

#include <cstddef>
#include <span>
#include <vector>

namespace anodet {

/// Single-channel H x W map of reals, row-major.
struct Map {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Map() = default;
  Map(int h, int w, double fill = 0.0);

  std::size_t size() const { return data.size(); }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }
  std::span<double> row(int r) { return {data.data() + static_cast<std::size_t>(r) * width, static_cast<std::size_t>(width)}; }
  std::span<const double> row(int r) const { return {data.data() + static_cast<std::size_t>(r) * width, static_cast<std::size_t>(width)}; }
  bool same_shape(const Map& o) const { return height == o.height && width == o.width; }

  double min() const;
  double max() const;
  double mean() const;

  friend bool operator==(const Map&, const Map&) = default;
};

/// Multi-channel image, samples indexed (channel, row, col), channel planes
/// stored contiguously.
struct Image {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Image() = default;
  Image(int c, int h, int w, double fill = 0.0);

  static Image from_channels(std::span<const Map> planes);
  static Image from_map(const Map& plane);

  double& at(int ch, int r, int c) { return data[(static_cast<std::size_t>(ch) * height + r) * width + c]; }
  double at(int ch, int r, int c) const { return data[(static_cast<std::size_t>(ch) * height + r) * width + c]; }

  Map channel(int ch) const;
  void set_channel(int ch, const Map& plane);

  friend bool operator==(const Image&, const Image&) = default;
};

struct Pyramid {
  std::vector<Image> levels;  // level 0 is the input
  int requested_scales = 0;   // before clamping

  int scale_count() const { return static_cast<int>(levels.size()); }
  bool clamped() const { return scale_count() < requested_scales; }
};

/// Reflect-101 index: -1 -> 1, n -> n - 2. Valid for |overshoot| < n.
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

/// Same-size correlation (no kernel flip) with reflect-101 borders. The
/// kernel must be square with odd side no larger than min(H, W).
Map convolve2d(const Map& channel, const Map& kernel);

/// 5x5 Gaussian (sigma 1) blur with reflect borders, then keep every second
/// row and column starting at 0. Output is ceil(H/2) x ceil(W/2).
Map downsample_half(const Map& channel);
Image downsample_half(const Image& img);

/// Nearest-neighbour resampling to a larger grid; source row of target row r
/// is floor(r * h / H).
Map upsample_to(const Map& map, int height, int width);

/// Smallest side a level may have for a given maximal kernel side.
int min_level_side(int max_kernel_side);

/// Pyramid of up to `n_scales` levels. Levels are dropped (never below one)
/// once a level would have a side smaller than `min_side`.
Pyramid build_pyramid(const Image& img, int n_scales, int min_side);

/// 1-D normalized Gaussian taps used by the pyramid blur.
std::span<const double> pyramid_blur_taps();

}  // namespace anodet
