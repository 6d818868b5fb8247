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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "image.hpp"

namespace anodet {

/// Binary map, values in {0, 1}.
struct Mask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  Mask() = default;
  Mask(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w, 0) {}
  std::uint8_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }
  std::size_t count() const;
  friend bool operator==(const Mask&, const Mask&) = default;
};

/// Loads PNG (8/16-bit gray or RGB, alpha dropped, palette expanded),
/// binary PGM/PPM (P5/P6) or PFM. Integer formats are scaled to [0, 1];
/// PFM samples are returned unchanged. The format is chosen by magic bytes.
Image load_image(const std::string& path);

/// Loads a grayscale mask and binarizes it at > 127 (on the 8-bit scale).
Mask load_mask(const std::string& path);

/// PFM, 32-bit little-endian floats (scale -1.0), rows bottom-to-top.
void save_float_map(const Map& map, const std::string& path);
void save_pfm(const Image& img, const std::string& path);

/// 8-bit RGB PNG through the fixed colormap below, min mapped to the first
/// stop, max to the last. A constant map takes the midpoint colour. The
/// range is written next to the image as `<stem>.range.txt`: "min max".
void save_heatmap(const Map& map, const std::string& path);

/// 8-bit grayscale PNG with 0 for background and 255 for foreground.
void save_mask(const Mask& mask, const std::string& path);

/// 8-bit grayscale PNG of `map` clipped to [lo, hi].
void save_gray_png(const Map& map, const std::string& path, double lo, double hi);

/// Colormap used by save_heatmap; t in [0, 1].
std::array<std::uint8_t, 3> heatmap_color(double t);

/// Path of the range sidecar for a heatmap path ("dir/heat.png" ->
/// "dir/heat.range.txt").
std::string heatmap_range_path(const std::string& heatmap_path);

}  // namespace anodet
