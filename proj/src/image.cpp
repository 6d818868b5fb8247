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

#include "image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace anodet {

Map::Map(int h, int w, double fill) : height(h), width(w) {
  if (h <= 0 || w <= 0) fail(ErrorKind::Size, "map dimensions must be positive");
  data.assign(static_cast<std::size_t>(h) * w, fill);
}

double Map::min() const { return *std::min_element(data.begin(), data.end()); }
double Map::max() const { return *std::max_element(data.begin(), data.end()); }
double Map::mean() const {
  return std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
}

Image::Image(int c, int h, int w, double fill) : channels(c), height(h), width(w) {
  if (c <= 0 || h <= 0 || w <= 0) fail(ErrorKind::Size, "image dimensions must be positive");
  data.assign(static_cast<std::size_t>(c) * h * w, fill);
}

Image Image::from_channels(std::span<const Map> planes) {
  if (planes.empty()) fail(ErrorKind::Size, "image needs at least one channel");
  Image img(static_cast<int>(planes.size()), planes[0].height, planes[0].width);
  for (int ch = 0; ch < img.channels; ++ch) img.set_channel(ch, planes[ch]);
  return img;
}

Image Image::from_map(const Map& plane) { return from_channels(std::span<const Map>(&plane, 1)); }

Map Image::channel(int ch) const {
  if (ch < 0 || ch >= channels) fail(ErrorKind::Contract, "channel index out of range");
  Map out(height, width);
  const auto plane = static_cast<std::size_t>(height) * width;
  std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(ch * plane), plane, out.data.begin());
  return out;
}

void Image::set_channel(int ch, const Map& plane) {
  if (ch < 0 || ch >= channels) fail(ErrorKind::Contract, "channel index out of range");
  if (plane.height != height || plane.width != width) fail(ErrorKind::Size, "channel shape mismatch");
  const auto n = static_cast<std::size_t>(height) * width;
  std::copy_n(plane.data.begin(), n, data.begin() + static_cast<std::ptrdiff_t>(ch * n));
}

Map convolve2d(const Map& channel, const Map& kernel) {
  const int s = kernel.height;
  if (kernel.width != s) fail(ErrorKind::InvalidArgument, "kernel must be square");
  if (s % 2 == 0) {
    std::ostringstream os;
    os << "kernel side must be odd (got " << s << ")";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  if (s > std::min(channel.height, channel.width)) {
    std::ostringstream os;
    os << "kernel side " << s << " exceeds image " << channel.height << "x" << channel.width;
    fail(ErrorKind::Size, os.str());
  }
  const int h = channel.height;
  const int w = channel.width;
  const int r = s / 2;
  const int pw = w + 2 * r;

  // Padded copy so the inner loop is a plain strided axpy.
  std::vector<double> padded(static_cast<std::size_t>(h + 2 * r) * pw);
  for (int y = 0; y < h + 2 * r; ++y) {
    const int sy = reflect_index(y - r, h);
    for (int x = 0; x < pw; ++x) {
      padded[static_cast<std::size_t>(y) * pw + x] = channel.at(sy, reflect_index(x - r, w));
    }
  }

  Map out(h, w);
  for (int y = 0; y < h; ++y) {
    double* dst = out.data.data() + static_cast<std::size_t>(y) * w;
    for (int ky = 0; ky < s; ++ky) {
      const double* src_row = padded.data() + static_cast<std::size_t>(y + ky) * pw;
      for (int kx = 0; kx < s; ++kx) {
        const double k = kernel.at(ky, kx);
        const double* src = src_row + kx;
        for (int x = 0; x < w; ++x) dst[x] += k * src[x];
      }
    }
  }
  return out;
}

std::span<const double> pyramid_blur_taps() {
  static const std::array<double, 5> taps = [] {
    std::array<double, 5> t{};
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double x = i - 2;
      t[i] = std::exp(-0.5 * x * x);
      sum += t[i];
    }
    for (double& v : t) v /= sum;
    return t;
  }();
  return taps;
}

Map downsample_half(const Map& channel) {
  const int h = channel.height;
  const int w = channel.width;
  if (h < 2 || w < 2) {
    std::ostringstream os;
    os << "cannot halve a " << h << "x" << w << " map";
    fail(ErrorKind::Size, os.str());
  }
  const auto taps = pyramid_blur_taps();
  const int oh = (h + 1) / 2;
  const int ow = (w + 1) / 2;

  // Horizontal pass only at the kept columns, then vertical at the kept rows.
  Map horiz(h, ow);
  for (int y = 0; y < h; ++y) {
    for (int ox = 0; ox < ow; ++ox) {
      double acc = 0.0;
      for (int t = 0; t < 5; ++t) acc += taps[t] * channel.at(y, reflect_index(2 * ox + t - 2, w));
      horiz.at(y, ox) = acc;
    }
  }
  Map out(oh, ow);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      double acc = 0.0;
      for (int t = 0; t < 5; ++t) acc += taps[t] * horiz.at(reflect_index(2 * oy + t - 2, h), ox);
      out.at(oy, ox) = acc;
    }
  }
  return out;
}

Image downsample_half(const Image& img) {
  std::vector<Map> planes;
  planes.reserve(img.channels);
  for (int ch = 0; ch < img.channels; ++ch) planes.push_back(downsample_half(img.channel(ch)));
  return Image::from_channels(planes);
}

Map upsample_to(const Map& map, int height, int width) {
  if (height < map.height || width < map.width) {
    std::ostringstream os;
    os << "cannot upsample " << map.height << "x" << map.width << " to " << height << "x" << width;
    fail(ErrorKind::Size, os.str());
  }
  if (height == map.height && width == map.width) return map;
  std::vector<int> src_col(width);
  for (int x = 0; x < width; ++x) {
    src_col[x] = static_cast<int>(static_cast<long long>(x) * map.width / width);
  }
  Map out(height, width);
  for (int y = 0; y < height; ++y) {
    const int sy = static_cast<int>(static_cast<long long>(y) * map.height / height);
    for (int x = 0; x < width; ++x) out.at(y, x) = map.at(sy, src_col[x]);
  }
  return out;
}

int min_level_side(int max_kernel_side) { return 2 * max_kernel_side + 1; }

Pyramid build_pyramid(const Image& img, int n_scales, int min_side) {
  if (n_scales < 1) fail(ErrorKind::InvalidArgument, "pyramid needs at least one scale");
  Pyramid pyr;
  pyr.requested_scales = n_scales;
  pyr.levels.push_back(img);
  while (pyr.scale_count() < n_scales) {
    const Image& last = pyr.levels.back();
    const int nh = (last.height + 1) / 2;
    const int nw = (last.width + 1) / 2;
    if (std::min(nh, nw) < min_side || last.height < 2 || last.width < 2) break;
    pyr.levels.push_back(downsample_half(last));
  }
  return pyr;
}

}  // namespace anodet
