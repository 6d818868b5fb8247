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

#include "features.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "image_io.hpp"
#include "numerics.hpp"

namespace anodet {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Map centered_copy(const Map& channel) {
  Map out = channel;
  const double mean = channel.mean();
  for (double& v : out.data) v -= mean;
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

int FilterBank::max_side() const {
  int side = 0;
  for (const Map& k : kernels) side = std::max(side, k.height);
  return side;
}

int select_component_count(const std::vector<double>& eigenvalues, const ComponentSpec& spec) {
  const int n = static_cast<int>(eigenvalues.size());
  if (spec.variance_fraction > 0.0) {
    if (spec.variance_fraction > 1.0) fail(ErrorKind::InvalidArgument, "variance fraction must be in (0, 1]");
    double total = 0.0;
    for (double v : eigenvalues) total += std::max(v, 0.0);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += std::max(eigenvalues[i], 0.0);
      if (acc >= spec.variance_fraction * total * (1.0 - 1e-12)) return i + 1;
    }
    return n;
  }
  if (spec.count < 1 || spec.count > n) {
    std::ostringstream os;
    os << "component count " << spec.count << " outside [1, " << n << "]";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  return spec.count;
}

Eigen::MatrixXd patch_covariance(const Map& centered, int side) {
  const int h = centered.height;
  const int w = centered.width;
  const int nh = h - side + 1;
  const int nw = w - side + 1;
  if (nh < 1 || nw < 1) fail(ErrorKind::Size, "patch larger than image");
  const double count = static_cast<double>(nh) * nw;
  const int dim = side * side;
  Eigen::MatrixXd cov(dim, dim);

  // For each displacement d between two patch pixels, every covariance entry
  // with that displacement is a rectangle sum of x(p) * x(p + d).
  const int sw = w + 1;
  std::vector<double> sat(static_cast<std::size_t>(h + 1) * sw);
  auto rect = [&](int y0, int x0, int y1, int x1) {
    return sat[static_cast<std::size_t>(y1 + 1) * sw + x1 + 1] - sat[static_cast<std::size_t>(y0) * sw + x1 + 1] -
           sat[static_cast<std::size_t>(y1 + 1) * sw + x0] + sat[static_cast<std::size_t>(y0) * sw + x0];
  };
  for (int dy = 0; dy < side; ++dy) {
    for (int dx = -(side - 1); dx < side; ++dx) {
      if (dy == 0 && dx < 0) continue;
      for (int y = 0; y < h; ++y) {
        double run = 0.0;
        const double* a = centered.data.data() + static_cast<std::size_t>(y) * w;
        const double* b = y + dy < h ? centered.data.data() + static_cast<std::size_t>(y + dy) * w : nullptr;
        double* out = sat.data() + static_cast<std::size_t>(y + 1) * sw;
        const double* above = sat.data() + static_cast<std::size_t>(y) * sw;
        out[0] = 0.0;
        for (int x = 0; x < w; ++x) {
          const int xb = x + dx;
          if (b && xb >= 0 && xb < w) run += a[x] * b[xb];
          out[x + 1] = above[x + 1] + run;
        }
      }
      const int ax_lo = std::max(0, -dx);
      const int ax_hi = std::min(side - 1, side - 1 - dx);
      for (int ay = 0; ay + dy < side; ++ay) {
        for (int ax = ax_lo; ax <= ax_hi; ++ax) {
          const double v = rect(ay, ax, ay + nh - 1, ax + nw - 1) / count;
          const int i = ay * side + ax;
          const int j = (ay + dy) * side + ax + dx;
          cov(i, j) = v;
          cov(j, i) = v;
        }
      }
    }
  }
  return cov;
}

FilterBank learn_patch_pca_filters(const Map& channel, int side, const ComponentSpec& spec) {
  if (side < 1 || side % 2 == 0) {
    std::ostringstream os;
    os << "patch side must be odd (got " << side << ")";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  if (channel.size() > 0 && channel.max() - channel.min() <= 0.0) {
    fail(ErrorKind::DegenerateInput, "no texture: constant channel");
  }
  const long long patches = static_cast<long long>(channel.height - side + 1) * (channel.width - side + 1);
  if (channel.height < side || channel.width < side || patches < 10LL * side * side) {
    std::ostringstream os;
    os << channel.height << "x" << channel.width << " channel has " << std::max(0LL, patches)
       << " interior patches of side " << side << ", needs " << 10 * side * side;
    fail(ErrorKind::Size, os.str());
  }
  const Map centered = centered_copy(channel);
  const Eigen::MatrixXd cov = patch_covariance(centered, side);
  if (cov.trace() <= 1e-12) fail(ErrorKind::DegenerateInput, "no texture: patch covariance is zero");

  const auto eig = numerics::symmetric_eig(cov);
  std::vector<double> values(eig.eigenvalues.data(), eig.eigenvalues.data() + eig.eigenvalues.size());
  const int keep = select_component_count(values, spec);

  FilterBank bank;
  bank.source = FilterSource::PatchPca;
  for (int i = 0; i < keep; ++i) {
    Map k(side, side);
    for (int p = 0; p < side * side; ++p) k.data[p] = eig.eigenvectors(p, i);
    bank.kernels.push_back(std::move(k));
    bank.eigenvalues.push_back(values[i]);
  }
  return bank;
}

FilterBank make_gabor_bank(const GaborGeometry& g) {
  if (g.sizes.empty() || g.orientations < 1 || g.wavelengths < 1) {
    fail(ErrorKind::InvalidArgument, "gabor geometry needs sizes, orientations and wavelengths");
  }
  FilterBank bank;
  bank.source = FilterSource::Gabor;
  for (int side : g.sizes) {
    if (side < 3 || side % 2 == 0) {
      std::ostringstream os;
      os << "gabor size must be odd and >= 3 (got " << side << ")";
      fail(ErrorKind::InvalidArgument, os.str());
    }
    const int c = side / 2;
    const double sigma = side / 6.0;
    for (int wl = 0; wl < g.wavelengths; ++wl) {
      const double lambda = side / std::pow(2.0, wl + 1);
      for (int o = 0; o < g.orientations; ++o) {
        const double theta = std::numbers::pi * o / g.orientations;
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        for (int phase = 0; phase < (g.odd_phase ? 2 : 1); ++phase) {
          Map k(side, side);
          for (int r = 0; r < side; ++r) {
            for (int q = 0; q < side; ++q) {
              const double x = q - c;
              const double y = r - c;
              const double xr = x * ct + y * st;
              const double yr = -x * st + y * ct;
              const double env = std::exp(-(xr * xr + yr * yr) / (2.0 * sigma * sigma));
              const double arg = 2.0 * std::numbers::pi * xr / lambda;
              k.at(r, q) = env * (phase == 0 ? std::cos(arg) : std::sin(arg));
            }
          }
          const double mean = k.mean();
          double norm = 0.0;
          for (double& v : k.data) {
            v -= mean;
            norm += v * v;
          }
          norm = std::sqrt(norm);
          if (norm <= 1e-12) fail(ErrorKind::InvalidArgument, "gabor kernel vanishes after mean removal");
          for (double& v : k.data) v /= norm;
          bank.kernels.push_back(std::move(k));
        }
      }
    }
  }
  return bank;
}

std::vector<Map> filter_responses(const Map& centered, const std::vector<Map>& kernels) {
  if (kernels.empty()) return {};
  const int s = kernels.front().height;
  for (const Map& k : kernels) {
    if (k.height != s || k.width != s) fail(ErrorKind::Contract, "filter_responses needs same-size square kernels");
  }
  if (s % 2 == 0) fail(ErrorKind::InvalidArgument, "kernel side must be odd");
  const int h = centered.height;
  const int w = centered.width;
  if (s > std::min(h, w)) fail(ErrorKind::Size, "kernel larger than image");
  const int r = s / 2;
  const int pw = w + 2 * r;
  const int m = static_cast<int>(kernels.size());
  const int dim = s * s;

  std::vector<double> padded(static_cast<std::size_t>(h + 2 * r) * pw);
  for (int y = 0; y < h + 2 * r; ++y) {
    const int sy = reflect_index(y - r, h);
    for (int x = 0; x < pw; ++x) {
      padded[static_cast<std::size_t>(y) * pw + x] = centered.at(sy, reflect_index(x - r, w));
    }
  }
  Eigen::MatrixXd basis(dim, m);
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < dim; ++p) basis(p, i) = kernels[i].data[p];
  }

  std::vector<Map> out(m, Map(h, w));
  const int band = std::max(1, 4096 / w);
  RowMatrix patches;
  RowMatrix resp;
  for (int y0 = 0; y0 < h; y0 += band) {
    const int rows = std::min(band, h - y0);
    patches.resize(static_cast<Eigen::Index>(rows) * w, dim);
    for (int yy = 0; yy < rows; ++yy) {
      for (int x = 0; x < w; ++x) {
        double* dst = patches.data() + (static_cast<std::size_t>(yy) * w + x) * dim;
        for (int ky = 0; ky < s; ++ky) {
          const double* src = padded.data() + static_cast<std::size_t>(y0 + yy + ky) * pw + x;
          std::copy_n(src, s, dst + ky * s);
        }
      }
    }
    resp.noalias() = patches * basis;
    for (int yy = 0; yy < rows; ++yy) {
      for (int x = 0; x < w; ++x) {
        const double* src = resp.data() + (static_cast<std::size_t>(yy) * w + x) * m;
        for (int i = 0; i < m; ++i) out[i].at(y0 + yy, x) = src[i];
      }
    }
  }
  return out;
}

FeatureStack apply_filter_bank(const Image& img, const FilterBank& bank) {
  if (bank.kernels.empty()) fail(ErrorKind::InvalidArgument, "empty filter bank");
  const int side = bank.max_side();
  if (side > std::min(img.height, img.width)) {
    std::ostringstream os;
    os << "kernel side " << side << " exceeds image " << img.height << "x" << img.width;
    fail(ErrorKind::Size, os.str());
  }
  // Group same-size kernels so each group is one matrix product.
  std::map<int, std::vector<int>> by_side;
  for (int i = 0; i < bank.size(); ++i) {
    const Map& k = bank.kernels[i];
    if (k.height != k.width || k.height % 2 == 0) fail(ErrorKind::InvalidArgument, "kernels must be square with odd side");
    by_side[k.height].push_back(i);
  }

  FeatureStack fs;
  fs.height = img.height;
  fs.width = img.width;
  fs.channels.resize(img.channels);
  for (int ch = 0; ch < img.channels; ++ch) {
    const Map centered = centered_copy(img.channel(ch));
    std::vector<Map> maps(bank.size());
    for (const auto& [s, idx] : by_side) {
      std::vector<Map> group;
      group.reserve(idx.size());
      for (int i : idx) group.push_back(bank.kernels[i]);
      auto resp = filter_responses(centered, group);
      for (std::size_t j = 0; j < idx.size(); ++j) maps[idx[j]] = std::move(resp[j]);
    }
    fs.channels[ch] = std::move(maps);
  }
  return fs;
}

Image multilight_pca(const std::vector<Image>& shots, int keep_last) {
  const int k = static_cast<int>(shots.size());
  if (k < 1) fail(ErrorKind::InvalidArgument, "multilight needs at least one image");
  if (keep_last < 1 || keep_last > k) {
    std::ostringstream os;
    os << "keep_last must be in [1, " << k << "] (got " << keep_last << ")";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  const int h = shots[0].height;
  const int w = shots[0].width;
  for (const Image& s : shots) {
    if (s.channels != 1) fail(ErrorKind::Size, "multilight shots must be single-channel");
    if (s.height != h || s.width != w) fail(ErrorKind::Size, "multilight shots must share dimensions");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(h) * w;
  Eigen::MatrixXd x(n, k);
  for (int j = 0; j < k; ++j) {
    x.col(j) = Eigen::Map<const Eigen::VectorXd>(shots[j].data.data(), n);
  }
  x.rowwise() -= x.colwise().mean();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
  const auto eig = numerics::symmetric_eig(cov);

  Image out(keep_last, h, w);
  for (int j = 0; j < keep_last; ++j) {
    const Eigen::VectorXd proj = x * eig.eigenvectors.col(k - keep_last + j);
    std::copy_n(proj.data(), n, out.data.begin() + static_cast<std::ptrdiff_t>(j) * n);
  }
  return out;
}

FeatureStack load_external_features(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path manifest = fs::path(dir) / "manifest.txt";
  std::ifstream in(manifest);
  if (!in) fail(ErrorKind::NotFound, "no manifest at " + manifest.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.size() < 2 || lines[0].rfind("count=", 0) != 0 || lines[1].rfind("dims=", 0) != 0) {
    fail(ErrorKind::Format, "manifest must start with count=<m> and dims=<H>x<W>: " + manifest.string());
  }
  int count = 0;
  int h = 0;
  int w = 0;
  try {
    count = std::stoi(lines[0].substr(6));
    const std::string dims = lines[1].substr(5);
    const auto xpos = dims.find('x');
    if (xpos == std::string::npos) throw std::invalid_argument("dims");
    h = std::stoi(dims.substr(0, xpos));
    w = std::stoi(dims.substr(xpos + 1));
  } catch (const std::exception&) {
    fail(ErrorKind::Format, "unparsable count/dims in " + manifest.string());
  }
  if (count < 1 || h < 1 || w < 1) fail(ErrorKind::Format, "count and dims must be positive in " + manifest.string());
  if (static_cast<int>(lines.size()) - 2 != count) {
    std::ostringstream os;
    os << "manifest declares " << count << " maps but lists " << lines.size() - 2;
    fail(ErrorKind::Format, os.str());
  }

  FeatureStack out;
  out.height = h;
  out.width = w;
  out.channels.resize(1);
  for (int i = 0; i < count; ++i) {
    const std::string path = (fs::path(dir) / lines[2 + i]).string();
    const Image img = load_image(path);
    if (img.channels != 1 || img.height != h || img.width != w) {
      std::ostringstream os;
      os << path << " is " << img.channels << "x" << img.height << "x" << img.width << ", manifest says 1x" << h
         << "x" << w;
      fail(ErrorKind::Format, os.str());
    }
    out.channels[0].push_back(img.channel(0));
  }
  return out;
}

FeatureStack pca_reduce_features(const FeatureStack& fs, double variance_fraction) {
  if (!(variance_fraction > 0.0 && variance_fraction <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "variance fraction must be in (0, 1]");
  }
  FeatureStack out;
  out.height = fs.height;
  out.width = fs.width;
  const Eigen::Index n = static_cast<Eigen::Index>(fs.height) * fs.width;
  for (const auto& maps : fs.channels) {
    const int d = static_cast<int>(maps.size());
    Eigen::MatrixXd x(n, d);
    for (int j = 0; j < d; ++j) x.col(j) = Eigen::Map<const Eigen::VectorXd>(maps[j].data.data(), n);
    x.rowwise() -= x.colwise().mean();
    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
    const auto eig = numerics::symmetric_eig(cov);
    const double top = std::max(eig.eigenvalues(0), 0.0);
    std::vector<double> kept_values;
    for (int j = 0; j < d; ++j) {
      if (eig.eigenvalues(j) > 1e-10 * top && top > 0.0) kept_values.push_back(eig.eigenvalues(j));
    }
    if (kept_values.empty()) fail(ErrorKind::DegenerateInput, "no texture: feature maps have zero variance");
    const int keep = select_component_count(kept_values, ComponentSpec::fraction(variance_fraction));
    const Eigen::MatrixXd proj = x * eig.eigenvectors.leftCols(keep);
    std::vector<Map> reduced;
    for (int j = 0; j < keep; ++j) {
      Map m(fs.height, fs.width);
      std::copy_n(proj.col(j).data(), n, m.data.begin());
      reduced.push_back(std::move(m));
    }
    out.channels.push_back(std::move(reduced));
  }
  return out;
}

}  // namespace anodet
