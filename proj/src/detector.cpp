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

#include "detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "numerics.hpp"
#include "parallel.hpp"

namespace anodet {
namespace {

constexpr double kPruneRatio = 1e-10;

Map centered_copy(const Map& channel) {
  Map out = channel;
  const double mean = channel.mean();
  for (double& v : out.data) v -= mean;
  return out;
}

// Responses of one channel of one pyramid level.
std::vector<Map> channel_features(const Map& channel, const DetectorConfig& cfg, const FilterBank* gabor) {
  const Map centered = centered_copy(channel);
  if (cfg.variant == Variant::PatchPca) {
    const FilterBank bank = learn_patch_pca_filters(channel, cfg.patch_size, cfg.components);
    return filter_responses(centered, bank.kernels);
  }
  FeatureStack fs = apply_filter_bank(Image::from_map(channel), *gabor);
  if (cfg.gabor_decorrelate) fs = pca_reduce_features(fs, 1.0);
  return std::move(fs.channels.front());
}

int block_subsampling(const DetectorConfig& cfg) {
  if (cfg.block.subsampling > 0) return cfg.block.subsampling;
  return cfg.variant == Variant::External ? 1 : cfg.max_kernel_side();
}

NfaMap channel_nfa(std::span<const Map> maps, const ComponentStats& stats, const DetectorConfig& cfg) {
  const MahalanobisMap dm = mahalanobis_map(maps, stats);
  if (cfg.nfa == NfaMode::Pixel) return pixel_nfa(dm);
  return block_nfa(dm, {cfg.block.size, cfg.block.stride, cfg.block.p_value, block_subsampling(cfg)});
}

std::string provenance(int scale, int channel) {
  std::ostringstream os;
  os << "scale " << scale << ", channel " << channel << ": ";
  return os.str();
}

void fill_diagnostics(DetectionResult& res, const DetectorConfig& cfg, int requested) {
  auto& d = res.diagnostics;
  d.requested_scales = requested;
  d.used_scales = static_cast<int>(res.per_channel.size());
  d.channels = res.per_channel.empty() ? 0 : static_cast<int>(res.per_channel.front().size());
  d.tests_per_map = res.per_scale.empty() ? 0.0 : res.per_scale.front().tests;
  d.tests_all_maps = 0.0;
  for (const auto& scale : res.per_channel) {
    for (const auto& m : scale) d.tests_all_maps += m.tests;
  }
  if (cfg.nfa == NfaMode::Block && !d.dof.empty() && !d.dof.front().empty()) {
    d.candidate_threshold = numerics::chi2_isf(cfg.block.p_value, d.dof.front().front());
  }
}

}  // namespace

ComponentStats estimate_component_stats(std::span<const Map> maps) {
  if (maps.empty()) fail(ErrorKind::DegenerateInput, "no texture: empty feature stack");
  ComponentStats st;
  const double n = static_cast<double>(maps.front().size());
  for (const Map& m : maps) {
    if (!m.same_shape(maps.front())) fail(ErrorKind::Contract, "response maps differ in shape");
    double sum = 0.0;
    for (double v : m.data) {
      if (!std::isfinite(v)) fail(ErrorKind::Contract, "response map has non-finite values");
      sum += v;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : m.data) ss += (v - mean) * (v - mean);
    st.means.push_back(mean);
    st.variances.push_back(ss / n);
  }
  const double top = *std::max_element(st.variances.begin(), st.variances.end());
  for (int i = 0; i < static_cast<int>(st.variances.size()); ++i) {
    if (top > 0.0 && st.variances[i] >= kPruneRatio * top) st.retained.push_back(i);
  }
  if (st.retained.empty()) fail(ErrorKind::DegenerateInput, "no texture: every response map is constant");
  return st;
}

ComponentStats estimate_component_stats(const FeatureStack& fs, int channel) {
  if (channel < 0 || channel >= fs.channel_count()) fail(ErrorKind::Contract, "channel index out of range");
  return estimate_component_stats(fs.channels[channel]);
}

MahalanobisMap mahalanobis_map(std::span<const Map> maps, const ComponentStats& stats) {
  if (stats.dof() < 1) fail(ErrorKind::Contract, "statistics retain no component");
  if (stats.means.size() != maps.size() || stats.variances.size() != maps.size()) {
    fail(ErrorKind::Contract, "statistics and feature stack disagree on the component count");
  }
  MahalanobisMap dm{Map(maps.front().height, maps.front().width), stats.dof()};
  for (int i : stats.retained) {
    const Map& m = maps[i];
    if (!m.same_shape(dm.values)) fail(ErrorKind::Contract, "response maps differ in shape");
    const double mu = stats.means[i];
    const double inv = 1.0 / stats.variances[i];
    for (std::size_t p = 0; p < m.size(); ++p) {
      const double z = m.data[p] - mu;
      dm.values.data[p] += z * z * inv;
    }
  }
  return dm;
}

MahalanobisMap mahalanobis_map(const FeatureStack& fs, int channel, const ComponentStats& stats) {
  if (channel < 0 || channel >= fs.channel_count()) fail(ErrorKind::Contract, "channel index out of range");
  return mahalanobis_map(fs.channels[channel], stats);
}

NfaMap pixel_nfa(const MahalanobisMap& dm) {
  const Map& d = dm.values;
  NfaMap out{Map(d.height, d.width), static_cast<double>(d.height) * d.width};
  const double log_tests = std::log10(out.tests);
  for (std::size_t p = 0; p < d.size(); ++p) {
    out.log10_nfa.data[p] = log_tests + numerics::chi2_sf(d.data[p], dm.dof).value;
  }
  return out;
}

std::vector<int> block_origins(int length, int size, int stride) {
  std::vector<int> origins;
  for (int o = 0;; o += stride) {
    if (o + size >= length) {
      if (origins.empty() || origins.back() != length - size) origins.push_back(length - size);
      break;
    }
    origins.push_back(o);
  }
  return origins;
}

NfaMap block_nfa(const MahalanobisMap& dm, const BlockNfaParams& bp) {
  const Map& d = dm.values;
  const int h = d.height;
  const int w = d.width;
  const int bs = bp.size;
  const int g = bp.subsampling;
  if (!(bp.p_value > 0.0 && bp.p_value < 1.0)) fail(ErrorKind::InvalidArgument, "block p-value must be in (0, 1)");
  if (bp.stride < 1) fail(ErrorKind::InvalidArgument, "block stride must be >= 1");
  if (g < 1 || bs < g) {
    std::ostringstream os;
    os << "block side " << bs << " must be >= subsampling factor " << g << " >= 1";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  if (bs > std::min(h, w)) {
    std::ostringstream os;
    os << "block side " << bs << " exceeds map " << h << "x" << w;
    fail(ErrorKind::InvalidArgument, os.str());
  }

  const double tau = numerics::chi2_isf(bp.p_value, dm.dof);
  const int sw = w + 1;
  std::vector<int> sat(static_cast<std::size_t>(h + 1) * sw, 0);
  for (int y = 0; y < h; ++y) {
    int run = 0;
    for (int x = 0; x < w; ++x) {
      run += d.at(y, x) > tau ? 1 : 0;
      sat[static_cast<std::size_t>(y + 1) * sw + x + 1] = sat[static_cast<std::size_t>(y) * sw + x + 1] + run;
    }
  }

  const long long area = static_cast<long long>(bs) * bs;
  const long long cell = static_cast<long long>(g) * g;
  const long long trials = area / cell;
  const double tests = static_cast<double>(h) * w * static_cast<double>(cell) / static_cast<double>(area);
  const double log_tests = std::log10(tests);
  std::vector<double> tail(static_cast<std::size_t>(trials) + 1, std::numeric_limits<double>::quiet_NaN());

  NfaMap out{Map(h, w, std::numeric_limits<double>::infinity()), tests};
  const auto ys = block_origins(h, bs, bp.stride);
  const auto xs = block_origins(w, bs, bp.stride);
  for (int y0 : ys) {
    for (int x0 : xs) {
      const int y1 = y0 + bs;
      const int x1 = x0 + bs;
      const long long count = sat[static_cast<std::size_t>(y1) * sw + x1] - sat[static_cast<std::size_t>(y0) * sw + x1] -
                              sat[static_cast<std::size_t>(y1) * sw + x0] + sat[static_cast<std::size_t>(y0) * sw + x0];
      const long long k = std::min(trials, count / cell);
      double& t = tail[static_cast<std::size_t>(k)];
      if (std::isnan(t)) t = numerics::binomial_tail(trials, k, bp.p_value).value;
      const double v = log_tests + t;
      for (int y = y0; y < y1; ++y) {
        double* row = out.log10_nfa.data.data() + static_cast<std::size_t>(y) * w;
        for (int x = x0; x < x1; ++x) row[x] = std::min(row[x], v);
      }
    }
  }
  return out;
}

NfaMap merge_channels(std::span<const NfaMap> maps) {
  if (maps.empty()) fail(ErrorKind::Contract, "nothing to merge");
  NfaMap out = maps.front();
  out.channel_index = -1;
  for (const NfaMap& m : maps.subspan(1)) {
    if (!m.log10_nfa.same_shape(out.log10_nfa)) fail(ErrorKind::Contract, "channel maps differ in shape");
    for (std::size_t p = 0; p < m.log10_nfa.size(); ++p) {
      out.log10_nfa.data[p] = std::min(out.log10_nfa.data[p], m.log10_nfa.data[p]);
    }
    out.tests = std::max(out.tests, m.tests);
  }
  return out;
}

DetectionResult merge_scales(std::span<const NfaMap> per_scale, int height, int width, double threshold_as) {
  if (per_scale.empty()) fail(ErrorKind::Contract, "nothing to merge");
  DetectionResult res;
  Map merged(height, width, std::numeric_limits<double>::infinity());
  for (const NfaMap& m : per_scale) {
    const Map up = upsample_to(m.log10_nfa, height, width);
    for (std::size_t p = 0; p < up.size(); ++p) merged.data[p] = std::min(merged.data[p], up.data[p]);
    res.per_scale.push_back(m);
  }
  res.anomaly_score = Map(height, width);
  res.mask = Mask(height, width);
  for (std::size_t p = 0; p < merged.size(); ++p) {
    const double as = -merged.data[p];
    res.anomaly_score.data[p] = as;
    res.mask.data[p] = as >= threshold_as ? 1 : 0;
  }
  return res;
}

int required_level_side(const DetectorConfig& cfg) {
  const int s = cfg.max_kernel_side();
  int side = min_level_side(s);
  if (cfg.variant == Variant::PatchPca) {
    // (L - s + 1)^2 >= 10 s^2 interior patches for the covariance estimate.
    long long t = static_cast<long long>(std::ceil(std::sqrt(10.0) * s));
    while (t * t < 10LL * s * s) ++t;
    while ((t - 1) * (t - 1) >= 10LL * s * s) --t;
    side = std::max(side, static_cast<int>(t) + s - 1);
  }
  if (cfg.nfa == NfaMode::Block) side = std::max(side, cfg.block.size);
  return side;
}

DetectionResult detect(const Image& img, const DetectorConfig& cfg) {
  cfg.validate();
  if (cfg.variant == Variant::External) {
    fail(ErrorKind::InvalidArgument, "the external variant takes feature maps, not an image");
  }
  const Pyramid pyr = build_pyramid(img, cfg.scales, required_level_side(cfg));
  const int scales = pyr.scale_count();
  const int channels = img.channels;

  FilterBank gabor;
  if (cfg.variant == Variant::Gabor) gabor = make_gabor_bank(cfg.gabor);

  std::vector<std::vector<NfaMap>> maps(scales, std::vector<NfaMap>(channels));
  std::vector<std::vector<int>> dof(scales, std::vector<int>(channels));
  parallel_for(scales * channels, cfg.jobs, [&](int task) {
    const int scale = task / channels;
    const int ch = task % channels;
    try {
      const std::vector<Map> feats = channel_features(pyr.levels[scale].channel(ch), cfg, &gabor);
      const ComponentStats stats = estimate_component_stats(feats);
      NfaMap nfa = channel_nfa(feats, stats, cfg);
      nfa.scale_index = scale;
      nfa.channel_index = ch;
      maps[scale][ch] = std::move(nfa);
      dof[scale][ch] = stats.dof();
    } catch (const Error& e) {
      throw Error(e.kind(), provenance(scale, ch) + e.what());
    }
  });

  std::vector<NfaMap> per_scale;
  for (int s = 0; s < scales; ++s) {
    NfaMap merged = merge_channels(maps[s]);
    merged.scale_index = s;
    per_scale.push_back(std::move(merged));
  }
  DetectionResult res = merge_scales(per_scale, img.height, img.width, cfg.threshold_as);
  res.per_channel = std::move(maps);
  res.config = cfg;
  res.diagnostics.dof = std::move(dof);
  fill_diagnostics(res, cfg, cfg.scales);
  return res;
}

DetectionResult detect_multilight(const std::vector<Image>& shots, const DetectorConfig& cfg) {
  cfg.validate();
  return detect(multilight_pca(shots, cfg.multilight.keep_last), cfg);
}

DetectionResult detect_features(const FeatureStack& fs, const DetectorConfig& cfg) {
  cfg.validate();
  if (fs.channel_count() < 1 || fs.dof() < 1) fail(ErrorKind::InvalidArgument, "empty feature stack");
  const FeatureStack reduced = pca_reduce_features(fs, cfg.external_variance_fraction);
  const int channels = reduced.channel_count();
  std::vector<NfaMap> maps(channels);
  std::vector<int> dof(channels);
  parallel_for(channels, cfg.jobs, [&](int ch) {
    try {
      const ComponentStats stats = estimate_component_stats(reduced.channels[ch]);
      dof[ch] = stats.dof();
      maps[ch] = channel_nfa(reduced.channels[ch], stats, cfg);
      maps[ch].channel_index = ch;
    } catch (const Error& e) {
      throw Error(e.kind(), provenance(0, ch) + e.what());
    }
  });
  const NfaMap merged = merge_channels(maps);
  DetectionResult res = merge_scales(std::span<const NfaMap>(&merged, 1), fs.height, fs.width, cfg.threshold_as);
  res.per_channel = {std::move(maps)};
  res.config = cfg;
  res.diagnostics.dof = {std::move(dof)};
  fill_diagnostics(res, cfg, 1);
  return res;
}

void write_detection(const DetectionResult& result, const std::string& out_dir, const std::string& header) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + out_dir + ": " + ec.message());
  const fs::path out(out_dir);
  save_float_map(result.anomaly_score, (out / "as.pfm").string());
  save_mask(result.mask, (out / "mask.png").string());
  save_heatmap(result.anomaly_score, (out / "heatmap.png").string());

  std::ofstream cfg((out / "config.txt").string());
  if (!cfg) fail(ErrorKind::Io, "cannot write " + (out / "config.txt").string());
  std::istringstream hdr(header);
  for (std::string line; std::getline(hdr, line);) cfg << "# " << line << '\n';
  const auto& d = result.diagnostics;
  cfg << "# scales used: " << d.used_scales << " of " << d.requested_scales << " requested\n";
  cfg << "# dof per scale/channel:";
  for (const auto& row : d.dof) {
    cfg << " [";
    for (std::size_t i = 0; i < row.size(); ++i) cfg << (i ? " " : "") << row[i];
    cfg << "]";
  }
  cfg << '\n' << std::setprecision(10);
  cfg << "# tests per map (N_T): " << d.tests_per_map << '\n';
  cfg << "# tests over all scales and channels: " << d.tests_all_maps << '\n';
  if (result.config.nfa == NfaMode::Block) cfg << "# candidate threshold tau: " << d.candidate_threshold << '\n';
  cfg << to_config_text(result.config);
  if (!cfg) fail(ErrorKind::Io, "failed writing config.txt");

  if (!result.config.debug_dir.empty()) {
    const fs::path dbg(result.config.debug_dir);
    fs::create_directories(dbg, ec);
    if (ec) fail(ErrorKind::Io, "cannot create debug directory " + dbg.string() + ": " + ec.message());
    for (const NfaMap& m : result.per_scale) {
      save_float_map(m.log10_nfa, (dbg / ("scale" + std::to_string(m.scale_index) + "_log10nfa.pfm")).string());
    }
    for (const auto& row : result.per_channel) {
      for (const NfaMap& m : row) {
        const std::string name = "scale" + std::to_string(m.scale_index) + "_channel" +
                                 std::to_string(m.channel_index) + "_log10nfa.pfm";
        save_float_map(m.log10_nfa, (dbg / name).string());
      }
    }
  }
}

}  // namespace anodet
