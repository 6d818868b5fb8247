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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "detector.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "numerics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using namespace anodet;

std::vector<Map> gaussian_stack(std::uint64_t seed, int m, int h, int w, double mu = 0.0, double sd = 1.0) {
  std::vector<Map> maps;
  for (int i = 0; i < m; ++i) maps.push_back(oracle::gaussian_map(seed * 1000 + i, h, w, mu, sd));
  return maps;
}

MahalanobisMap dm_from(const Map& values, int dof) { return {values, dof}; }

TEST(ComponentStats, MeansVariancesAndPruning) {
  std::vector<Map> maps = gaussian_stack(1, 4, 50, 50, 2.0, 3.0);
  maps[2] = Map(50, 50, 7.0);
  const ComponentStats st = estimate_component_stats(maps);
  EXPECT_EQ(st.dof(), 3);
  EXPECT_EQ(st.retained, (std::vector<int>{0, 1, 3}));
  EXPECT_NEAR(st.means[0], 2.0, 0.2);
  EXPECT_NEAR(st.variances[3], 9.0, 0.9);
  for (int i : st.retained) EXPECT_GE(st.variances[i], 1e-10 * 9.0);
  EXPECT_THROW(estimate_component_stats(std::vector<Map>{Map(5, 5, 1.0)}), Error);
}

TEST(ComponentStats, PatchPcaResponsesAreCentred) {
  const Map img = oracle::gaussian_map(2, 128, 128, 0.5, 0.1);
  const FilterBank bank = learn_patch_pca_filters(img, 9, ComponentSpec::fixed(12));
  const FeatureStack fs = apply_filter_bank(Image::from_map(img), bank);
  const ComponentStats st = estimate_component_stats(fs, 0);
  // Reflected borders count edge pixels twice, so the mean is small but not zero.
  for (int i = 0; i < st.dof(); ++i) {
    EXPECT_LE(std::abs(st.means[i]), 1e-2 * std::sqrt(st.variances[i]));
    EXPECT_NEAR(st.variances[i] / bank.eigenvalues[i], 1.0, 0.10);
  }
}

TEST(Mahalanobis, Basics) {
  std::vector<Map> maps = gaussian_stack(3, 2, 8, 8, 1.0, 2.0);
  const ComponentStats st = estimate_component_stats(maps);
  std::vector<Map> at_mean = {Map(8, 8, st.means[0]), Map(8, 8, st.means[1])};
  for (double v : mahalanobis_map(at_mean, st).values.data) EXPECT_NEAR(v, 0.0, 1e-20);
  at_mean[0].at(3, 4) += std::sqrt(st.variances[0]);
  const MahalanobisMap one = mahalanobis_map(at_mean, st);
  EXPECT_NEAR(one.values.at(3, 4), 1.0, 1e-12);
  EXPECT_EQ(one.dof, 2);
  EXPECT_THROW(mahalanobis_map(std::vector<Map>{maps[0]}, st), Error);
}

TEST(Mahalanobis, ChiSquareMeanOnGaussianStacks) {
  const auto maps = gaussian_stack(4, 45, 128, 128, 5.0, 2.0);
  const MahalanobisMap dm = mahalanobis_map(maps, estimate_component_stats(maps));
  const double mean = dm.values.mean();
  EXPECT_GE(mean, 0.9 * 45);
  EXPECT_LE(mean, 1.1 * 45);
  for (double v : dm.values.data) EXPECT_GE(v, 0.0);
}

TEST(PixelNfa, FormulaAndMonotonicity) {
  Map d(256, 256, 0.0);
  const double tenth = numerics::chi2_isf(1.0 / (10.0 * 256 * 256), 45);
  d.at(5, 5) = tenth;
  d.at(9, 9) = 50.0;
  d.at(9, 10) = 60.0;
  const NfaMap n = pixel_nfa(dm_from(d, 45));
  EXPECT_EQ(n.tests, 65536.0);
  EXPECT_NEAR(n.log10_nfa.at(0, 0), std::log10(65536.0), 1e-12);
  EXPECT_NEAR(n.log10_nfa.at(0, 0), 4.816, 1e-3);
  EXPECT_NEAR(-n.log10_nfa.at(5, 5), 1.0, 1e-9);
  EXPECT_LT(n.log10_nfa.at(9, 10), n.log10_nfa.at(9, 9));

  const Map r = oracle::gaussian_map(5, 30, 30, 40.0, 10.0);
  Map rr = r;
  for (double& v : rr.data) v = std::abs(v);
  const NfaMap rn = pixel_nfa(dm_from(rr, 20));
  for (std::size_t i = 0; i + 1 < rr.size(); ++i) {
    if (rr.data[i] > rr.data[i + 1]) EXPECT_LT(rn.log10_nfa.data[i], rn.log10_nfa.data[i + 1]);
  }
}

TEST(BlockOrigins, LastBlockFlush) {
  EXPECT_EQ(block_origins(30, 10, 10), (std::vector<int>{0, 10, 20}));
  EXPECT_EQ(block_origins(33, 10, 10), (std::vector<int>{0, 10, 20, 23}));
  EXPECT_EQ(block_origins(10, 10, 3), (std::vector<int>{0}));
}

TEST(BlockNfa, MatchesBruteForce) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int h = 41, w = 37, bs = 11, stride = 4, g = 3;
  const double p = 0.05;
  const int dof = 4;
  const double tau = numerics::chi2_isf(p, dof);
  Map d(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) d.at(y, x) = u(rng) < (x > 20 && y < 15 ? 0.6 : p) ? tau + 1.0 : 0.5 * tau;
  }
  const NfaMap got = block_nfa(dm_from(d, dof), {bs, stride, p, g});
  const double log_tests = std::log10(static_cast<double>(h) * w * g * g / (bs * bs));
  EXPECT_NEAR(std::log10(got.tests), log_tests, 1e-12);

  auto origins = [&](int len) {
    std::vector<int> o;
    for (int s = 0; s + bs <= len; s += stride) o.push_back(s);
    if (o.back() + bs < len) o.push_back(len - bs);
    return o;
  };
  Map want(h, w, 1e300);
  for (int y0 : origins(h)) {
    for (int x0 : origins(w)) {
      int count = 0;
      for (int y = y0; y < y0 + bs; ++y) {
        for (int x = x0; x < x0 + bs; ++x) count += d.at(y, x) > tau;
      }
      const double v = log_tests + oracle::binomial_tail_log10((bs * bs) / (g * g), count / (g * g), p);
      for (int y = y0; y < y0 + bs; ++y) {
        for (int x = x0; x < x0 + bs; ++x) want.at(y, x) = std::min(want.at(y, x), v);
      }
    }
  }
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got.log10_nfa.data[i], want.data[i], 1e-11);
}

TEST(BlockNfa, EmptyAndSaturatedBlocks) {
  const int dof = 45;
  const double tau = numerics::chi2_isf(0.01, dof);
  const NfaMap empty = block_nfa(dm_from(Map(102, 102, 0.0), dof), {51, 10, 0.01, 17});
  const double log_tests = std::log10(102.0 * 102.0 * 289.0 / 2601.0);
  for (double v : empty.log10_nfa.data) EXPECT_NEAR(v, log_tests, 1e-12);
  const NfaMap full = block_nfa(dm_from(Map(51, 51, tau * 2.0), dof), {51, 10, 0.01, 17});
  for (double v : full.log10_nfa.data) EXPECT_NEAR(v, std::log10(289.0) - 18.0, 1e-9);
  EXPECT_THROW(block_nfa(dm_from(Map(40, 60, 0.0), dof), {51, 10, 0.01, 17}), Error);
}

TEST(BlockNfa, AddingCandidatesNeverRaisesNfa) {
  const int dof = 10;
  const double tau = numerics::chi2_isf(0.01, dof);
  Map d(60, 60, 0.0);
  NfaMap prev = block_nfa(dm_from(d, dof), {20, 5, 0.01, 4});
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pos(0, 59);
  for (int step = 0; step < 300; ++step) {
    d.at(pos(rng), pos(rng)) = tau + 1.0;
    const NfaMap cur = block_nfa(dm_from(d, dof), {20, 5, 0.01, 4});
    for (std::size_t i = 0; i < d.size(); ++i) ASSERT_LE(cur.log10_nfa.data[i], prev.log10_nfa.data[i] + 1e-12);
    prev = cur;
  }
}

TEST(BlockNfa, CalibratedOnIidCandidates) {
  const int dof = 45;
  const double p = 0.01;
  const double tau = numerics::chi2_isf(p, dof);
  double flagged = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::mt19937_64 rng(trial_seed(99, trial));
    std::bernoulli_distribution hit(p);
    Map d(510, 510);
    for (double& v : d.data) v = hit(rng) ? tau * 1.5 : 0.0;
    const NfaMap n = block_nfa(dm_from(d, dof), {51, 10, p, 17});
    flagged += std::count_if(n.log10_nfa.data.begin(), n.log10_nfa.data.end(), [](double v) { return v < 0.0; });
  }
  EXPECT_LE(flagged / (50.0 * 510 * 510), 1e-2);
}

TEST(Merge, Channels) {
  NfaMap a{Map(4, 4, 5.0), 16};
  NfaMap b{Map(4, 4, -3.0), 16};
  EXPECT_EQ(merge_channels(std::vector<NfaMap>{a}).log10_nfa, a.log10_nfa);
  EXPECT_EQ(merge_channels(std::vector<NfaMap>{a, b}).log10_nfa, Map(4, 4, -3.0));
  NfaMap r1{oracle::gaussian_map(8, 4, 4), 16};
  NfaMap r2{oracle::gaussian_map(9, 4, 4), 16};
  const Map ab = merge_channels(std::vector<NfaMap>{r1, r2}).log10_nfa;
  EXPECT_EQ(ab, merge_channels(std::vector<NfaMap>{r2, r1}).log10_nfa);
  EXPECT_EQ(ab, merge_channels(std::vector<NfaMap>{r1, r2, r2, r1}).log10_nfa);
  NfaMap c{Map(3, 4), 12};
  EXPECT_THROW(merge_channels(std::vector<NfaMap>{a, c}), Error);
}

TEST(Merge, ScalesKeepCoarseDetections) {
  // the defect only exists in the coarse map
  NfaMap fine{Map(16, 16, 2.0), 256};
  NfaMap coarse{Map(8, 8, 1.0), 64, 1};
  coarse.log10_nfa.at(5, 2) = -4.0;
  const DetectionResult r = merge_scales(std::vector<NfaMap>{fine, coarse}, 16, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      const bool in = y / 2 == 5 && x / 2 == 2;
      EXPECT_EQ(r.mask.at(y, x), in ? 1 : 0);
      EXPECT_DOUBLE_EQ(r.anomaly_score.at(y, x), in ? 4.0 : -1.0);
    }
  }
  const DetectionResult one = merge_scales(std::vector<NfaMap>{fine}, 16, 16, -3.0);
  EXPECT_DOUBLE_EQ(one.anomaly_score.at(0, 0), -2.0);
  EXPECT_EQ(one.mask.count(), 256u);
}

DetectorConfig small_config(Variant v, NfaMode n) {
  DetectorConfig cfg;
  cfg.variant = v;
  cfg.nfa = n;
  cfg.patch_size = 7;
  cfg.components = ComponentSpec::fixed(10);
  cfg.gabor.sizes = {7, 11};
  cfg.block.size = 21;
  cfg.block.stride = 5;
  cfg.scales = 3;
  return cfg;
}

TEST(Detect, ResultInvariants) {
  Image img(2, 96, 80);
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n(0.5, 0.1);
  for (double& v : img.data) v = n(rng);
  for (Variant v : {Variant::PatchPca, Variant::Gabor}) {
    for (NfaMode mode : {NfaMode::Pixel, NfaMode::Block}) {
      const DetectorConfig cfg = small_config(v, mode);
      const DetectionResult r = detect(img, cfg);
      EXPECT_EQ(r.anomaly_score.height, 96);
      EXPECT_EQ(r.anomaly_score.width, 80);
      EXPECT_EQ(r.diagnostics.channels, 2);
      EXPECT_EQ(r.diagnostics.used_scales, static_cast<int>(r.per_scale.size()));
      EXPECT_EQ(r.per_channel.size(), r.per_scale.size());
      for (std::size_t p = 0; p < r.mask.data.size(); ++p) {
        EXPECT_EQ(r.mask.data[p], r.anomaly_score.data[p] >= 0.0 ? 1 : 0);
      }
      // final AS is the max over upsampled per-scale, per-channel AS
      Map best(96, 80, -1e300);
      for (const auto& row : r.per_channel) {
        for (const NfaMap& m : row) {
          const Map up = upsample_to(m.log10_nfa, 96, 80);
          for (std::size_t p = 0; p < up.size(); ++p) best.data[p] = std::max(best.data[p], -up.data[p]);
        }
      }
      EXPECT_EQ(best, r.anomaly_score);
    }
  }
}

TEST(Detect, DeterministicAcrossJobs) {
  const Image img = Image::from_map(oracle::gaussian_map(11, 90, 90, 0.5, 0.1));
  DetectorConfig cfg = small_config(Variant::PatchPca, NfaMode::Pixel);
  const DetectionResult a = detect(img, cfg);
  cfg.jobs = 3;
  const DetectionResult b = detect(img, cfg);
  EXPECT_EQ(a.anomaly_score, b.anomaly_score);
}

TEST(Detect, DegenerateInputCarriesProvenance) {
  Image img(2, 64, 64, 0.5);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) img.at(0, y, x) = 0.5 + 0.1 * std::sin(0.7 * x * y);
  }
  try {
    detect(img, small_config(Variant::PatchPca, NfaMode::Pixel));
    FAIL() << "constant channel accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateInput);
    EXPECT_NE(std::string(e.what()).find("channel 1"), std::string::npos) << e.what();
  }
}

TEST(Detect, PyramidClampFollowsConfiguration) {
  DetectorConfig cfg;  // s = 17: (L - 16)^2 >= 2890 -> L >= 70
  EXPECT_EQ(required_level_side(cfg), 70);
  cfg.nfa = NfaMode::Block;
  EXPECT_EQ(required_level_side(cfg), 70);
  cfg.variant = Variant::Gabor;
  EXPECT_EQ(required_level_side(cfg), 63);
  cfg.nfa = NfaMode::Pixel;
  EXPECT_EQ(required_level_side(cfg), 63);

  DetectorConfig two;
  two.scales = 2;
  const DetectionResult r = detect(Image::from_map(oracle::gaussian_map(12, 160, 160, 0.5, 0.1)), two);
  EXPECT_EQ(r.diagnostics.requested_scales, 2);
  EXPECT_EQ(r.diagnostics.used_scales, 2);
  EXPECT_EQ(r.diagnostics.dof[1][0], 45);
  EXPECT_DOUBLE_EQ(r.diagnostics.tests_per_map, 160.0 * 160.0);
  EXPECT_DOUBLE_EQ(r.diagnostics.tests_all_maps, 160.0 * 160.0 + 80.0 * 80.0);
}

TEST(Detect, ExternalFeaturesKeepRetainedDof) {
  FeatureStack fs;
  fs.height = fs.width = 40;
  fs.channels.push_back(gaussian_stack(13, 12, 40, 40));
  DetectorConfig cfg;
  cfg.variant = Variant::External;
  const DetectionResult r = detect_features(fs, cfg);
  const int kept = pca_reduce_features(fs, 0.9).dof();
  EXPECT_EQ(r.diagnostics.dof[0][0], kept);
  EXPECT_LT(kept, 12);
  EXPECT_THROW(detect(Image(1, 40, 40), cfg), Error);
}

TEST(Detect, WritesArtifacts) {
  testing_support::TempDir dir("write");
  DetectorConfig cfg = small_config(Variant::PatchPca, NfaMode::Pixel);
  cfg.debug_dir = dir.file("dbg");
  const DetectionResult r = detect(Image::from_map(oracle::gaussian_map(14, 64, 64, 0.5, 0.1)), cfg);
  write_detection(r, dir.file("out"), "hello");
  for (const char* f : {"as.pfm", "mask.png", "heatmap.png", "heatmap.range.txt", "config.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "out" / f)) << f;
  }
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "dbg" / "scale0_log10nfa.pfm"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "dbg" / "scale0_channel0_log10nfa.pfm"));
  const std::string text = testing_support::read_bytes(dir.file("out/config.txt"));
  EXPECT_EQ(text.rfind("# hello\n", 0), 0u);

  DetectorConfig back;
  apply_config_file(back, dir.file("out/config.txt"));
  EXPECT_EQ(to_config_text(back), to_config_text(cfg));
  const Image as = load_image(dir.file("out/as.pfm"));
  for (std::size_t i = 0; i < as.data.size(); ++i) {
    EXPECT_EQ(as.data[i], static_cast<double>(static_cast<float>(r.anomaly_score.data[i])));
  }
}

}  // namespace
