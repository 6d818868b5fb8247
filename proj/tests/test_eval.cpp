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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "detector.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using namespace anodet;
using testing_support::TempDir;
namespace fs = std::filesystem;

PooledScores pooled_from(const Map& scores, const Mask& truth) {
  PooledScores p;
  p.add(scores, truth);
  p.finalize();
  return p;
}

Mask random_mask(std::uint64_t seed, int h, int w, double rate) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution b(rate);
  Mask m(h, w);
  for (auto& v : m.data) v = b(rng) ? 1 : 0;
  return m;
}

TEST(RocAuc, PerfectAndOracle) {
  const Mask truth = random_mask(1, 30, 30, 0.2);
  Map perfect(30, 30);
  for (std::size_t i = 0; i < perfect.size(); ++i) perfect.data[i] = truth.data[i];
  EXPECT_DOUBLE_EQ(roc_auc(pooled_from(perfect, truth)), 1.0);

  // heavy ties: scores rounded to a few levels
  Map s = oracle::gaussian_map(2, 30, 30);
  for (std::size_t i = 0; i < s.size(); ++i) s.data[i] = std::round(2.0 * s.data[i] + truth.data[i]);
  const PooledScores p = pooled_from(s, truth);
  EXPECT_NEAR(roc_auc(p), oracle::auroc_pairs(p.positives, p.negatives), 1e-15);
}

TEST(RocAuc, UniformScoresNearHalf) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Map s(1000, 1000);
  for (double& v : s.data) v = u(rng);
  EXPECT_NEAR(roc_auc(pooled_from(s, random_mask(4, 1000, 1000, 0.1))), 0.5, 0.01);
}

TEST(RocAuc, TransformInvariances) {
  const Mask truth = random_mask(5, 40, 40, 0.3);
  Map s = oracle::gaussian_map(6, 40, 40);
  for (std::size_t i = 0; i < s.size(); ++i) s.data[i] += 0.7 * truth.data[i];
  const double a = roc_auc(pooled_from(s, truth));
  Map t = s;
  for (double& v : t.data) v = std::exp(3.0 * v) - 2.0;
  EXPECT_DOUBLE_EQ(roc_auc(pooled_from(t, truth)), a);
  Map neg = s;
  for (double& v : neg.data) v = -v;
  EXPECT_NEAR(roc_auc(pooled_from(neg, truth)) + a, 1.0, 1e-15);
}

TEST(RocAuc, SpanOverloadAndErrors) {
  std::vector<Map> maps = {oracle::gaussian_map(7, 5, 5), oracle::gaussian_map(8, 5, 5)};
  std::vector<Mask> masks = {random_mask(9, 5, 5, 0.5), Mask(5, 5)};
  PooledScores p;
  p.add(maps[0], masks[0]);
  p.add(maps[1], masks[1]);
  p.finalize();
  EXPECT_DOUBLE_EQ(roc_auc(maps, masks), roc_auc(p));
  EXPECT_THROW(roc_auc(std::vector<Map>{maps[1]}, std::vector<Mask>{masks[1]}), Error);
  EXPECT_THROW(roc_auc(std::vector<Map>{maps[0]}, std::vector<Mask>{Mask(4, 5)}), Error);
  try {
    gap_metric(std::vector<Map>{maps[1]}, std::vector<Mask>{masks[1]});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UndefinedMetric);
  }
}

TEST(Gap, ShiftedFixture) {
  const Mask truth = random_mask(10, 200, 200, 0.3);
  Map s = oracle::gaussian_map(11, 200, 200);
  EXPECT_NEAR(gap_metric(pooled_from(s, truth)), 0.0, 0.05);
  for (std::size_t i = 0; i < s.size(); ++i) s.data[i] += 3.0 * truth.data[i];
  const double g = gap_metric(pooled_from(s, truth));
  EXPECT_NEAR(g, 3.0, 0.05);
  for (std::size_t i = 0; i < s.size(); ++i) s.data[i] += 1.5 * truth.data[i];
  EXPECT_NEAR(gap_metric(pooled_from(s, truth)), g + 1.5, 1e-12);
}

TEST(Roc, CurveSweepAndOperatingPoint) {
  const Mask truth = random_mask(12, 20, 20, 0.4);
  Map s = oracle::gaussian_map(13, 20, 20);
  for (std::size_t i = 0; i < s.size(); ++i) s.data[i] = std::round(4.0 * (s.data[i] + truth.data[i])) / 4.0;
  const PooledScores p = pooled_from(s, truth);
  const auto curve = roc_curve(p);
  EXPECT_EQ(curve.front().fpr, 0.0);
  EXPECT_EQ(curve.back().fpr, 1.0);
  EXPECT_EQ(curve.back().tpr, 1.0);
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_LT(curve[i].threshold, curve[i - 1].threshold);
    EXPECT_GE(curve[i].fpr, curve[i - 1].fpr);
    EXPECT_GE(curve[i].tpr, curve[i - 1].tpr);
    area += (curve[i].fpr - curve[i - 1].fpr) * 0.5 * (curve[i].tpr + curve[i - 1].tpr);
    const RocPoint op = operating_point(p, curve[i].threshold);
    EXPECT_DOUBLE_EQ(op.fpr, curve[i].fpr);
    EXPECT_DOUBLE_EQ(op.tpr, curve[i].tpr);
  }
  EXPECT_NEAR(area, roc_auc(p), 1e-12);

  const auto sweep = threshold_sweep(p, default_sweep_deltas());
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    EXPECT_GT(sweep[i].delta, sweep[i - 1].delta);
    EXPECT_GE(sweep[i].tpr, sweep[i - 1].tpr);
    EXPECT_GE(sweep[i].fpr, sweep[i - 1].fpr);
    EXPECT_DOUBLE_EQ(sweep[i].as_threshold, -std::log10(sweep[i].delta));
  }
}

TEST(Calibration, DeterministicAndMonotone) {
  DetectorConfig cfg;
  cfg.components = ComponentSpec::fixed(10);
  cfg.block.size = 16;
  cfg.block.stride = 8;
  cfg.block.subsampling = 4;
  const auto a = calibrate_noise(cfg, 50, 7, CalibrationMode::Injected, 32);
  const auto b = calibrate_noise(cfg, 50, 7, CalibrationMode::Injected, 32);
  ASSERT_EQ(a.size(), 8u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean_count, b[i].mean_count);
    EXPECT_EQ(a[i].trials, 50);
    EXPECT_LE(a[i].lower99, a[i].mean_count);
    if (i % 4 != 0) EXPECT_GE(a[i].mean_count, a[i - 1].mean_count);
  }
  EXPECT_THROW(calibrate_noise(cfg, 49, 7, CalibrationMode::Injected, 32), Error);

  TempDir dir("cal");
  write_calibration_csv(a, dir.file("a.csv"));
  write_calibration_csv(b, dir.file("b.csv"));
  EXPECT_EQ(testing_support::read_bytes(dir.file("a.csv")), testing_support::read_bytes(dir.file("b.csv")));
  EXPECT_EQ(testing_support::read_bytes(dir.file("a.csv")).rfind("mode,nfa,delta,", 0), 0u);
}

TEST(Synth, MasksAndDeterminism) {
  SynthSpec spec;
  spec.height = 64;
  spec.width = 48;
  DefectSpec none;
  const auto [img0, mask0] = synth_anomaly(1, spec, none);
  EXPECT_EQ(mask0.count(), 0u);

  DefectSpec rect{DefectShape::Rectangle, DefectKind::Variance, 10, 5, 12, 20, 2.0, 45.0};
  const auto [a, am] = synth_anomaly(2, spec, rect);
  const auto [b, bm] = synth_anomaly(2, spec, rect);
  EXPECT_EQ(a, b);
  EXPECT_EQ(am, bm);
  EXPECT_EQ(am.count(), 240u);
  EXPECT_EQ(am.at(10, 5), 1);
  EXPECT_EQ(am.at(9, 5), 0);

  DefectSpec ell = rect;
  ell.shape = DefectShape::Ellipse;
  const auto [e, em] = synth_anomaly(2, spec, ell);
  EXPECT_NEAR(static_cast<double>(em.count()), M_PI * 6 * 10, 12.0);
  EXPECT_EQ(em.at(16, 15), 1);
  EXPECT_EQ(em.at(10, 5), 0);

  SynthSpec sine = spec;
  sine.background = Background::Sinusoid;
  DefectSpec orient = rect;
  orient.kind = DefectKind::Orientation;
  EXPECT_NO_THROW(synth_anomaly(3, sine, orient));
  EXPECT_THROW(synth_anomaly(3, spec, orient), Error);
  DefectSpec huge = rect;
  huge.height = 70;
  EXPECT_THROW(synth_anomaly(3, spec, huge), Error);

  SynthSpec low = spec;
  low.background = Background::LowpassNoise;
  const Image li = synth_anomaly(4, low, none).first;
  const Image wi = synth_anomaly(4, spec, none).first;
  // low-pass noise is spatially smoother than white noise
  auto roughness = [](const Image& im) {
    double s = 0.0;
    for (int y = 0; y < im.height; ++y) {
      for (int x = 1; x < im.width; ++x) s += std::abs(im.at(0, y, x) - im.at(0, y, x - 1));
    }
    return s;
  };
  EXPECT_LT(roughness(li), 0.5 * roughness(wi));
}

TEST(Synth, PlantedVarianceIsDetectable) {
  SynthSpec spec;
  const DefectSpec d{DefectShape::Rectangle, DefectKind::Variance, 116, 116, 24, 24, 2.0, 45.0};
  const auto [img, mask] = synth_anomaly(5, spec, d);
  const DetectionResult r = detect(img, DetectorConfig{});
  double best = -1e300;
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    if (mask.data[i]) best = std::max(best, r.anomaly_score.data[i]);
  }
  EXPECT_GE(best, 0.0);
}

void touch_png(const fs::path& p) {
  fs::create_directories(p.parent_path());
  save_gray_png(Map(8, 8, 0.5), p.string(), 0.0, 1.0);
}

TEST(Dataset, LayoutValidation) {
  TempDir dir("ds");
  const fs::path root = dir.path() / "carpet";
  for (const char* type : {"cut", "hole"}) {
    for (int i = 0; i < 3; ++i) {
      const std::string n = "00" + std::to_string(i);
      touch_png(root / "test" / type / (n + ".png"));
      touch_png(root / "ground_truth" / type / (n + "_mask.png"));
    }
  }
  for (int i = 0; i < 4; ++i) touch_png(root / "test" / "good" / ("00" + std::to_string(i) + ".png"));
  const auto samples = load_dataset(root.string());
  ASSERT_EQ(samples.size(), 10u);
  EXPECT_EQ(std::count_if(samples.begin(), samples.end(), [](const LabeledSample& s) { return s.has_mask(); }), 6);
  EXPECT_EQ(samples.front().category, "carpet");
  EXPECT_EQ(load_dataset(root.string() + "/").size(), 10u);

  fs::remove(root / "ground_truth" / "hole" / "001_mask.png");
  try {
    load_dataset(root.string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Layout);
    EXPECT_NE(std::string(e.what()).find("001_mask.png"), std::string::npos);
  }
  touch_png(root / "ground_truth" / "hole" / "001_mask.png");
  touch_png(root / "ground_truth" / "hole" / "007_mask.png");
  try {
    load_dataset(root.string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Layout);
    EXPECT_NE(std::string(e.what()).find("007_mask.png"), std::string::npos);
  }

  fs::create_directories(dir.path() / "empty");
  try {
    load_dataset((dir.path() / "empty").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyDataset);
  }
  EXPECT_THROW(load_dataset((dir.path() / "absent").string()), Error);
}

TEST(Dataset, EvaluateSyntheticFixture) {
  TempDir dir("evalds");
  const std::string root = (dir.path() / "synth").string();
  EXPECT_EQ(write_synthetic_dataset(root, 2, 3), 6);
  DetectorConfig cfg;
  cfg.jobs = 2;
  const EvalReport rep = evaluate_dataset(root, cfg);
  EXPECT_EQ(rep.images.size(), 6u);
  EXPECT_GT(rep.roc_auc, 0.5);
  EXPECT_LE(rep.roc_auc, 1.0);
  EXPECT_LE(rep.youden_at_threshold, rep.youden_max);
  cfg.jobs = 1;
  const EvalReport again = evaluate_dataset(root, cfg);
  EXPECT_EQ(again.roc_auc, rep.roc_auc);

  write_eval_report(rep, dir.file("report"));
  const std::string csv = testing_support::read_bytes(dir.file("report/report.csv"));
  EXPECT_EQ(csv.rfind("# variant=patch_pca nfa=pixel", 0), 0u);
  EXPECT_NE(csv.find("\nsummary,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir.path() / "report" / "sweep.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "report" / "summary.txt"));
}

}  // namespace
