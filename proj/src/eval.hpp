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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "image.hpp"
#include "image_io.hpp"

namespace anodet {

// ---------------------------------------------------------------- metrics

/// Scores split by ground-truth class, each sorted ascending.
struct PooledScores {
  std::vector<double> positives;
  std::vector<double> negatives;

  void add(const Map& scores, const Mask& truth);
  void finalize();  // sorts; call once after the last add
};

PooledScores pool_scores(std::span<const Map> scores, std::span<const Mask> truths);

/// Mann-Whitney AUROC with ties counted as one half. Throws UndefinedMetric
/// when a class is empty.
double roc_auc(const PooledScores& pooled);
double roc_auc(std::span<const Map> scores, std::span<const Mask> truths);

/// median(positive scores) - median(negative scores).
double gap_metric(const PooledScores& pooled);
double gap_metric(std::span<const Map> scores, std::span<const Mask> truths);

struct RocPoint {
  double threshold;  // pixels with score >= threshold are flagged
  double fpr;
  double tpr;
};

/// One point per distinct score, thresholds decreasing, plus (0, 0) at +inf.
std::vector<RocPoint> roc_curve(const PooledScores& pooled);

/// TPR and FPR of the rule score >= threshold.
RocPoint operating_point(const PooledScores& pooled, double threshold);

struct SweepRow {
  double delta;         // NFA threshold
  double as_threshold;  // -log10(delta)
  double tpr;
  double fpr;
};

/// Rates at NFA <= delta for each delta, i.e. anomaly score >= -log10(delta).
std::vector<SweepRow> threshold_sweep(const PooledScores& pooled, std::span<const double> deltas);
const std::vector<double>& default_sweep_deltas();

// ---------------------------------------------------------------- calibration

enum class CalibrationMode {
  Injected,  // i.i.d. N(0,1) feature stacks, exact null model
  Pipeline,  // Gaussian noise images through the full detector
};

struct CalibrationRow {
  CalibrationMode mode;
  NfaMode nfa;
  double delta;
  double mean_count;
  double std_error;
  double lower99;  // mean - z(0.99) * std_error
  double upper99;  // mean + z(0.99) * std_error
  int trials;
};

/// Mean number of pixels with NFA <= delta over seeded noise trials, for
/// delta in {0.01, 0.1, 1, 10} and both NFA flavours. `size` is the side of
/// the square images or feature maps.
std::vector<CalibrationRow> calibrate_noise(const DetectorConfig& cfg, int trials, std::uint64_t seed,
                                            CalibrationMode mode, int size);
void write_calibration_csv(const std::vector<CalibrationRow>& rows, const std::string& path);
const char* to_string(CalibrationMode mode);

/// Independent, deterministic generator for trial `index` of a run.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------- synthetic fixtures

enum class Background { WhiteNoise, LowpassNoise, Sinusoid };
enum class DefectKind { Variance, Orientation, Frequency };
enum class DefectShape { Rectangle, Ellipse };

struct SynthSpec {
  int height = 256;
  int width = 256;
  Background background = Background::WhiteNoise;
  double mean = 0.5;
  double sigma = 0.1;          // noise std (white/low-pass), additive noise for sinusoid
  double lowpass_sigma = 2.0;  // Gaussian smoothing of low-pass noise, pixels
  double amplitude = 0.2;      // sinusoid amplitude
  double period = 8.0;         // sinusoid period, pixels
  double angle_deg = 30.0;     // sinusoid orientation
};

struct DefectSpec {
  DefectShape shape = DefectShape::Rectangle;
  DefectKind kind = DefectKind::Variance;
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;
  double factor = 2.0;      // variance multiplier, or period divisor for Frequency
  double angle_deg = 45.0;  // orientation offset for Orientation
};

/// Deterministic textured image with one planted defect and its exact mask.
/// Orientation and Frequency defects need a Sinusoid background.
std::pair<Image, Mask> synth_anomaly(std::uint64_t seed, const SynthSpec& spec, const DefectSpec& defect);

/// MVTec-style fixture dataset under `root`: test/{good,variance,orientation}
/// plus ground_truth masks. Returns the number of test images written.
int write_synthetic_dataset(const std::string& root, int per_type, std::uint64_t seed);

// ---------------------------------------------------------------- datasets

struct LabeledSample {
  std::string image_path;
  std::string mask_path;  // empty for anomaly-free images
  std::string category;
  std::string defect_type;

  bool has_mask() const { return !mask_path.empty(); }
};

/// Reads `<root>/test/<type>/<name>.png` with masks at
/// `<root>/ground_truth/<type>/<name>_mask.png`; type "good" has none.
std::vector<LabeledSample> load_dataset(const std::string& root);

struct ImageScore {
  std::string image;
  std::string defect_type;
  bool has_mask = false;
  std::size_t pixels = 0;
  std::size_t positives = 0;
  double auroc = 0.0;  // NaN unless the image has both classes
  double max_as = 0.0;
  std::size_t detected = 0;
};

struct EvalReport {
  double roc_auc = 0.0;                 // pooled over every pixel
  double roc_auc_per_image_mean = 0.0;  // over images with both classes, NaN if none
  double gap = 0.0;
  double youden_at_threshold = 0.0;
  double youden_max = 0.0;
  std::vector<ImageScore> images;
  std::vector<SweepRow> sweep;
  DetectorConfig config;
};

/// Runs detect on every test image of the dataset and scores the maps.
EvalReport evaluate_dataset(const std::string& root, const DetectorConfig& cfg);

/// report.csv (one row per image plus a summary row), sweep.csv, summary.txt.
void write_eval_report(const EvalReport& report, const std::string& out_dir);

}  // namespace anodet
