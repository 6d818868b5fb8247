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

#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "detector.hpp"
#include "error.hpp"
#include "features.hpp"
#include "parallel.hpp"

namespace anodet {
namespace fs = std::filesystem;

namespace {

constexpr double kZ99 = 2.3263478740408408;  // one-sided 99% normal quantile
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median_of_sorted(const std::vector<double>& v) {
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void require_both_classes(const PooledScores& p) {
  if (p.positives.empty() || p.negatives.empty()) {
    fail(ErrorKind::UndefinedMetric, "metric needs at least one positive and one negative pixel");
  }
}

std::size_t count_at_least(const std::vector<double>& sorted, double threshold) {
  return static_cast<std::size_t>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), threshold));
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

Map gaussian_blur(const Map& in, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += taps[i + radius];
  }
  for (double& t : taps) t /= sum;
  Map tmp(in.height, in.width);
  Map out(in.height, in.width);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += taps[i + radius] * in.at(y, reflect_index(x + i, in.width));
      tmp.at(y, x) = acc;
    }
  }
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += taps[i + radius] * tmp.at(reflect_index(y + i, in.height), x);
      out.at(y, x) = acc;
    }
  }
  return out;
}

Map normal_field(std::mt19937_64& rng, int h, int w) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Map m(h, w);
  for (double& v : m.data) v = normal(rng);
  return m;
}

}  // namespace

// ---------------------------------------------------------------- metrics

void PooledScores::add(const Map& scores, const Mask& truth) {
  if (scores.height != truth.height || scores.width != truth.width) {
    fail(ErrorKind::Size, "score map and ground-truth mask differ in size");
  }
  for (std::size_t p = 0; p < scores.size(); ++p) {
    (truth.data[p] ? positives : negatives).push_back(scores.data[p]);
  }
}

void PooledScores::finalize() {
  std::sort(positives.begin(), positives.end());
  std::sort(negatives.begin(), negatives.end());
}

PooledScores pool_scores(std::span<const Map> scores, std::span<const Mask> truths) {
  if (scores.size() != truths.size()) fail(ErrorKind::Contract, "need one mask per score map");
  PooledScores p;
  for (std::size_t i = 0; i < scores.size(); ++i) p.add(scores[i], truths[i]);
  p.finalize();
  return p;
}

double roc_auc(const PooledScores& p) {
  require_both_classes(p);
  const auto& neg = p.negatives;
  std::uint64_t twice_u = 0;
  std::size_t below = 0;
  std::size_t not_above = 0;
  for (double v : p.positives) {
    while (below < neg.size() && neg[below] < v) ++below;
    if (not_above < below) not_above = below;
    while (not_above < neg.size() && neg[not_above] <= v) ++not_above;
    twice_u += 2 * below + (not_above - below);
  }
  return static_cast<double>(static_cast<long double>(twice_u) /
                             (2.0L * p.positives.size() * static_cast<long double>(neg.size())));
}

double roc_auc(std::span<const Map> scores, std::span<const Mask> truths) { return roc_auc(pool_scores(scores, truths)); }

double gap_metric(const PooledScores& p) {
  require_both_classes(p);
  return median_of_sorted(p.positives) - median_of_sorted(p.negatives);
}

double gap_metric(std::span<const Map> scores, std::span<const Mask> truths) {
  return gap_metric(pool_scores(scores, truths));
}

std::vector<RocPoint> roc_curve(const PooledScores& p) {
  require_both_classes(p);
  const double np = static_cast<double>(p.positives.size());
  const double nn = static_cast<double>(p.negatives.size());
  std::vector<RocPoint> curve{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  std::size_t i = p.positives.size();
  std::size_t j = p.negatives.size();
  while (i > 0 || j > 0) {
    double t = -std::numeric_limits<double>::infinity();
    if (i > 0) t = std::max(t, p.positives[i - 1]);
    if (j > 0) t = std::max(t, p.negatives[j - 1]);
    while (i > 0 && p.positives[i - 1] == t) --i;
    while (j > 0 && p.negatives[j - 1] == t) --j;
    curve.push_back({t, (nn - static_cast<double>(j)) / nn, (np - static_cast<double>(i)) / np});
  }
  return curve;
}

RocPoint operating_point(const PooledScores& p, double threshold) {
  require_both_classes(p);
  return {threshold, static_cast<double>(count_at_least(p.negatives, threshold)) / p.negatives.size(),
          static_cast<double>(count_at_least(p.positives, threshold)) / p.positives.size()};
}

const std::vector<double>& default_sweep_deltas() {
  static const std::vector<double> deltas = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 1e2, 1e3, 1e4};
  return deltas;
}

std::vector<SweepRow> threshold_sweep(const PooledScores& p, std::span<const double> deltas) {
  std::vector<SweepRow> rows;
  for (double delta : deltas) {
    if (!(delta > 0.0)) fail(ErrorKind::InvalidArgument, "sweep thresholds must be positive");
    const double t = -std::log10(delta);
    const RocPoint op = operating_point(p, t);
    rows.push_back({delta, t, op.tpr, op.fpr});
  }
  return rows;
}

// ---------------------------------------------------------------- calibration

const char* to_string(CalibrationMode mode) { return mode == CalibrationMode::Injected ? "injected" : "pipeline"; }

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<CalibrationRow> calibrate_noise(const DetectorConfig& cfg, int trials, std::uint64_t seed,
                                            CalibrationMode mode, int size) {
  cfg.validate();
  if (trials < 50) fail(ErrorKind::InvalidArgument, "calibration needs at least 50 trials");
  if (size < 1) fail(ErrorKind::InvalidArgument, "calibration image size must be positive");
  static const std::vector<double> deltas = {0.01, 0.1, 1.0, 10.0};
  const std::vector<NfaMode> modes = {NfaMode::Pixel, NfaMode::Block};

  // counts[mode][delta][trial]
  std::vector<std::vector<std::vector<double>>> counts(
      modes.size(), std::vector<std::vector<double>>(deltas.size(), std::vector<double>(trials)));
  auto tally = [&](std::size_t mi, int trial, const Map& log10_nfa) {
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      const double lim = std::log10(deltas[di]);
      counts[mi][di][trial] = static_cast<double>(
          std::count_if(log10_nfa.data.begin(), log10_nfa.data.end(), [lim](double v) { return v <= lim; }));
    }
  };

  const int m = cfg.components.variance_fraction > 0.0 ? 45 : cfg.components.count;
  const int g = cfg.block.subsampling > 0 ? cfg.block.subsampling : cfg.max_kernel_side();
  DetectorConfig inner = cfg;
  inner.jobs = 1;

  parallel_for(trials, cfg.jobs, [&](int trial) {
    std::mt19937_64 rng(trial_seed(seed, static_cast<std::uint64_t>(trial)));
    if (mode == CalibrationMode::Injected) {
      std::vector<Map> maps;
      maps.reserve(m);
      for (int i = 0; i < m; ++i) maps.push_back(normal_field(rng, size, size));
      const ComponentStats stats = estimate_component_stats(maps);
      const MahalanobisMap dm = mahalanobis_map(maps, stats);
      tally(0, trial, pixel_nfa(dm).log10_nfa);
      tally(1, trial, block_nfa(dm, {cfg.block.size, cfg.block.stride, cfg.block.p_value, g}).log10_nfa);
    } else {
      Map noise = normal_field(rng, size, size);
      for (double& v : noise.data) v = 0.5 + 0.1 * v;
      const Image img = Image::from_map(noise);
      for (std::size_t mi = 0; mi < modes.size(); ++mi) {
        DetectorConfig run = inner;
        run.nfa = modes[mi];
        Map log10_nfa = detect(img, run).anomaly_score;
        for (double& v : log10_nfa.data) v = -v;
        tally(mi, trial, log10_nfa);
      }
    }
  });

  std::vector<CalibrationRow> rows;
  for (std::size_t mi = 0; mi < modes.size(); ++mi) {
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      const auto& c = counts[mi][di];
      double mean = 0.0;
      for (double v : c) mean += v;
      mean /= trials;
      double ss = 0.0;
      for (double v : c) ss += (v - mean) * (v - mean);
      const double se = std::sqrt(ss / (trials - 1) / trials);
      rows.push_back({mode, modes[mi], deltas[di], mean, se, mean - kZ99 * se, mean + kZ99 * se, trials});
    }
  }
  return rows;
}

void write_calibration_csv(const std::vector<CalibrationRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << "mode,nfa,delta,mean_count,std_error,lower99,upper99,trials\n";
  for (const auto& r : rows) {
    out << to_string(r.mode) << ',' << to_string(r.nfa) << ',' << fmt(r.delta) << ',' << fmt(r.mean_count) << ','
        << fmt(r.std_error) << ',' << fmt(r.lower99) << ',' << fmt(r.upper99) << ',' << r.trials << '\n';
  }
  if (!out) fail(ErrorKind::Io, "failed writing " + path);
}

// ---------------------------------------------------------------- synthetic fixtures

std::pair<Image, Mask> synth_anomaly(std::uint64_t seed, const SynthSpec& spec, const DefectSpec& d) {
  const int h = spec.height;
  const int w = spec.width;
  if (h < 1 || w < 1) fail(ErrorKind::InvalidArgument, "synthetic image needs positive dimensions");
  if (d.height < 0 || d.width < 0) fail(ErrorKind::InvalidArgument, "defect size must be non-negative");
  const bool planted = d.height > 0 && d.width > 0;
  if (planted && (d.height > h || d.width > w || d.top < 0 || d.left < 0 || d.top + d.height > h ||
                  d.left + d.width > w)) {
    std::ostringstream os;
    os << "defect " << d.height << "x" << d.width << " at (" << d.top << ", " << d.left << ") does not fit in " << h
       << "x" << w;
    fail(ErrorKind::InvalidArgument, os.str());
  }
  if (d.kind != DefectKind::Variance && spec.background != Background::Sinusoid) {
    fail(ErrorKind::InvalidArgument, "orientation and frequency defects need a sinusoid background");
  }
  if (d.kind == DefectKind::Variance && planted && !(d.factor > 0.0)) {
    fail(ErrorKind::InvalidArgument, "variance factor must be positive");
  }

  Mask mask(h, w);
  if (planted) {
    const double cy = d.top + 0.5 * d.height;
    const double cx = d.left + 0.5 * d.width;
    for (int y = d.top; y < d.top + d.height; ++y) {
      for (int x = d.left; x < d.left + d.width; ++x) {
        bool inside = true;
        if (d.shape == DefectShape::Ellipse) {
          const double u = (y + 0.5 - cy) / (0.5 * d.height);
          const double v = (x + 0.5 - cx) / (0.5 * d.width);
          inside = u * u + v * v <= 1.0;
        }
        mask.data[static_cast<std::size_t>(y) * w + x] = inside ? 1 : 0;
      }
    }
  }

  std::mt19937_64 rng(seed);
  Map noise = normal_field(rng, h, w);
  if (spec.background == Background::LowpassNoise) {
    noise = gaussian_blur(noise, spec.lowpass_sigma);
    const double mean = noise.mean();
    double ss = 0.0;
    for (double v : noise.data) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(noise.size()));
    for (double& v : noise.data) v = (v - mean) / sd;
  }

  auto wave = [&](int y, int x, double angle_deg, double period) {
    const double a = angle_deg * std::numbers::pi / 180.0;
    return spec.amplitude * std::cos(2.0 * std::numbers::pi * (x * std::cos(a) + y * std::sin(a)) / period);
  };

  Image img(1, h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool in = mask.at(y, x) != 0;
      double t = spec.sigma * noise.at(y, x);
      if (spec.background == Background::Sinusoid) {
        double angle = spec.angle_deg;
        double period = spec.period;
        if (in && d.kind == DefectKind::Orientation) angle += d.angle_deg;
        if (in && d.kind == DefectKind::Frequency) period /= d.factor;
        t += wave(y, x, angle, period);
      }
      if (in && d.kind == DefectKind::Variance) t *= std::sqrt(d.factor);
      img.at(0, y, x) = spec.mean + t;
    }
  }
  return {std::move(img), std::move(mask)};
}

int write_synthetic_dataset(const std::string& root, int per_type, std::uint64_t seed) {
  if (per_type < 1) fail(ErrorKind::InvalidArgument, "need at least one image per defect type");
  const fs::path base(root);
  const std::vector<std::string> types = {"good", "variance", "orientation"};
  std::error_code ec;
  int written = 0;
  for (std::size_t ti = 0; ti < types.size(); ++ti) {
    const std::string& type = types[ti];
    fs::create_directories(base / "test" / type, ec);
    if (type != "good") fs::create_directories(base / "ground_truth" / type, ec);
    if (ec) fail(ErrorKind::Io, "cannot create dataset directories under " + root);
    for (int i = 0; i < per_type; ++i) {
      std::mt19937_64 rng(trial_seed(seed, ti * 1000 + i));
      std::uniform_int_distribution<int> side(20, 32);
      std::uniform_int_distribution<int> pos(8, 128 - 8 - 32);
      SynthSpec spec;
      spec.height = spec.width = 128;
      DefectSpec d;
      d.shape = i % 2 ? DefectShape::Ellipse : DefectShape::Rectangle;
      if (type == "variance") {
        spec.background = i % 2 ? Background::LowpassNoise : Background::WhiteNoise;
        d.kind = DefectKind::Variance;
        d.factor = 4.0;
      } else if (type == "orientation") {
        spec.background = Background::Sinusoid;
        spec.sigma = 0.05;
        spec.angle_deg = 15.0 * (i % 6);
        d.kind = DefectKind::Orientation;
        d.angle_deg = 60.0;
      }
      if (type != "good") {
        d.height = side(rng);
        d.width = side(rng);
        d.top = pos(rng);
        d.left = pos(rng);
      } else {
        spec.background = i % 2 ? Background::Sinusoid : Background::WhiteNoise;
        if (spec.background == Background::Sinusoid) spec.sigma = 0.05;
      }
      const auto [img, mask] = synth_anomaly(trial_seed(seed, ti * 1000 + i + 500), spec, d);
      std::ostringstream name;
      name << std::setw(3) << std::setfill('0') << i;
      save_gray_png(img.channel(0), (base / "test" / type / (name.str() + ".png")).string(), 0.0, 1.0);
      if (type != "good") save_mask(mask, (base / "ground_truth" / type / (name.str() + "_mask.png")).string());
      ++written;
    }
  }
  return written;
}

// ---------------------------------------------------------------- datasets

std::vector<LabeledSample> load_dataset(const std::string& root) {
  const fs::path base = fs::path(root).lexically_normal();
  std::error_code ec;
  if (!fs::is_directory(base, ec)) fail(ErrorKind::NotFound, "no dataset directory at " + root);
  std::string category = base.filename().string();
  if (category.empty()) category = base.parent_path().filename().string();

  const fs::path test = base / "test";
  const fs::path truth = base / "ground_truth";
  std::vector<LabeledSample> samples;
  std::vector<std::string> offenders;

  auto sorted_entries = [](const fs::path& dir) {
    std::vector<fs::path> out;
    std::error_code e;
    if (!fs::is_directory(dir, e)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
  };

  for (const fs::path& type_dir : sorted_entries(test)) {
    if (!fs::is_directory(type_dir)) continue;
    const std::string type = type_dir.filename().string();
    for (const fs::path& file : sorted_entries(type_dir)) {
      if (file.extension() != ".png") continue;
      LabeledSample s{file.string(), "", category, type};
      if (type != "good") {
        const fs::path mask = truth / type / (file.stem().string() + "_mask.png");
        if (fs::exists(mask)) {
          s.mask_path = mask.string();
        } else {
          offenders.push_back("missing mask " + mask.string() + " for " + file.string());
        }
      }
      samples.push_back(std::move(s));
    }
  }
  for (const fs::path& type_dir : sorted_entries(truth)) {
    if (!fs::is_directory(type_dir)) continue;
    const std::string type = type_dir.filename().string();
    for (const fs::path& file : sorted_entries(type_dir)) {
      const std::string stem = file.stem().string();
      const std::string suffix = "_mask";
      const bool named = file.extension() == ".png" && stem.size() > suffix.size() &&
                         stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0;
      const fs::path image = test / type / (stem.substr(0, named ? stem.size() - suffix.size() : 0) + ".png");
      if (!named || type == "good" || !fs::exists(image)) offenders.push_back("orphan mask " + file.string());
    }
  }
  if (!offenders.empty()) {
    std::string msg = "dataset layout problems:";
    for (const auto& o : offenders) msg += "\n  " + o;
    fail(ErrorKind::Layout, msg);
  }
  if (samples.empty()) fail(ErrorKind::EmptyDataset, "no test images under " + test.string());
  return samples;
}

EvalReport evaluate_dataset(const std::string& root, const DetectorConfig& cfg) {
  cfg.validate();
  const auto samples = load_dataset(root);
  const int n = static_cast<int>(samples.size());
  std::vector<ImageScore> scores(n);
  std::vector<PooledScores> parts(n);
  DetectorConfig inner = cfg;
  inner.jobs = 1;
  inner.debug_dir.clear();

  parallel_for(n, cfg.jobs, [&](int i) {
    const LabeledSample& s = samples[i];
    const Image img = load_image(s.image_path);
    DetectionResult res;
    try {
      res = detect(img, inner);
    } catch (const Error& e) {
      throw Error(e.kind(), s.image_path + ": " + e.what());
    }
    Mask truth = s.has_mask() ? load_mask(s.mask_path) : Mask(img.height, img.width);
    if (truth.height != img.height || truth.width != img.width) {
      fail(ErrorKind::Layout, "mask " + s.mask_path + " does not match its image size");
    }
    ImageScore& sc = scores[i];
    sc.image = fs::relative(s.image_path, root).generic_string();
    sc.defect_type = s.defect_type;
    sc.has_mask = s.has_mask();
    sc.pixels = truth.data.size();
    sc.positives = truth.count();
    sc.max_as = res.anomaly_score.max();
    sc.detected = res.mask.count();
    parts[i].add(res.anomaly_score, truth);
    parts[i].finalize();
    sc.auroc = (sc.positives > 0 && sc.positives < sc.pixels) ? roc_auc(parts[i]) : kNaN;
  });

  PooledScores pooled;
  for (auto& part : parts) {
    pooled.positives.insert(pooled.positives.end(), part.positives.begin(), part.positives.end());
    pooled.negatives.insert(pooled.negatives.end(), part.negatives.begin(), part.negatives.end());
    part = {};
  }
  pooled.finalize();

  EvalReport rep;
  rep.config = cfg;
  rep.images = std::move(scores);
  rep.roc_auc = roc_auc(pooled);
  rep.gap = gap_metric(pooled);
  double sum = 0.0;
  int counted = 0;
  for (const auto& s : rep.images) {
    if (!std::isnan(s.auroc)) {
      sum += s.auroc;
      ++counted;
    }
  }
  rep.roc_auc_per_image_mean = counted ? sum / counted : kNaN;
  rep.sweep = threshold_sweep(pooled, default_sweep_deltas());
  const RocPoint at = operating_point(pooled, cfg.threshold_as);
  rep.youden_at_threshold = at.tpr - at.fpr;
  rep.youden_max = -1.0;
  for (const RocPoint& p : roc_curve(pooled)) rep.youden_max = std::max(rep.youden_max, p.tpr - p.fpr);
  return rep;
}

void write_eval_report(const EvalReport& rep, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + out_dir);
  const fs::path out(out_dir);
  const std::string tag = std::string("# variant=") + to_string(rep.config.variant) +
                          " nfa=" + to_string(rep.config.nfa) + " scales=" + std::to_string(rep.config.scales);
  {
    std::ofstream csv(out / "report.csv");
    if (!csv) fail(ErrorKind::Io, "cannot write report.csv");
    csv << tag << '\n';
    csv << "image,defect_type,has_mask,pixels,positives,auroc,max_as,detected_pixels,auroc_per_image_mean,gap\n";
    std::size_t pixels = 0;
    std::size_t positives = 0;
    std::size_t detected = 0;
    double max_as = -std::numeric_limits<double>::infinity();
    for (const auto& s : rep.images) {
      csv << s.image << ',' << s.defect_type << ',' << (s.has_mask ? 1 : 0) << ',' << s.pixels << ',' << s.positives
          << ',' << fmt(s.auroc) << ',' << fmt(s.max_as) << ',' << s.detected << ",,\n";
      pixels += s.pixels;
      positives += s.positives;
      detected += s.detected;
      max_as = std::max(max_as, s.max_as);
    }
    csv << "summary,all,," << pixels << ',' << positives << ',' << fmt(rep.roc_auc) << ',' << fmt(max_as) << ','
        << detected << ',' << fmt(rep.roc_auc_per_image_mean) << ',' << fmt(rep.gap) << '\n';
    if (!csv) fail(ErrorKind::Io, "failed writing report.csv");
  }
  {
    std::ofstream csv(out / "sweep.csv");
    if (!csv) fail(ErrorKind::Io, "cannot write sweep.csv");
    csv << tag << '\n' << "delta,as_threshold,tpr,fpr\n";
    for (const auto& r : rep.sweep) {
      csv << fmt(r.delta) << ',' << fmt(r.as_threshold) << ',' << fmt(r.tpr) << ',' << fmt(r.fpr) << '\n';
    }
  }
  std::ofstream txt(out / "summary.txt");
  if (!txt) fail(ErrorKind::Io, "cannot write summary.txt");
  txt << "variant: " << to_string(rep.config.variant) << '\n'
      << "nfa: " << to_string(rep.config.nfa) << '\n'
      << "images: " << rep.images.size() << '\n'
      << "pixel_auroc_pooled: " << fmt(rep.roc_auc) << '\n'
      << "pixel_auroc_per_image_mean: " << fmt(rep.roc_auc_per_image_mean) << '\n'
      << "as_gap_median: " << fmt(rep.gap) << '\n'
      << "youden_at_threshold: " << fmt(rep.youden_at_threshold) << '\n'
      << "youden_max: " << fmt(rep.youden_max) << '\n';
}

}  // namespace anodet
