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

// Acceptance run: one PASS/FAIL/SKIP line per criterion, nonzero exit when
// any selected criterion fails.

#include <CLI11.hpp>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "detector.hpp"
#include "eval.hpp"
#include "image_io.hpp"
#include "numerics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#ifndef ANODET_CLI_PATH
#error "ANODET_CLI_PATH must name the anodet executable"
#endif

namespace {

using namespace anodet;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Fail;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

Outcome verdict(bool ok, const std::string& detail) { return {ok ? Verdict::Pass : Verdict::Fail, detail}; }

// 1. chi2 and binomial tails against independent oracles.
Outcome special_functions() {
  const auto t0 = Clock::now();
  double worst_chi2 = 0.0;
  for (int m : {1, 2, 10, 45, 72}) {
    const int points = 400;
    for (int i = 0; i <= points; ++i) {
      const double d = 20.0 * m * i / points;
      const double got = numerics::chi2_sf(d, m).value;
      const double want = oracle::chi2_sf_log10(d, m);
      // relative error of the survival probability itself
      const double rel = std::abs(std::expm1((got - want) * std::log(10.0)));
      worst_chi2 = std::max(worst_chi2, rel);
    }
  }
  double worst_binom = 0.0;
  for (int n = 1; n <= 200; ++n) {
    for (double p : {1e-4, 0.01, 0.05, 0.3, 0.5, 0.9}) {
      for (int k = 0; k <= n; ++k) {
        const double got = numerics::binomial_tail(n, k, p).value;
        const double want = oracle::binomial_tail_log10(n, k, p);
        worst_binom = std::max(worst_binom, std::abs(got - want));
      }
    }
  }
  const double secs = seconds_since(t0);
  return verdict(worst_chi2 <= 1e-10 && worst_binom <= 1e-12 && secs < 10.0,
                 "max chi2 rel err " + fmt(worst_chi2) + " (tol 1e-10), max binomial log10 err " + fmt(worst_binom) +
                     " (tol 1e-12), " + fmt(secs, 3) + " s (limit 10 s)");
}

// 2. Mean false alarms on injected i.i.d. Gaussian stacks.
Outcome injected_calibration() {
  const auto t0 = Clock::now();
  DetectorConfig cfg;
  const auto rows = calibrate_noise(cfg, 500, 2024, CalibrationMode::Injected, 128);
  const double secs = seconds_since(t0);
  bool ok = secs < 300.0;
  std::string detail;
  for (const auto& r : rows) {
    if (r.delta < 0.1) continue;
    // fails only when the whole one-sided 99% interval sits above delta
    ok = ok && r.lower99 <= r.delta;
    detail += std::string(to_string(r.nfa)) + "@" + fmt(r.delta) + ": mean " + fmt(r.mean_count) + " lower99 " +
              fmt(r.lower99) + "; ";
  }
  return verdict(ok, detail + "500 trials, " + fmt(secs, 3) + " s (limit 300 s)");
}

// 3. Full pipeline on pure noise.
Outcome pipeline_false_alarms() {
  const auto t0 = Clock::now();
  DetectorConfig cfg;
  const int trials = 100;
  std::vector<double> counts;
  for (int t = 0; t < trials; ++t) {
    const Map noise = oracle::gaussian_map(trial_seed(77, t), 256, 256, 0.5, 0.1);
    counts.push_back(static_cast<double>(detect(Image::from_map(noise), cfg).mask.count()));
  }
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= trials;
  std::sort(counts.begin(), counts.end());
  const int clean = static_cast<int>(std::count(counts.begin(), counts.end(), 0.0));
  return verdict(mean <= 10.0, "mean " + fmt(mean) + " px at AS>=0 (limit 10), median " + fmt(counts[trials / 2]) +
                                   ", max " + fmt(counts.back()) + ", " + std::to_string(clean) +
                                   "/100 images clean, " + fmt(seconds_since(t0), 3) + " s");
}

// 4. Kolmogorov-Smirnov distance of the Mahalanobis map to chi2(45).
Outcome chi2_fit() {
  std::vector<Map> maps;
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> mu(-3.0, 3.0);
  std::uniform_real_distribution<double> sd(0.2, 5.0);
  for (int i = 0; i < 45; ++i) maps.push_back(oracle::gaussian_map(1000 + i, 256, 256, mu(rng), sd(rng)));
  const MahalanobisMap dm = mahalanobis_map(maps, estimate_component_stats(maps));
  const double ks = oracle::ks_distance(dm.values.data, [](double d) {
    return -std::expm1(numerics::chi2_sf(d, 45).value * std::log(10.0));
  });
  return verdict(ks <= 0.02 && dm.dof == 45, "KS " + fmt(ks) + " (limit 0.02), dof " + std::to_string(dm.dof));
}

// 5. Localisation of a doubled-variance 24x24 plant.
Outcome planted_localisation() {
  struct Setup {
    const char* name;
    anodet::Variant variant;
    NfaMode nfa;
  };
  const Setup setups[] = {{"pca+pixel", anodet::Variant::PatchPca, NfaMode::Pixel},
                              {"pca+block", anodet::Variant::PatchPca, NfaMode::Block},
                              {"gabor+pixel", anodet::Variant::Gabor, NfaMode::Pixel}};
  bool ok = true;
  std::string detail;
  for (const auto& v : setups) {
    DetectorConfig cfg;
    cfg.variant = v.variant;
    cfg.nfa = v.nfa;
    int hits = 0;
    double lo = 1.0, hi = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
      std::mt19937_64 rng(trial_seed(500, seed));
      std::uniform_int_distribution<int> pos(40, 256 - 40 - 24);
      const DefectSpec d{DefectShape::Rectangle, DefectKind::Variance, pos(rng), pos(rng), 24, 24, 2.0, 45.0};
      const auto [img, truth] = synth_anomaly(trial_seed(600, seed), SynthSpec{}, d);
      const Mask mask = detect(img, cfg).mask;
      std::size_t inter = 0, uni = 0;
      for (std::size_t i = 0; i < mask.data.size(); ++i) {
        inter += mask.data[i] && truth.data[i];
        uni += mask.data[i] || truth.data[i];
      }
      const double iou = uni ? static_cast<double>(inter) / uni : 0.0;
      lo = std::min(lo, iou);
      hi = std::max(hi, iou);
      hits += iou >= 0.3;
    }
    ok = ok && hits == 10;
    detail += std::string(v.name) + " " + std::to_string(hits) + "/10 (IoU " + fmt(lo, 3) + ".." + fmt(hi, 3) + "); ";
  }
  return verdict(ok, detail + "need IoU>=0.3 in 10/10");
}

// 6. The AS = 0 operating point against the best Youden index.
Outcome operating_point_quality() {
  testing_support::TempDir dir("acceptance_fixture");
  const std::string root = (dir.path() / "synthetic").string();
  const int n = write_synthetic_dataset(root, 8, 11);
  const EvalReport rep = evaluate_dataset(root, DetectorConfig{});
  const double ratio = rep.youden_max > 0.0 ? rep.youden_at_threshold / rep.youden_max : 0.0;
  return verdict(n >= 20 && ratio >= 0.9, std::to_string(n) + " images, Youden at AS=0 " +
                                              fmt(rep.youden_at_threshold) + ", max " + fmt(rep.youden_max) +
                                              ", ratio " + fmt(ratio) + " (limit 0.9), AUROC " + fmt(rep.roc_auc));
}

// 7. Leather numbers, only with a local MVTec AD copy.
Outcome leather_reproduction() {
  const char* env = std::getenv("ANODET_MVTEC_ROOT");
  if (!env || !*env) return {Verdict::Skip, "ANODET_MVTEC_ROOT not set"};
  fs::path root(env);
  if (fs::exists(root / "leather")) root /= "leather";
  if (!fs::exists(root / "test")) return {Verdict::Skip, root.string() + " has no leather test split"};
  const auto t0 = Clock::now();
  DetectorConfig pca;
  const EvalReport a = evaluate_dataset(root.string(), pca);
  DetectorConfig gabor;
  gabor.variant = Variant::Gabor;
  const EvalReport b = evaluate_dataset(root.string(), gabor);
  const bool ok = std::abs(a.roc_auc - 0.98) <= 0.03 && std::abs(b.roc_auc - 0.95) <= 0.03 &&
                  std::abs(a.gap - 2.25) <= 0.5;
  return verdict(ok, "PCA AUROC " + fmt(a.roc_auc) + " (0.98+-0.03), Gabor AUROC " + fmt(b.roc_auc) +
                         " (0.95+-0.03), PCA gap " + fmt(a.gap) + " (2.25+-0.5), " + fmt(seconds_since(t0), 3) + " s");
}

int run_cli(const std::string& args) {
  const std::string cmd = "'" + std::string(ANODET_CLI_PATH) + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 8. Bit-identical detect outputs across runs and worker counts.
Outcome determinism() {
  testing_support::TempDir dir("acceptance_determinism");
  const DefectSpec d{DefectShape::Rectangle, DefectKind::Variance, 100, 120, 24, 24, 2.0, 45.0};
  save_gray_png(synth_anomaly(8, SynthSpec{}, d).first.channel(0), dir.file("in.png"), 0.0, 1.0);
  std::string detail;
  bool ok = true;
  const std::vector<std::string> runs = {"--seed 5", "--seed 5", "--seed 5 --jobs 4"};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const int code = run_cli("detect " + runs[i] + " " + dir.file("in.png") + " --out " + dir.file(std::to_string(i)));
    ok = ok && code == 0;
  }
  if (!ok) return {Verdict::Fail, "detect did not exit 0"};
  const std::string ref = testing_support::read_bytes(dir.file("0/as.pfm"));
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const bool same = testing_support::read_bytes(dir.file(std::to_string(i) + "/as.pfm")) == ref;
    ok = ok && same && !ref.empty();
    detail += "run " + std::to_string(i + 1) + " (" + runs[i] + ") " + (same ? "identical" : "differs") + "; ";
  }
  return verdict(ok, detail + std::to_string(ref.size()) + " bytes of as.pfm");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anodet acceptance criteria"};
  std::vector<int> only;
  app.add_option("--criterion", only, "run only these criteria (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "special-function oracle equivalence", special_functions},
      {2, "NFA calibration under exact H0", injected_calibration},
      {3, "full-pipeline false-alarm sanity", pipeline_false_alarms},
      {4, "chi2 model fit", chi2_fit},
      {5, "planted-anomaly localisation", planted_localisation},
      {6, "operating point near optimal", operating_point_quality},
      {7, "leather reproduction", leather_reproduction},
      {8, "determinism", determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("error: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Skip ? "SKIP" : "FAIL";
    std::printf("%s criterion %d (%s): %s\n", tag, c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.verdict == Verdict::Fail;
  }
  return failures == 0 ? 0 : 1;
}
