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

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "anodet/anodet.h"

namespace {

namespace fs = std::filesystem;

enum Exit { kOk = 0, kUsage = 1, kDegenerate = 2 };

struct Failure {
  anodet_status status;
};

void check(anodet_status st) {
  if (st != ANODET_OK) throw Failure{st};
}

int exit_code(anodet_status st) { return st == ANODET_ERR_DEGENERATE_INPUT ? kDegenerate : kUsage; }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ImagePtr = std::unique_ptr<anodet_image, Deleter<anodet_image, anodet_image_free>>;
using ConfigPtr = std::unique_ptr<anodet_config, Deleter<anodet_config, anodet_config_free>>;
using ResultPtr = std::unique_ptr<anodet_result, Deleter<anodet_result, anodet_result_free>>;

ImagePtr load(const std::string& path) {
  anodet_image* img = nullptr;
  check(anodet_image_load(path.c_str(), &img));
  return ImagePtr(img);
}

/// Detector flags shared by every subcommand. Values stay strings so the
/// library does the parsing and only flags actually given override the
/// config file.
class ConfigFlags {
 public:
  void attach(CLI::App* app) {
    add(app, "--variant", "variant", "patch_pca | gabor | external");
    add(app, "--nfa", "nfa", "pixel | block");
    add(app, "--m", "patch_pca.m", "Patch-PCA components; a value below 1 is a variance fraction");
    add(app, "--patch-size", "patch_pca.patch_size", "Patch-PCA patch side (odd)");
    add(app, "--scales", "scales", "number of pyramid levels");
    add(app, "--block-size", "block.size", "block NFA block side");
    add(app, "--stride", "block.stride", "block NFA stride");
    add(app, "--p-value", "block.p_value", "block NFA candidate p-value");
    add(app, "--subsampling", "block.subsampling", "block NFA sub-grid step (0: largest kernel side)");
    add(app, "--keep-last", "multilight.keep_last", "multi-light components kept");
    add(app, "--threshold-as", "threshold_as", "anomaly-score threshold of the mask");
    add(app, "--seed", "seed", "random seed");
    add(app, "--jobs", "jobs", "worker threads");
    add(app, "--debug-dir", "debug_dir", "directory for per-scale NFA maps");
    app->add_flag("--multilight", multilight_, "treat the inputs as one scene under several lights");
    app->add_option("--config", config_file_, "config file (default: $ANODET_CONFIG)");
    app->add_option("--set", extra_, "extra key=value settings")->take_all();
  }

  ConfigPtr build() const {
    anodet_config* raw = nullptr;
    check(anodet_config_create(&raw));
    ConfigPtr cfg(raw);
    std::string file = config_file_;
    if (file.empty()) {
      if (const char* env = std::getenv("ANODET_CONFIG")) file = env;
    }
    if (!file.empty()) check(anodet_config_load_file(cfg.get(), file.c_str()));
    for (const auto& f : flags_) {
      if (f.option->count() > 0) check(anodet_config_set(cfg.get(), f.key.c_str(), f.value->c_str()));
    }
    if (multilight_) check(anodet_config_set(cfg.get(), "multilight.enabled", "true"));
    for (const auto& kv : extra_) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got " + kv);
      check(anodet_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    check(anodet_config_validate(cfg.get()));
    return cfg;
  }

  bool multilight() const { return multilight_; }

 private:
  struct Flag {
    std::string key;
    std::unique_ptr<std::string> value;
    CLI::Option* option;
  };

  void add(CLI::App* app, const std::string& name, const std::string& key, const std::string& help) {
    auto value = std::make_unique<std::string>();
    CLI::Option* opt = app->add_option(name, *value, help);
    flags_.push_back({key, std::move(value), opt});
  }

  std::vector<Flag> flags_;
  std::string config_file_;
  std::vector<std::string> extra_;
  bool multilight_ = false;
};

std::string get(const anodet_config* cfg, const char* key) {
  size_t needed = 0;
  check(anodet_config_get(cfg, key, nullptr, 0, &needed));
  std::string out(needed, '\0');
  check(anodet_config_get(cfg, key, out.data(), out.size(), nullptr));
  out.resize(needed - 1);
  return out;
}

std::string command_line(int argc, char** argv) {
  std::string s = "command:";
  for (int i = 0; i < argc; ++i) s += std::string(" ") + argv[i];
  return std::string("anodet ") + anodet_version() + "\n" + s;
}

void report(const std::string& name, const anodet_result* res) {
  int h = 0;
  int w = 0;
  check(anodet_result_shape(res, &h, &w));
  const double* as = anodet_result_scores(res);
  const uint8_t* mask = anodet_result_mask(res);
  const size_t n = static_cast<size_t>(h) * w;
  const double max_as = *std::max_element(as, as + n);
  const size_t flagged = static_cast<size_t>(std::count(mask, mask + n, uint8_t{1}));
  anodet_diagnostics d{};
  check(anodet_result_diagnostics(res, &d));
  std::printf("%s: %dx%d, scales %d/%d, dof %d, max AS %.4f, %zu pixels flagged\n", name.c_str(), h, w,
              d.used_scales, d.requested_scales, d.finest_dof, max_as, flagged);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anodet: a-contrario multi-scale image anomaly detection"};
  app.set_version_flag("--version", std::string(anodet_version()));
  app.require_subcommand(1);

  // detect
  CLI::App* detect = app.add_subcommand("detect", "score one image (or one multi-light set)");
  ConfigFlags detect_flags;
  detect_flags.attach(detect);
  std::vector<std::string> inputs;
  std::string out_dir;
  std::string features_dir;
  detect->add_option("inputs", inputs, "input images (PNG, PGM/PPM or PFM)");
  detect->add_option("--out", out_dir, "output directory")->required();
  detect->add_option("--features", features_dir, "external feature directory (variant external)");

  // evaluate
  CLI::App* evaluate = app.add_subcommand("evaluate", "pixel-level metrics on a labelled dataset");
  ConfigFlags eval_flags;
  eval_flags.attach(evaluate);
  std::string dataset;
  std::string eval_out;
  evaluate->add_option("dataset", dataset, "root with test/ and ground_truth/")->required();
  evaluate->add_option("--out", eval_out, "report directory");

  // calibrate
  CLI::App* calibrate = app.add_subcommand("calibrate", "false-alarm counts on pure noise");
  ConfigFlags cal_flags;
  cal_flags.attach(calibrate);
  int trials = 500;
  int size = 128;
  std::string mode = "injected";
  std::string cal_out = "calibration.csv";
  calibrate->add_option("--trials", trials, "number of noise trials")->check(CLI::Range(50, 1000000));
  calibrate->add_option("--size", size, "side of each noise image")->check(CLI::PositiveNumber);
  calibrate->add_option("--mode", mode, "injected | pipeline")->check(CLI::IsMember({"injected", "pipeline"}));
  calibrate->add_option("--out", cal_out, "CSV path");

  // filters
  CLI::App* filters = app.add_subcommand("filters", "dump the filter bank as PFM files and a montage");
  ConfigFlags filter_flags;
  filter_flags.attach(filters);
  std::string filter_image;
  std::string filter_out;
  bool self_check = false;
  filters->add_option("image", filter_image, "image to learn Patch-PCA filters from");
  filters->add_option("--out", filter_out, "output directory")->required();
  filters->add_flag("--self-check", self_check, "verify kernel orthonormality");

  // synth
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic labelled dataset");
  std::string synth_root;
  int per_type = 8;
  std::uint64_t synth_seed = 0;
  synth->add_option("root", synth_root, "dataset root")->required();
  synth->add_option("--per-type", per_type, "images per defect type")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*detect) {
      ConfigPtr cfg = detect_flags.build();
      const std::string variant = get(cfg.get(), "variant");
      const std::string header = command_line(argc, argv);
      anodet_result* raw = nullptr;
      std::string name;
      if (variant == "external") {
        if (features_dir.empty()) throw CLI::ValidationError("--features", "required for variant external");
        check(anodet_detect_external(features_dir.c_str(), cfg.get(), &raw));
        name = features_dir;
      } else {
        if (inputs.empty()) throw CLI::ValidationError("inputs", "at least one input image is required");
        if (detect_flags.multilight()) {
          std::vector<ImagePtr> shots;
          std::vector<const anodet_image*> views;
          for (const auto& p : inputs) {
            shots.push_back(load(p));
            views.push_back(shots.back().get());
          }
          check(anodet_detect_multilight(views.data(), views.size(), cfg.get(), &raw));
          name = inputs.front() + " (+" + std::to_string(inputs.size() - 1) + " lights)";
        } else {
          if (inputs.size() != 1) throw CLI::ValidationError("inputs", "give one image, or --multilight");
          ImagePtr img = load(inputs.front());
          check(anodet_detect(img.get(), cfg.get(), &raw));
          name = inputs.front();
        }
      }
      ResultPtr res(raw);
      check(anodet_result_write(res.get(), out_dir.c_str(), header.c_str()));
      report(name, res.get());
    } else if (*evaluate) {
      ConfigPtr cfg = eval_flags.build();
      anodet_eval_summary s{};
      check(anodet_evaluate(dataset.c_str(), cfg.get(), eval_out.empty() ? nullptr : eval_out.c_str(), &s));
      std::printf("images: %d\n", s.images);
      std::printf("pixel AUROC (pooled): %.4f\n", s.roc_auc);
      std::printf("pixel AUROC (mean per image): %.4f\n", s.roc_auc_per_image_mean);
      std::printf("AS gap (median anomalous - median normal): %.4f\n", s.gap);
      std::printf("Youden index at threshold: %.4f (max %.4f)\n", s.youden_at_threshold, s.youden_max);
    } else if (*calibrate) {
      ConfigPtr cfg = cal_flags.build();
      const std::uint64_t seed = std::stoull(get(cfg.get(), "seed"));
      const auto m = mode == "pipeline" ? ANODET_CALIBRATE_PIPELINE : ANODET_CALIBRATE_INJECTED;
      check(anodet_calibrate(cfg.get(), trials, seed, m, size, cal_out.c_str()));
      std::printf("wrote %s\n", cal_out.c_str());
    } else if (*filters) {
      ConfigPtr cfg = filter_flags.build();
      ImagePtr img;
      if (!filter_image.empty()) img = load(filter_image);
      anodet_filter_summary s{};
      check(anodet_dump_filters(cfg.get(), img.get(), filter_out.c_str(), &s));
      std::printf("wrote %d kernels to %s\n", s.kernels, filter_out.c_str());
      if (self_check) {
        const bool gabor = get(cfg.get(), "variant") == "gabor";
        const bool ok = s.max_gram_error <= 1e-9;
        std::printf("self-check (%s): max deviation %.3g -> %s\n", gabor ? "unit norms" : "orthonormality",
                    s.max_gram_error, ok ? "ok" : "FAILED");
        if (!ok) return kUsage;
      }
    } else if (*synth) {
      int written = 0;
      check(anodet_write_synthetic_dataset(synth_root.c_str(), per_type, synth_seed, &written));
      std::printf("wrote %d images under %s\n", written, synth_root.c_str());
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error (%s): %s\n", anodet_status_name(f.status), anodet_last_error());
    return exit_code(f.status);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kOk;
}
