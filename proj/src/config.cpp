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

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "error.hpp"

namespace anodet {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  fail(ErrorKind::InvalidArgument, "invalid value '" + value + "' for " + key);
}

long long to_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size()) bad_value(key, value);
  return v;
}

double to_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size() || !std::isfinite(v)) bad_value(key, value);
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value);
}

std::string fmt_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string normalize(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "variant",        "nfa",              "scales",              "seed",
      "jobs",           "threshold_as",     "debug_dir",           "patch_pca.m",
      "patch_pca.patch_size", "gabor.sizes", "gabor.orientations", "gabor.wavelengths",
      "gabor.odd_phase", "gabor.decorrelate", "block.size",         "block.stride",
      "block.p_value",  "block.subsampling", "external.variance_fraction",
      "multilight.enabled", "multilight.keep_last",
  };
  return keys;
}

}  // namespace

const char* to_string(Variant v) {
  switch (v) {
    case Variant::PatchPca: return "patch_pca";
    case Variant::Gabor: return "gabor";
    case Variant::External: return "external";
  }
  return "?";
}

const char* to_string(NfaMode m) { return m == NfaMode::Pixel ? "pixel" : "block"; }

Variant parse_variant(const std::string& s) {
  const std::string n = normalize(s);
  if (n == "patch_pca" || n == "pca") return Variant::PatchPca;
  if (n == "gabor") return Variant::Gabor;
  if (n == "external") return Variant::External;
  bad_value("variant", s);
}

NfaMode parse_nfa_mode(const std::string& s) {
  const std::string n = normalize(s);
  if (n == "pixel") return NfaMode::Pixel;
  if (n == "block") return NfaMode::Block;
  bad_value("nfa", s);
}

int DetectorConfig::max_kernel_side() const {
  if (variant == Variant::Gabor) return *std::max_element(gabor.sizes.begin(), gabor.sizes.end());
  if (variant == Variant::PatchPca) return patch_size;
  return 1;
}

void DetectorConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::InvalidArgument, what); };
  if (scales < 1) bad("scales must be >= 1");
  if (patch_size < 1 || patch_size % 2 == 0) bad("patch size must be odd");
  if (components.variance_fraction > 0.0) {
    if (components.variance_fraction > 1.0) bad("component fraction must be in (0, 1]");
  } else if (components.count < 1 || components.count > patch_size * patch_size) {
    bad("component count must be in [1, patch_size^2]");
  }
  if (gabor.sizes.empty()) bad("gabor sizes must not be empty");
  for (int s : gabor.sizes) {
    if (s < 3 || s % 2 == 0) bad("gabor sizes must be odd and >= 3");
  }
  if (gabor.orientations < 1 || gabor.wavelengths < 1) bad("gabor orientations and wavelengths must be >= 1");
  if (block.size < 1) bad("block size must be >= 1");
  if (block.stride < 1) bad("block stride must be >= 1");
  if (!(block.p_value > 0.0 && block.p_value < 1.0)) bad("block p-value must be in (0, 1)");
  if (block.subsampling < 0) bad("block subsampling must be >= 0");
  if (!(external_variance_fraction > 0.0 && external_variance_fraction <= 1.0)) {
    bad("external variance fraction must be in (0, 1]");
  }
  if (multilight.keep_last < 1) bad("keep_last must be >= 1");
  if (jobs < 1) bad("jobs must be >= 1");
}

void set_config_value(DetectorConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = normalize(trim(raw_key));
  const std::string value = trim(raw_value);
  if (key == "variant") {
    cfg.variant = parse_variant(value);
  } else if (key == "nfa") {
    cfg.nfa = parse_nfa_mode(value);
  } else if (key == "scales") {
    cfg.scales = static_cast<int>(to_int(key, value));
  } else if (key == "seed") {
    const long long v = to_int(key, value);
    if (v < 0) bad_value(key, value);
    cfg.seed = static_cast<std::uint64_t>(v);
  } else if (key == "jobs") {
    cfg.jobs = static_cast<int>(to_int(key, value));
  } else if (key == "threshold_as") {
    cfg.threshold_as = to_real(key, value);
  } else if (key == "debug_dir") {
    cfg.debug_dir = value;
  } else if (key == "patch_pca.m" || key == "m") {
    const double v = to_real(key, value);
    if (v > 0.0 && v < 1.0) {
      cfg.components = ComponentSpec::fraction(v);
    } else if (v >= 1.0 && v == std::floor(v)) {
      cfg.components = ComponentSpec::fixed(static_cast<int>(v));
    } else {
      bad_value(key, value);
    }
  } else if (key == "patch_pca.patch_size" || key == "patch_size") {
    cfg.patch_size = static_cast<int>(to_int(key, value));
  } else if (key == "gabor.sizes") {
    std::vector<int> sizes;
    std::stringstream ss(value);
    for (std::string item; std::getline(ss, item, ',');) {
      item = trim(item);
      if (!item.empty()) sizes.push_back(static_cast<int>(to_int(key, item)));
    }
    if (sizes.empty()) bad_value(key, value);
    cfg.gabor.sizes = sizes;
  } else if (key == "gabor.orientations") {
    cfg.gabor.orientations = static_cast<int>(to_int(key, value));
  } else if (key == "gabor.wavelengths") {
    cfg.gabor.wavelengths = static_cast<int>(to_int(key, value));
  } else if (key == "gabor.odd_phase") {
    cfg.gabor.odd_phase = to_bool(key, value);
  } else if (key == "gabor.decorrelate") {
    cfg.gabor_decorrelate = to_bool(key, value);
  } else if (key == "block.size") {
    cfg.block.size = static_cast<int>(to_int(key, value));
  } else if (key == "block.stride") {
    cfg.block.stride = static_cast<int>(to_int(key, value));
  } else if (key == "block.p_value") {
    cfg.block.p_value = to_real(key, value);
  } else if (key == "block.subsampling") {
    cfg.block.subsampling = static_cast<int>(to_int(key, value));
  } else if (key == "external.variance_fraction") {
    cfg.external_variance_fraction = to_real(key, value);
  } else if (key == "multilight.enabled") {
    cfg.multilight.enabled = to_bool(key, value);
  } else if (key == "multilight.keep_last") {
    cfg.multilight.keep_last = static_cast<int>(to_int(key, value));
  } else {
    fail(ErrorKind::InvalidArgument, "unknown configuration key: " + raw_key);
  }
}

std::string get_config_value(const DetectorConfig& cfg, const std::string& raw_key) {
  const std::string key = normalize(trim(raw_key));
  if (key == "variant") return to_string(cfg.variant);
  if (key == "nfa") return to_string(cfg.nfa);
  if (key == "scales") return std::to_string(cfg.scales);
  if (key == "seed") return std::to_string(cfg.seed);
  if (key == "jobs") return std::to_string(cfg.jobs);
  if (key == "threshold_as") return fmt_real(cfg.threshold_as);
  if (key == "debug_dir") return cfg.debug_dir;
  if (key == "patch_pca.m" || key == "m") {
    return cfg.components.variance_fraction > 0.0 ? fmt_real(cfg.components.variance_fraction)
                                                  : std::to_string(cfg.components.count);
  }
  if (key == "patch_pca.patch_size" || key == "patch_size") return std::to_string(cfg.patch_size);
  if (key == "gabor.sizes") {
    std::string out;
    for (std::size_t i = 0; i < cfg.gabor.sizes.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(cfg.gabor.sizes[i]);
    }
    return out;
  }
  if (key == "gabor.orientations") return std::to_string(cfg.gabor.orientations);
  if (key == "gabor.wavelengths") return std::to_string(cfg.gabor.wavelengths);
  if (key == "gabor.odd_phase") return cfg.gabor.odd_phase ? "true" : "false";
  if (key == "gabor.decorrelate") return cfg.gabor_decorrelate ? "true" : "false";
  if (key == "block.size") return std::to_string(cfg.block.size);
  if (key == "block.stride") return std::to_string(cfg.block.stride);
  if (key == "block.p_value") return fmt_real(cfg.block.p_value);
  if (key == "block.subsampling") return std::to_string(cfg.block.subsampling);
  if (key == "external.variance_fraction") return fmt_real(cfg.external_variance_fraction);
  if (key == "multilight.enabled") return cfg.multilight.enabled ? "true" : "false";
  if (key == "multilight.keep_last") return std::to_string(cfg.multilight.keep_last);
  fail(ErrorKind::InvalidArgument, "unknown configuration key: " + raw_key);
}

void apply_config_text(DetectorConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string section;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::Format, "bad section header on line " + std::to_string(lineno));
      section = normalize(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Format, "expected key = value on line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    if (!section.empty() && section != "general" && key.find('.') == std::string::npos) key = section + "." + key;
    set_config_value(cfg, key, line.substr(eq + 1));
  }
}

void apply_config_file(DetectorConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::NotFound, "cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

std::string to_config_text(const DetectorConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const std::string& key : known_keys()) {
    const auto dot = key.find('.');
    const std::string sec = dot == std::string::npos ? "general" : key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) os << '\n';
      os << '[' << sec << "]\n";
      section = sec;
    }
    os << (dot == std::string::npos ? key : key.substr(dot + 1)) << " = " << get_config_value(cfg, key) << '\n';
  }
  return os.str();
}

}  // namespace anodet
