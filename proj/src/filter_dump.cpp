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

#include "filter_dump.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "error.hpp"
#include "image_io.hpp"

namespace anodet {

double gram_error(const FilterBank& bank, bool orthogonal) {
  double worst = 0.0;
  for (int i = 0; i < bank.size(); ++i) {
    const Map& a = bank.kernels[i];
    for (int j = orthogonal ? 0 : i; j < (orthogonal ? bank.size() : i + 1); ++j) {
      const Map& b = bank.kernels[j];
      if (!a.same_shape(b)) continue;
      double dot = 0.0;
      for (std::size_t p = 0; p < a.size(); ++p) dot += a.data[p] * b.data[p];
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

void write_filter_bank(const FilterBank& bank, const std::string& out_dir, const std::string& prefix) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + out_dir);
  const int n = bank.size();
  if (n == 0) fail(ErrorKind::InvalidArgument, "empty filter bank");

  for (int i = 0; i < n; ++i) {
    std::ostringstream name;
    name << prefix << "kernel_" << std::setw(3) << std::setfill('0') << i << ".pfm";
    save_float_map(bank.kernels[i], (fs::path(out_dir) / name.str()).string());
  }

  const int cell = bank.max_side() + 2;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  Map montage(rows * cell, cols * cell, 0.0);
  for (int i = 0; i < n; ++i) {
    const Map& k = bank.kernels[i];
    double peak = 0.0;
    for (double v : k.data) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) peak = 1.0;
    const int oy = (i / cols) * cell + 1 + (cell - 2 - k.height) / 2;
    const int ox = (i % cols) * cell + 1 + (cell - 2 - k.width) / 2;
    for (int y = 0; y < k.height; ++y) {
      for (int x = 0; x < k.width; ++x) montage.at(oy + y, ox + x) = 0.5 + 0.5 * k.at(y, x) / peak;
    }
  }
  save_gray_png(montage, (fs::path(out_dir) / (prefix + "montage.png")).string(), 0.0, 1.0);
}

}  // namespace anodet
