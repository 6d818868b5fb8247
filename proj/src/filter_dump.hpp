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

#include <string>
#include <vector>

#include "features.hpp"

namespace anodet {

/// Largest |<k_i, k_j> - [i == j]| over pairs of equal-sized kernels. With
/// `orthogonal` false only the diagonal (unit norms) is checked.
double gram_error(const FilterBank& bank, bool orthogonal);

/// Writes `<prefix>kernel_<NNN>.pfm` per kernel and `<prefix>montage.png`,
/// each kernel scaled so 0 is mid-gray and max |k| spans the range.
void write_filter_bank(const FilterBank& bank, const std::string& out_dir, const std::string& prefix = {});

}  // namespace anodet
