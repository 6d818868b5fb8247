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

#include "error.hpp"

namespace anodet {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Size: return "size error";
    case ErrorKind::Contract: return "contract violation";
    case ErrorKind::NotFound: return "not found";
    case ErrorKind::UnsupportedFormat: return "unsupported format";
    case ErrorKind::CorruptInput: return "corrupt input";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::DegenerateInput: return "degenerate input";
    case ErrorKind::Layout: return "layout error";
    case ErrorKind::EmptyDataset: return "empty dataset";
    case ErrorKind::UndefinedMetric: return "undefined metric";
  }
  return "unknown error";
}

}  // namespace anodet
