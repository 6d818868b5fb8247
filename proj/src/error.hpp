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

#include <stdexcept>
#include <string>

namespace anodet {

enum class ErrorKind {
  InvalidArgument,   // bad parameter value (even kernel, p outside (0,1), ...)
  Domain,            // numeric argument outside the function's domain
  Size,              // image or map dimensions incompatible with the request
  Contract,          // caller broke a structural precondition
  NotFound,
  UnsupportedFormat,
  CorruptInput,
  Io,
  Format,            // malformed manifest or config text
  DegenerateInput,   // no texture: zero variance where statistics are needed
  Layout,            // dataset directory layout problem
  EmptyDataset,
  UndefinedMetric,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace anodet
