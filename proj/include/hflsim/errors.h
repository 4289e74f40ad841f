// Copyright 2026 The hflsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HFLSIM_ERRORS_H_
#define HFLSIM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace hflsim {

// Bad configuration, dimension mismatch, malformed input file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Fixed-point value left the representable range mid-protocol.
class SaturationError : public std::runtime_error {
 public:
  explicit SaturationError(const std::string& what)
      : std::runtime_error(what) {}
};

// Training produced a non-finite or exploding quantity.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace hflsim

#endif  // HFLSIM_ERRORS_H_
