// Copyright 2026 The HSD Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsd {

// Violated ScheduleConfig / ModelConfig / ConfidencePolicy invariants.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad caller arguments (empty inputs, position overflow, mismatched lists).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed weight file or corpus line.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An attention read hit a KV cache entry that was never written.
class DecodingIntegrityError : public std::runtime_error {
 public:
  DecodingIntegrityError(int layer, std::size_t position)
      : std::runtime_error("KV cache miss at layer " + std::to_string(layer) +
                           ", position " + std::to_string(position)),
        layer_(layer),
        position_(position) {}

  int layer() const { return layer_; }
  std::size_t position() const { return position_; }

 private:
  int layer_;
  std::size_t position_;
};

}  // namespace hsd
