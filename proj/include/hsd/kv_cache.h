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
#include <cstdint>
#include <span>
#include <vector>

#include "hsd/model.h"

namespace hsd {

enum class KvOrigin : std::uint8_t { kEmpty, kComputed, kCopied };

// Per-(layer, position) key/value storage with validity tracking. Layers are
// 1-based. Reading an entry that was never written throws
// DecodingIntegrityError; nothing is ever zero-filled on a miss.
class KvCache {
 public:
  explicit KvCache(const ModelConfig& config);

  int num_layers() const { return static_cast<int>(layers_.size()); }
  std::size_t capacity() const { return capacity_; }
  int hidden_size() const { return hidden_size_; }

  void store(int layer, std::size_t position, std::span<const float> key,
             std::span<const float> value, KvOrigin origin);

  std::span<const float> key(int layer, std::size_t position) const;
  std::span<const float> value(int layer, std::size_t position) const;

  KvOrigin origin(int layer, std::size_t position) const;
  bool valid(int layer, std::size_t position) const {
    return origin(layer, position) != KvOrigin::kEmpty;
  }

  // Number of entries with the given origin, across all layers.
  std::size_t count(KvOrigin origin) const;

  bool operator==(const KvCache&) const = default;

 private:
  struct LayerStore {
    std::vector<float> keys;    // position-major, hidden_size per entry
    std::vector<float> values;
    std::vector<KvOrigin> origin;

    bool operator==(const LayerStore&) const = default;
  };

  const LayerStore& layer_store(int layer) const;
  void check_readable(int layer, std::size_t position) const;

  std::vector<LayerStore> layers_;
  std::size_t capacity_ = 0;
  int hidden_size_ = 0;
};

}  // namespace hsd
