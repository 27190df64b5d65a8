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

#include "hsd/kv_cache.h"

#include <algorithm>
#include <string>

#include "hsd/errors.h"

namespace hsd {

KvCache::KvCache(const ModelConfig& config)
    : layers_(config.num_layers),
      capacity_(static_cast<std::size_t>(config.max_positions)),
      hidden_size_(config.hidden_size) {}

const KvCache::LayerStore& KvCache::layer_store(int layer) const {
  if (layer < 1 || layer > num_layers()) {
    throw ArgumentError("KV cache layer " + std::to_string(layer) +
                        " out of range");
  }
  return layers_[layer - 1];
}

void KvCache::store(int layer, std::size_t position, std::span<const float> key,
                    std::span<const float> value, KvOrigin origin) {
  layer_store(layer);
  if (position >= capacity_) {
    throw ArgumentError("KV cache position " + std::to_string(position) +
                        " exceeds capacity " + std::to_string(capacity_));
  }
  const auto width = static_cast<std::size_t>(hidden_size_);
  if (key.size() != width || value.size() != width) {
    throw ArgumentError("KV cache entry width mismatch");
  }
  if (origin == KvOrigin::kEmpty) {
    throw ArgumentError("cannot store an entry tagged empty");
  }
  LayerStore& s = layers_[layer - 1];
  if (s.origin.size() <= position) {
    s.origin.resize(position + 1, KvOrigin::kEmpty);
    s.keys.resize((position + 1) * width, 0.0f);
    s.values.resize((position + 1) * width, 0.0f);
  }
  std::copy(key.begin(), key.end(), s.keys.begin() + position * width);
  std::copy(value.begin(), value.end(), s.values.begin() + position * width);
  s.origin[position] = origin;
}

KvOrigin KvCache::origin(int layer, std::size_t position) const {
  const LayerStore& s = layer_store(layer);
  return position < s.origin.size() ? s.origin[position] : KvOrigin::kEmpty;
}

void KvCache::check_readable(int layer, std::size_t position) const {
  if (!valid(layer, position)) throw DecodingIntegrityError(layer, position);
}

std::span<const float> KvCache::key(int layer, std::size_t position) const {
  check_readable(layer, position);
  const auto width = static_cast<std::size_t>(hidden_size_);
  return std::span<const float>(layers_[layer - 1].keys).subspan(position * width,
                                                                 width);
}

std::span<const float> KvCache::value(int layer, std::size_t position) const {
  check_readable(layer, position);
  const auto width = static_cast<std::size_t>(hidden_size_);
  return std::span<const float>(layers_[layer - 1].values)
      .subspan(position * width, width);
}

std::size_t KvCache::count(KvOrigin origin) const {
  std::size_t n = 0;
  for (const LayerStore& s : layers_) {
    n += static_cast<std::size_t>(std::count(s.origin.begin(), s.origin.end(), origin));
  }
  return n;
}

}  // namespace hsd
