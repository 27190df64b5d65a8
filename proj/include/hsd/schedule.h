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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsd {

enum class PolicyKind { kFull, kHierarchical, kSkipDecode, kHsd };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);

// Per-token depth decision for position-scheduled policies.
//
// `stride` is the number of layers skipped between two kept layers of the
// hierarchical set; `min_exit`/`max_exit` bound the descending top-layer
// budget, which reaches `min_exit` at generated position `max_length`.
struct ScheduleConfig {
  PolicyKind kind = PolicyKind::kFull;
  int stride = 0;
  int min_exit = 0;
  int max_exit = 0;
  int max_length = 1;
  int num_layers = 1;

  // Throws ConfigError.
  void validate() const;

  static ScheduleConfig full(int num_layers);
  static ScheduleConfig hierarchical(int num_layers, int stride);
  static ScheduleConfig skip_decode(int num_layers, int min_exit, int max_exit,
                                    int max_length);
  static ScheduleConfig hsd(int num_layers, int stride, int min_exit,
                            int max_exit, int max_length);

  bool operator==(const ScheduleConfig&) const = default;
};

// Strictly increasing 1-based layer indices within [1, num_layers].
class LayerSet {
 public:
  LayerSet() = default;

  // Throws ArgumentError unless `indices` is strictly increasing and inside
  // [1, num_layers].
  LayerSet(std::vector<int> indices, int num_layers);

  static LayerSet all(int num_layers);
  static LayerSet range(int first, int last, int num_layers);

  bool contains(int layer) const;
  bool empty() const { return indices_.empty(); }
  std::size_t size() const { return indices_.size(); }
  int num_layers() const { return num_layers_; }

  bool is_subset_of(const LayerSet& other) const;
  LayerSet united(const LayerSet& other) const;

  const std::vector<int>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  // Compact form, e.g. "2,4,6,29-36".
  std::string to_string() const;

  bool operator==(const LayerSet& other) const {
    return indices_ == other.indices_;
  }

 private:
  std::vector<int> indices_;
  int num_layers_ = 0;
};

// floor((t'·min_exit + (max_length − t')·max_exit) / max_length) with
// t' = min(t, max_length).
int budget(const ScheduleConfig& cfg, std::size_t t);

// {i | 1 ≤ i ≤ L, i mod (stride + 1) = 0}
LayerSet hierarchical_set(const ScheduleConfig& cfg);

// The top budget(t) layers, {i | L − budget(t) < i ≤ L}.
LayerSet top_set(const ScheduleConfig& cfg, std::size_t t);

// Layers executed by the token at generated position t under cfg.kind.
// HSD is the union of the hierarchical set and the top set.
LayerSet executed_set(const ScheduleConfig& cfg, std::size_t t);

// Mean of |executed_set(cfg, t)| over every (sequence, position) pair, where
// a sequence of length n contributes positions 0..n-1.
double expected_avg_layers(const ScheduleConfig& cfg,
                           std::span<const std::size_t> lengths);

}  // namespace hsd
