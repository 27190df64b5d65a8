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

#include "hsd/schedule.h"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <sstream>

#include "hsd/errors.h"

namespace hsd {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kFull:
      return "full";
    case PolicyKind::kHierarchical:
      return "hier";
    case PolicyKind::kSkipDecode:
      return "skipdecode";
    case PolicyKind::kHsd:
      return "hsd";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "full") return PolicyKind::kFull;
  if (name == "hier" || name == "hierarchical") return PolicyKind::kHierarchical;
  if (name == "skipdecode") return PolicyKind::kSkipDecode;
  if (name == "hsd") return PolicyKind::kHsd;
  throw ConfigError("unknown schedule policy '" + std::string(name) + "'");
}

void ScheduleConfig::validate() const {
  auto fail = [this](const std::string& what) {
    throw ConfigError("invalid " + std::string(to_string(kind)) +
                      " schedule: " + what);
  };
  if (num_layers < 1) fail("num_layers must be >= 1");
  if (max_length < 1) fail("t_max must be >= 1");
  if (stride < 0) fail("s must be >= 0");
  if (min_exit < 0) fail("e_min must be >= 0");
  if (min_exit > max_exit) fail("e_min must not exceed e_max");
  if (max_exit > num_layers) fail("e_max must not exceed num_layers");
  if ((kind == PolicyKind::kHierarchical || kind == PolicyKind::kHsd) &&
      stride + 1 > num_layers) {
    fail("s+1 must not exceed num_layers (empty hierarchical set)");
  }
}

ScheduleConfig ScheduleConfig::full(int num_layers) {
  ScheduleConfig cfg;
  cfg.kind = PolicyKind::kFull;
  cfg.num_layers = num_layers;
  cfg.validate();
  return cfg;
}

ScheduleConfig ScheduleConfig::hierarchical(int num_layers, int stride) {
  ScheduleConfig cfg;
  cfg.kind = PolicyKind::kHierarchical;
  cfg.num_layers = num_layers;
  cfg.stride = stride;
  cfg.validate();
  return cfg;
}

ScheduleConfig ScheduleConfig::skip_decode(int num_layers, int min_exit,
                                           int max_exit, int max_length) {
  ScheduleConfig cfg;
  cfg.kind = PolicyKind::kSkipDecode;
  cfg.num_layers = num_layers;
  cfg.min_exit = min_exit;
  cfg.max_exit = max_exit;
  cfg.max_length = max_length;
  cfg.validate();
  return cfg;
}

ScheduleConfig ScheduleConfig::hsd(int num_layers, int stride, int min_exit,
                                   int max_exit, int max_length) {
  ScheduleConfig cfg;
  cfg.kind = PolicyKind::kHsd;
  cfg.num_layers = num_layers;
  cfg.stride = stride;
  cfg.min_exit = min_exit;
  cfg.max_exit = max_exit;
  cfg.max_length = max_length;
  cfg.validate();
  return cfg;
}

LayerSet::LayerSet(std::vector<int> indices, int num_layers)
    : indices_(std::move(indices)), num_layers_(num_layers) {
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    const int layer = indices_[k];
    if (layer < 1 || layer > num_layers_) {
      throw ArgumentError("layer index " + std::to_string(layer) +
                          " outside [1, " + std::to_string(num_layers_) + "]");
    }
    if (k > 0 && indices_[k - 1] >= layer) {
      throw ArgumentError("layer indices must be strictly increasing");
    }
  }
}

LayerSet LayerSet::all(int num_layers) { return range(1, num_layers, num_layers); }

LayerSet LayerSet::range(int first, int last, int num_layers) {
  std::vector<int> indices;
  for (int i = first; i <= last; ++i) indices.push_back(i);
  return LayerSet(std::move(indices), num_layers);
}

bool LayerSet::contains(int layer) const {
  return std::binary_search(indices_.begin(), indices_.end(), layer);
}

bool LayerSet::is_subset_of(const LayerSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(),
                       indices_.begin(), indices_.end());
}

LayerSet LayerSet::united(const LayerSet& other) const {
  std::vector<int> merged;
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                 other.indices_.end(), std::back_inserter(merged));
  return LayerSet(std::move(merged), std::max(num_layers_, other.num_layers_));
}

std::string LayerSet::to_string() const {
  std::ostringstream out;
  std::size_t k = 0;
  bool first = true;
  while (k < indices_.size()) {
    std::size_t run_end = k;
    while (run_end + 1 < indices_.size() &&
           indices_[run_end + 1] == indices_[run_end] + 1) {
      ++run_end;
    }
    if (!first) out << ',';
    first = false;
    if (run_end - k >= 2) {
      out << indices_[k] << '-' << indices_[run_end];
      k = run_end + 1;
    } else {
      out << indices_[k];
      ++k;
    }
  }
  return out.str();
}

int budget(const ScheduleConfig& cfg, std::size_t t) {
  cfg.validate();
  const std::int64_t horizon = cfg.max_length;
  const std::int64_t clamped =
      t >= static_cast<std::size_t>(horizon) ? horizon
                                             : static_cast<std::int64_t>(t);
  const std::int64_t numerator =
      clamped * cfg.min_exit + (horizon - clamped) * cfg.max_exit;
  // Both operands are non-negative, so integer division is floor.
  return static_cast<int>(numerator / horizon);
}

LayerSet hierarchical_set(const ScheduleConfig& cfg) {
  cfg.validate();
  if (cfg.stride + 1 > cfg.num_layers) {
    throw ConfigError("s+1 must not exceed num_layers (empty hierarchical set)");
  }
  std::vector<int> indices;
  const int period = cfg.stride + 1;
  for (int i = period; i <= cfg.num_layers; i += period) indices.push_back(i);
  return LayerSet(std::move(indices), cfg.num_layers);
}

LayerSet top_set(const ScheduleConfig& cfg, std::size_t t) {
  const int b = budget(cfg, t);
  return LayerSet::range(cfg.num_layers - b + 1, cfg.num_layers,
                         cfg.num_layers);
}

LayerSet executed_set(const ScheduleConfig& cfg, std::size_t t) {
  cfg.validate();
  switch (cfg.kind) {
    case PolicyKind::kFull:
      return LayerSet::all(cfg.num_layers);
    case PolicyKind::kHierarchical:
      return hierarchical_set(cfg);
    case PolicyKind::kSkipDecode:
      return top_set(cfg, t);
    case PolicyKind::kHsd:
      return hierarchical_set(cfg).united(top_set(cfg, t));
  }
  throw ConfigError("unhandled policy kind");
}

double expected_avg_layers(const ScheduleConfig& cfg,
                           std::span<const std::size_t> lengths) {
  if (lengths.empty()) {
    throw ArgumentError("expected_avg_layers needs at least one length");
  }
  cfg.validate();
  std::size_t longest = 0;
  for (std::size_t n : lengths) {
    if (n < 1) throw ArgumentError("sequence lengths must be >= 1");
    longest = std::max(longest, n);
  }
  // counts[t] = |executed_set(t)|; prefix sums let each sequence add in O(1).
  std::vector<std::uint64_t> prefix(longest + 1, 0);
  for (std::size_t t = 0; t < longest; ++t) {
    prefix[t + 1] = prefix[t] + executed_set(cfg, t).size();
  }
  std::uint64_t layers = 0;
  std::uint64_t positions = 0;
  for (std::size_t n : lengths) {
    layers += prefix[n];
    positions += n;
  }
  return static_cast<double>(layers) / static_cast<double>(positions);
}

}  // namespace hsd
