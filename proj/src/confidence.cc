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

#include "hsd/confidence.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsd/errors.h"

namespace hsd {

void ConfidencePolicy::validate() const {
  if (!(decay >= 0.0) || !std::isfinite(decay)) {
    throw ConfigError("confidence decay d must be a finite value >= 0");
  }
  // lambda0 above one is accepted: it disables exits below the top layer.
  if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) {
    throw ConfigError("confidence lambda0 must be a finite value >= 0");
  }
  if (check_layers.empty()) throw ConfigError("check_layers must not be empty");
  if (!check_layers.contains(check_layers.num_layers())) {
    throw ConfigError("check_layers must include the top layer");
  }
}

ConfidencePolicy ConfidencePolicy::every_layer(int num_layers, double decay,
                                               double lambda0) {
  if (num_layers < 1) throw ConfigError("num_layers must be >= 1");
  ConfidencePolicy policy{decay, lambda0, LayerSet::all(num_layers)};
  policy.validate();
  return policy;
}

double softmax_response(std::span<const double> probabilities) {
  if (probabilities.size() < 2) {
    throw ArgumentError("softmax_response needs at least two probabilities");
  }
  double total = 0.0;
  double first = -1.0;
  double second = -1.0;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ArgumentError("probability outside [0, 1]");
    }
    total += p;
    if (p > first) {
      second = first;
      first = p;
    } else if (p > second) {
      second = p;
    }
  }
  if (std::abs(total - 1.0) > 1e-5) {
    throw ArgumentError("probabilities sum to " + std::to_string(total) +
                        ", not 1");
  }
  return first - second;
}

double threshold(const ConfidencePolicy& policy, int layer) {
  return std::max(0.0, policy.lambda0 - policy.decay * (layer - 1));
}

bool should_exit(const ConfidencePolicy& policy, int layer, double score) {
  if (layer >= policy.num_layers()) return true;
  return score >= threshold(policy, layer);
}

}  // namespace hsd
