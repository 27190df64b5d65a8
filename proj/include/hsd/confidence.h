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

#include <span>

#include "hsd/schedule.h"

namespace hsd {

// Softmax-response early exit: a token leaves the stack at the first checked
// layer whose confidence reaches a threshold decaying linearly with depth.
struct ConfidencePolicy {
  double decay = 0.0;     // d
  double lambda0 = 0.9;   // threshold at layer 1
  LayerSet check_layers;  // must include the top layer

  // Throws ConfigError.
  void validate() const;

  int num_layers() const { return check_layers.num_layers(); }

  // Checks after every layer of an L-layer model.
  static ConfidencePolicy every_layer(int num_layers, double decay,
                                      double lambda0 = 0.9);
};

// Top-1 minus top-2 probability. Throws ArgumentError if the vector is not a
// distribution (entries in [0,1], sum within 1e-5 of one) or has fewer than
// two entries.
double softmax_response(std::span<const double> probabilities);

// max(0, lambda0 − d·(layer − 1))
double threshold(const ConfidencePolicy& policy, int layer);

// score ≥ threshold(layer); the top layer always exits.
bool should_exit(const ConfidencePolicy& policy, int layer, double score);

}  // namespace hsd
