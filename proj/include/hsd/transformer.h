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
#include <vector>

#include "hsd/kv_cache.h"
#include "hsd/model.h"
#include "hsd/schedule.h"

namespace hsd {

// Residual stream of one token at one layer boundary (hidden_size floats).
using HiddenState = std::vector<float>;

// Token embedding + position embedding.
HiddenState embed(const ModelBundle& bundle, int token_id, std::size_t position);

// Runs block `layer` (1-based) on `hidden` in place and writes computed K/V
// for (layer, position). Attention reads cache entries 0..position of this
// layer; any invalid entry throws DecodingIntegrityError.
void run_layer(const ModelBundle& bundle, KvCache& cache, int layer,
               std::size_t position, HiddenState& hidden);

HiddenState final_norm(const ModelBundle& bundle, const HiddenState& hidden);

// Embeds the token, executes the layers in `layers` in ascending order and
// passes the residual stream through unchanged for every other layer.
// Returns the final-normed top hidden state.
HiddenState forward_token(const ModelBundle& bundle, KvCache& cache,
                          int token_id, std::size_t position,
                          const LayerSet& layers);

// Stores K/V projections of `hidden` (the state leaving `from_layer`) for
// every layer above `from_layer`, tagged as copied.
void kv_fill_copied(const ModelBundle& bundle, KvCache& cache,
                    std::size_t position, int from_layer,
                    const HiddenState& hidden);

// hidden · lm_head. Throws NumericError on non-finite output.
std::vector<float> logits(const ModelBundle& bundle, const HiddenState& hidden);

}  // namespace hsd
