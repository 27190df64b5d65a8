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

// Reference transformer used only by tests. It recomputes the whole sequence
// layer by layer with no KV cache and no masking code path shared with the
// engine, but keeps the same per-element float operation order so results
// can be compared bit for bit.

#include <functional>
#include <vector>

#include "hsd/model.h"
#include "hsd/schedule.h"

namespace hsd::oracle {

using Matrix = std::vector<std::vector<float>>;  // [position][feature]

// Final-normed hidden states for every position. `runs(layer, position)`
// says whether the block executes for that token; when it does not the token
// keeps its residual stream and contributes no key/value at that layer. A
// token attending to a position without a key/value at its layer makes the
// oracle return false through `hole`.
Matrix naive_forward(const ModelBundle& bundle, const std::vector<int>& tokens,
                     const std::function<bool(int, std::size_t)>& runs,
                     bool* hole = nullptr);

// Every block runs for every token.
Matrix naive_forward_full(const ModelBundle& bundle, const std::vector<int>& tokens);

std::vector<float> naive_logits(const ModelBundle& bundle, const std::vector<float>& hidden);

// Greedy decoding by full recomputation. The prompt (all but its last token)
// runs every layer and step k uses executed_set(cfg, k).
std::vector<int> naive_greedy(const ModelBundle& bundle, const std::vector<int>& prompt,
                              std::size_t max_new_tokens, const ScheduleConfig& cfg);

// Log-probability (double) of `continuation` after `prompt` under full depth.
std::vector<double> naive_token_logprobs(const ModelBundle& bundle,
                                         const std::vector<int>& prompt,
                                         const std::vector<int>& continuation);

}  // namespace hsd::oracle
