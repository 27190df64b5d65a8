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
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "hsd/confidence.h"
#include "hsd/kv_cache.h"
#include "hsd/model.h"
#include "hsd/schedule.h"

namespace hsd {

// Position-scheduled depth (Full / Hierarchical / SkipDecode / HSD) or
// confidence-gated early exit.
using DepthPolicy = std::variant<ScheduleConfig, ConfidencePolicy>;

std::string describe(const DepthPolicy& policy);

struct DecodeRequest {
  std::vector<int> prompt;
  std::size_t max_new_tokens = 1;
  int beam_width = 1;
  DepthPolicy policy = ScheduleConfig{};
  std::optional<int> eos_token_id;
};

struct GenerationRecord {
  std::vector<int> token_ids;
  // Layers executed by the forward pass that produced each token.
  std::vector<int> layer_counts;
  // Confidence policies only: exit layer and the score at each checked layer.
  std::vector<int> exit_layers;
  std::vector<std::vector<double>> confidence_traces;
  std::vector<double> token_logprobs;
  double sequence_logprob = 0.0;
  double avg_layers = 0.0;

  bool operator==(const GenerationRecord&) const = default;
};

struct StepOutput {
  std::vector<float> logits;
  int layers_executed = 0;
  std::optional<int> exit_layer;
  std::vector<double> confidence_trace;
};

// One sequence's incremental decoding state. Construction runs the prompt
// (all but its last token) through every layer. Step k feeds one token at
// the next position and executes the policy's layers for generated
// position t = k; step 0 feeds the last prompt token.
class DecodeSession {
 public:
  DecodeSession(const ModelBundle& bundle, DepthPolicy policy,
                std::span<const int> prompt);

  StepOutput step(int input_token);

  std::size_t steps() const { return steps_; }
  std::size_t next_position() const { return prompt_length_ - 1 + steps_; }
  int last_prompt_token() const { return last_prompt_token_; }
  const KvCache& cache() const { return cache_; }

 private:
  const ModelBundle* bundle_;
  DepthPolicy policy_;
  KvCache cache_;
  std::size_t prompt_length_;
  int last_prompt_token_;
  std::size_t steps_ = 0;
};

// Lowest index wins ties.
int argmax(std::span<const float> values);
// Computed in double from float logits.
std::vector<double> log_softmax(std::span<const float> logits);
std::vector<double> softmax(std::span<const float> logits);

GenerationRecord decode_greedy(const ModelBundle& bundle,
                               const DecodeRequest& request);

struct Hypothesis {
  GenerationRecord record;
  bool finished = false;
  std::shared_ptr<const DecodeSession> session;
};

// Beam search over summed token log-probabilities (no length
// normalization). Finished hypotheses stay in the pool and compete by score.
// Returns the surviving beams, best first; ranking is score descending, then
// token ids lexicographically ascending.
std::vector<Hypothesis> beam_search(const ModelBundle& bundle,
                                    const DecodeRequest& request);

GenerationRecord decode_beam(const ModelBundle& bundle,
                             const DecodeRequest& request);

// decode_greedy for beam_width 1, decode_beam otherwise.
GenerationRecord decode(const ModelBundle& bundle, const DecodeRequest& request);

}  // namespace hsd
