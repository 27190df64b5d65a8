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

#include "hsd/decoding.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "hsd/errors.h"
#include "hsd/transformer.h"

namespace hsd {
namespace {

void validate_policy(const ModelBundle& bundle, const DepthPolicy& policy) {
  const int depth = bundle.config.num_layers;
  std::visit(
      [depth](const auto& p) {
        p.validate();
        int policy_depth = 0;
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, ScheduleConfig>) {
          policy_depth = p.num_layers;
        } else {
          policy_depth = p.num_layers();
        }
        if (policy_depth != depth) {
          throw ConfigError("policy is configured for " +
                            std::to_string(policy_depth) +
                            " layers but the model has " + std::to_string(depth));
        }
      },
      policy);
}

void validate_request(const ModelBundle& bundle, const DecodeRequest& request) {
  const ModelConfig& c = bundle.config;
  if (request.prompt.empty()) throw ArgumentError("prompt must not be empty");
  if (request.max_new_tokens < 1) throw ArgumentError("max_new_tokens must be >= 1");
  if (request.beam_width < 1) throw ArgumentError("beam_width must be >= 1");
  if (request.prompt.size() + request.max_new_tokens >
      static_cast<std::size_t>(c.max_positions)) {
    throw ArgumentError("prompt length " + std::to_string(request.prompt.size()) +
                        " + max_new_tokens " +
                        std::to_string(request.max_new_tokens) +
                        " exceeds max_positions " + std::to_string(c.max_positions));
  }
  if (request.eos_token_id &&
      (*request.eos_token_id < 0 || *request.eos_token_id >= c.vocab_size)) {
    throw ArgumentError("eos_token_id outside vocabulary");
  }
  validate_policy(bundle, request.policy);
}

void finalize(GenerationRecord& record) {
  record.sequence_logprob = 0.0;
  for (double lp : record.token_logprobs) record.sequence_logprob += lp;
  const double total =
      std::accumulate(record.layer_counts.begin(), record.layer_counts.end(), 0.0);
  record.avg_layers =
      record.layer_counts.empty() ? 0.0 : total / record.layer_counts.size();
}

void append_step(GenerationRecord& record, const StepOutput& out, int token,
                 double logprob) {
  record.token_ids.push_back(token);
  record.layer_counts.push_back(out.layers_executed);
  if (out.exit_layer) {
    record.exit_layers.push_back(*out.exit_layer);
    record.confidence_traces.push_back(out.confidence_trace);
  }
  record.token_logprobs.push_back(logprob);
}

}  // namespace

std::string describe(const DepthPolicy& policy) {
  std::ostringstream out;
  if (const auto* s = std::get_if<ScheduleConfig>(&policy)) {
    out << to_string(s->kind);
    switch (s->kind) {
      case PolicyKind::kFull:
        break;
      case PolicyKind::kHierarchical:
        out << "_s=" << s->stride;
        break;
      case PolicyKind::kSkipDecode:
        out << "_min=" << s->min_exit << "_max=" << s->max_exit;
        break;
      case PolicyKind::kHsd:
        out << "_s=" << s->stride << "_min=" << s->min_exit
            << "_max=" << s->max_exit;
        break;
    }
  } else {
    const auto& c = std::get<ConfidencePolicy>(policy);
    out << "calm_d=" << c.decay << "_lambda0=" << c.lambda0;
  }
  return out.str();
}

DecodeSession::DecodeSession(const ModelBundle& bundle, DepthPolicy policy,
                             std::span<const int> prompt)
    : bundle_(&bundle),
      policy_(std::move(policy)),
      cache_(bundle.config),
      prompt_length_(prompt.size()),
      last_prompt_token_(prompt.empty() ? 0 : prompt.back()) {
  if (prompt.empty()) throw ArgumentError("prompt must not be empty");
  validate_policy(bundle, policy_);
  const LayerSet all = LayerSet::all(bundle.config.num_layers);
  for (std::size_t p = 0; p + 1 < prompt.size(); ++p) {
    forward_token(bundle, cache_, prompt[p], p, all);
  }
}

StepOutput DecodeSession::step(int input_token) {
  const ModelBundle& bundle = *bundle_;
  const std::size_t position = next_position();
  const std::size_t t = steps_;
  StepOutput out;
  if (const auto* schedule = std::get_if<ScheduleConfig>(&policy_)) {
    const LayerSet layers = executed_set(*schedule, t);
    out.logits = logits(bundle, forward_token(bundle, cache_, input_token,
                                              position, layers));
    out.layers_executed = static_cast<int>(layers.size());
  } else {
    const auto& confidence = std::get<ConfidencePolicy>(policy_);
    HiddenState h = embed(bundle, input_token, position);
    for (int layer = 1; layer <= bundle.config.num_layers; ++layer) {
      run_layer(bundle, cache_, layer, position, h);
      if (!confidence.check_layers.contains(layer)) continue;
      auto layer_logits = logits(bundle, final_norm(bundle, h));
      const auto probs = softmax(layer_logits);
      const double score = softmax_response(probs);
      out.confidence_trace.push_back(score);
      if (should_exit(confidence, layer, score)) {
        kv_fill_copied(bundle, cache_, position, layer, h);
        out.logits = std::move(layer_logits);
        out.layers_executed = layer;
        out.exit_layer = layer;
        break;
      }
    }
  }
  ++steps_;
  return out;
}

int argmax(std::span<const float> values) {
  if (values.empty()) throw ArgumentError("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return static_cast<int>(best);
}

std::vector<double> log_softmax(std::span<const float> logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (float l : logits) total += std::exp(static_cast<double>(l) - max_logit);
  const double log_total = std::log(total);
  std::vector<double> out(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = static_cast<double>(logits[k]) - max_logit - log_total;
  }
  return out;
}

std::vector<double> softmax(std::span<const float> logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(static_cast<double>(logits[k]) - max_logit);
    total += out[k];
  }
  for (double& p : out) p /= total;
  return out;
}

GenerationRecord decode_greedy(const ModelBundle& bundle,
                               const DecodeRequest& request) {
  validate_request(bundle, request);
  DecodeSession session(bundle, request.policy, request.prompt);
  GenerationRecord record;
  int input = session.last_prompt_token();
  for (std::size_t k = 0; k < request.max_new_tokens; ++k) {
    const StepOutput out = session.step(input);
    const int token = argmax(out.logits);
    append_step(record, out, token, log_softmax(out.logits)[token]);
    if (request.eos_token_id && token == *request.eos_token_id) break;
    input = token;
  }
  finalize(record);
  return record;
}

std::vector<Hypothesis> beam_search(const ModelBundle& bundle,
                                    const DecodeRequest& request) {
  validate_request(bundle, request);
  const auto width = static_cast<std::size_t>(request.beam_width);

  struct Candidate {
    std::size_t parent;
    int token;  // -1 carries a finished parent unchanged
    double score;
  };

  std::vector<Hypothesis> beams(1);
  beams[0].session = std::make_shared<DecodeSession>(bundle, request.policy,
                                                     request.prompt);

  for (std::size_t k = 0; k < request.max_new_tokens; ++k) {
    std::vector<Candidate> pool;
    std::vector<StepOutput> outputs(beams.size());
    std::vector<std::vector<double>> logprobs(beams.size());
    std::vector<std::shared_ptr<DecodeSession>> stepped(beams.size());
    for (std::size_t b = 0; b < beams.size(); ++b) {
      const Hypothesis& hyp = beams[b];
      if (hyp.finished) {
        pool.push_back({b, -1, hyp.record.sequence_logprob});
        continue;
      }
      // Copy-on-extend: a session shared with another beam is forked first.
      std::shared_ptr<DecodeSession> session;
      if (hyp.session.use_count() > 1) {
        session = std::make_shared<DecodeSession>(*hyp.session);
      } else {
        session = std::const_pointer_cast<DecodeSession>(hyp.session);
      }
      beams[b].session.reset();
      const int input = hyp.record.token_ids.empty() ? session->last_prompt_token()
                                                     : hyp.record.token_ids.back();
      outputs[b] = session->step(input);
      logprobs[b] = log_softmax(outputs[b].logits);
      stepped[b] = std::move(session);
      for (std::size_t v = 0; v < logprobs[b].size(); ++v) {
        pool.push_back({b, static_cast<int>(v),
                        hyp.record.sequence_logprob + logprobs[b][v]});
      }
    }

    // Lexicographic comparison of parent tokens followed by the new token.
    auto less_tokens = [&beams](const Candidate& x, const Candidate& y) {
      const auto& a = beams[x.parent].record.token_ids;
      const auto& b = beams[y.parent].record.token_ids;
      std::vector<int> ax(a), by(b);
      if (x.token >= 0) ax.push_back(x.token);
      if (y.token >= 0) by.push_back(y.token);
      return std::lexicographical_compare(ax.begin(), ax.end(), by.begin(), by.end());
    };
    auto better = [&](const Candidate& x, const Candidate& y) {
      if (x.score != y.score) return x.score > y.score;
      return less_tokens(x, y);
    };
    const std::size_t keep = std::min(width, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + keep, pool.end(), better);

    std::vector<Hypothesis> next;
    next.reserve(keep);
    for (std::size_t c = 0; c < keep; ++c) {
      const Candidate& cand = pool[c];
      Hypothesis hyp;
      hyp.record = beams[cand.parent].record;
      if (cand.token < 0) {
        hyp.finished = true;
        hyp.session = beams[cand.parent].session;
      } else {
        append_step(hyp.record, outputs[cand.parent], cand.token,
                    logprobs[cand.parent][cand.token]);
        hyp.record.sequence_logprob = cand.score;
        hyp.finished =
            request.eos_token_id && cand.token == *request.eos_token_id;
        hyp.session = stepped[cand.parent];
      }
      next.push_back(std::move(hyp));
    }
    beams = std::move(next);
    const bool all_finished = std::all_of(
        beams.begin(), beams.end(), [](const Hypothesis& h) { return h.finished; });
    if (all_finished) break;
  }

  for (Hypothesis& hyp : beams) {
    finalize(hyp.record);
    hyp.finished = true;
  }
  // Already ranked by the final selection.
  return beams;
}

GenerationRecord decode_beam(const ModelBundle& bundle,
                             const DecodeRequest& request) {
  return beam_search(bundle, request).front().record;
}

GenerationRecord decode(const ModelBundle& bundle, const DecodeRequest& request) {
  return request.beam_width == 1 ? decode_greedy(bundle, request)
                                 : decode_beam(bundle, request);
}

}  // namespace hsd
