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

#include "hsd/transformer.h"

#include <cmath>
#include <string>

#include "hsd/errors.h"

namespace hsd {
namespace {

// out[j] = (Σ_i x[i]·w[i·cols + j]) + bias[j], summed in ascending i.
void affine(std::span<const float> x, const std::vector<float>& w,
            const std::vector<float>& bias, std::vector<float>& out) {
  const std::size_t cols = bias.size();
  out.assign(cols, 0.0f);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const float xi = x[i];
    const float* row = w.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += xi * row[j];
  }
  for (std::size_t j = 0; j < cols; ++j) out[j] += bias[j];
}

void layer_norm(std::span<const float> x, const std::vector<float>& gamma,
                const std::vector<float>& beta, float epsilon,
                std::vector<float>& out) {
  const std::size_t n = x.size();
  float mean = 0.0f;
  for (float v : x) mean += v;
  mean /= static_cast<float>(n);
  float var = 0.0f;
  for (float v : x) var += (v - mean) * (v - mean);
  var /= static_cast<float>(n);
  const float inv = 1.0f / std::sqrt(var + epsilon);
  out.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = (x[k] - mean) * inv * gamma[k] + beta[k];
  }
}

float gelu(float x) {
  constexpr float kSqrt2OverPi = 0.7978845608f;
  return 0.5f * x * (1.0f + std::tanh(kSqrt2OverPi * (x + 0.044715f * x * x * x)));
}

void check_position(const ModelBundle& bundle, std::size_t position) {
  if (position >= static_cast<std::size_t>(bundle.config.max_positions)) {
    throw ArgumentError("position " + std::to_string(position) +
                        " exceeds max_positions " +
                        std::to_string(bundle.config.max_positions));
  }
}

}  // namespace

HiddenState embed(const ModelBundle& bundle, int token_id, std::size_t position) {
  const ModelConfig& c = bundle.config;
  if (token_id < 0 || token_id >= c.vocab_size) {
    throw ArgumentError("token id " + std::to_string(token_id) +
                        " outside vocabulary of " + std::to_string(c.vocab_size));
  }
  check_position(bundle, position);
  const auto d = static_cast<std::size_t>(c.hidden_size);
  HiddenState h(d);
  const float* tok = bundle.token_embedding.data() + token_id * d;
  const float* pos = bundle.position_embedding.data() + position * d;
  for (std::size_t k = 0; k < d; ++k) h[k] = tok[k] + pos[k];
  return h;
}

void run_layer(const ModelBundle& bundle, KvCache& cache, int layer,
               std::size_t position, HiddenState& hidden) {
  const ModelConfig& c = bundle.config;
  const LayerWeights& w = bundle.layer(layer);
  const auto d = static_cast<std::size_t>(c.hidden_size);
  const auto heads = static_cast<std::size_t>(c.num_heads);
  const auto head_dim = static_cast<std::size_t>(c.head_dim());

  std::vector<float> normed, query, key, value;
  layer_norm(hidden, w.ln1_gamma, w.ln1_beta, c.layernorm_epsilon, normed);
  affine(normed, w.w_query, w.b_query, query);
  affine(normed, w.w_key, w.b_key, key);
  affine(normed, w.w_value, w.b_value, value);
  cache.store(layer, position, key, value, KvOrigin::kComputed);

  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
  std::vector<float> attended(d, 0.0f);
  std::vector<float> scores(position + 1);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * head_dim;
    float max_score = -INFINITY;
    for (std::size_t p = 0; p <= position; ++p) {
      const auto k = cache.key(layer, p);
      float dot = 0.0f;
      for (std::size_t e = 0; e < head_dim; ++e) dot += query[off + e] * k[off + e];
      scores[p] = dot * scale;
      if (scores[p] > max_score) max_score = scores[p];
    }
    float total = 0.0f;
    for (std::size_t p = 0; p <= position; ++p) {
      scores[p] = std::exp(scores[p] - max_score);
      total += scores[p];
    }
    for (std::size_t p = 0; p <= position; ++p) {
      const auto v = cache.value(layer, p);
      const float weight = scores[p] / total;
      for (std::size_t e = 0; e < head_dim; ++e) attended[off + e] += weight * v[off + e];
    }
  }

  std::vector<float> projected;
  affine(attended, w.w_out, w.b_out, projected);
  for (std::size_t k = 0; k < d; ++k) hidden[k] += projected[k];

  std::vector<float> up, down;
  layer_norm(hidden, w.ln2_gamma, w.ln2_beta, c.layernorm_epsilon, normed);
  affine(normed, w.w_up, w.b_up, up);
  for (float& u : up) u = gelu(u);
  affine(up, w.w_down, w.b_down, down);
  for (std::size_t k = 0; k < d; ++k) hidden[k] += down[k];
}

HiddenState final_norm(const ModelBundle& bundle, const HiddenState& hidden) {
  HiddenState out;
  layer_norm(hidden, bundle.final_gamma, bundle.final_beta,
             bundle.config.layernorm_epsilon, out);
  return out;
}

HiddenState forward_token(const ModelBundle& bundle, KvCache& cache,
                          int token_id, std::size_t position,
                          const LayerSet& layers) {
  HiddenState h = embed(bundle, token_id, position);
  for (int layer : layers) {
    if (layer > bundle.config.num_layers) {
      throw ArgumentError("layer " + std::to_string(layer) +
                          " exceeds model depth");
    }
    run_layer(bundle, cache, layer, position, h);
  }
  return final_norm(bundle, h);
}

void kv_fill_copied(const ModelBundle& bundle, KvCache& cache,
                    std::size_t position, int from_layer,
                    const HiddenState& hidden) {
  const ModelConfig& c = bundle.config;
  std::vector<float> normed, key, value;
  for (int layer = from_layer + 1; layer <= c.num_layers; ++layer) {
    const LayerWeights& w = bundle.layer(layer);
    layer_norm(hidden, w.ln1_gamma, w.ln1_beta, c.layernorm_epsilon, normed);
    affine(normed, w.w_key, w.b_key, key);
    affine(normed, w.w_value, w.b_value, value);
    cache.store(layer, position, key, value, KvOrigin::kCopied);
  }
}

std::vector<float> logits(const ModelBundle& bundle, const HiddenState& hidden) {
  const ModelConfig& c = bundle.config;
  if (hidden.size() != static_cast<std::size_t>(c.hidden_size)) {
    throw ArgumentError("hidden state width mismatch");
  }
  const auto vocab = static_cast<std::size_t>(c.vocab_size);
  std::vector<float> out(vocab, 0.0f);
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    const float hi = hidden[i];
    const float* row = bundle.lm_head.data() + i * vocab;
    for (std::size_t j = 0; j < vocab; ++j) out[j] += hi * row[j];
  }
  for (std::size_t j = 0; j < vocab; ++j) {
    if (!std::isfinite(out[j])) {
      throw NumericError("non-finite logit at token " + std::to_string(j));
    }
  }
  return out;
}

}  // namespace hsd
