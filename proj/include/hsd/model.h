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
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace hsd {

struct ModelConfig {
  int num_layers = 1;
  int hidden_size = 8;
  int num_heads = 1;
  int vocab_size = 2;
  int max_positions = 64;
  float layernorm_epsilon = 1e-5f;

  int head_dim() const { return hidden_size / num_heads; }
  // Feed-forward width is fixed at 4 × hidden_size.
  int ffn_size() const { return 4 * hidden_size; }

  // Throws ConfigError.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

// One pre-norm residual block. Matrices are row-major [in × out], so
// y[j] = Σ_i x[i]·W[i·out + j] + b[j].
struct LayerWeights {
  std::vector<float> ln1_gamma, ln1_beta;
  std::vector<float> w_query, b_query;
  std::vector<float> w_key, b_key;
  std::vector<float> w_value, b_value;
  std::vector<float> w_out, b_out;
  std::vector<float> ln2_gamma, ln2_beta;
  std::vector<float> w_up, b_up;
  std::vector<float> w_down, b_down;

  bool operator==(const LayerWeights&) const = default;
};

// Weights of a decoder-only transformer:
// embedding → L pre-norm blocks → final norm → LM head (no bias).
struct ModelBundle {
  ModelConfig config;
  std::vector<float> token_embedding;     // vocab_size × hidden_size
  std::vector<float> position_embedding;  // max_positions × hidden_size
  std::vector<LayerWeights> layers;       // layers[0] is layer 1
  std::vector<float> final_gamma, final_beta;
  std::vector<float> lm_head;             // hidden_size × vocab_size

  // Shape and finiteness check. Throws FormatError naming the tensor.
  void validate() const;

  const LayerWeights& layer(int index) const { return layers.at(index - 1); }

  bool operator==(const ModelBundle&) const = default;
};

// Deterministic weights from `seed`. Every value is drawn from std::mt19937_64
// as a 24-bit uniform u in [-1, 1) scaled per tensor:
//   embeddings            u
//   block projections     u / sqrt(fan_in)
//   LM head               4·u / sqrt(hidden_size)
// Biases are zero, norm gains one, norm shifts zero. Tensors are drawn in
// serialization order, so the stream is identical on every platform.
ModelBundle init_random(const ModelConfig& config, std::uint64_t seed);

// Weight file layout (little-endian):
//   "HSDM" | u32 version | u32 L, d_h, heads, D, max_positions | f32 epsilon
//   | f32 tensors in serialization order | u32 CRC32 of everything between
//   the magic and the trailer.
// Serialization order: token_embedding, position_embedding, then per layer
// ln1_gamma, ln1_beta, w_query, b_query, w_key, b_key, w_value, b_value,
// w_out, b_out, ln2_gamma, ln2_beta, w_up, b_up, w_down, b_down; then
// final_gamma, final_beta, lm_head.
inline constexpr std::uint32_t kBundleVersion = 1;

std::vector<std::uint8_t> serialize_bundle(const ModelBundle& bundle);
ModelBundle deserialize_bundle(std::span<const std::uint8_t> bytes);

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

// CRC32 of the serialized payload (the value stored in the file trailer).
std::uint32_t bundle_checksum(const ModelBundle& bundle);

}  // namespace hsd
