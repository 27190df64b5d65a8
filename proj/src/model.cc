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

#include "hsd/model.h"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "hsd/errors.h"

namespace hsd {
namespace {

constexpr char kMagic[4] = {'H', 'S', 'D', 'M'};
// version + five u32 config fields + f32 epsilon
constexpr std::size_t kHeaderBytes = 4 + 5 * 4 + 4;

enum class InitKind { kEmbedding, kProjection, kLmHead, kZero, kOne };

struct TensorSpec {
  std::string name;
  std::size_t size;
  InitKind init;
  std::size_t fan_in = 0;
};

// Visits every tensor in serialization order. `Bundle` is ModelBundle or
// const ModelBundle; layers must already be sized to config.num_layers.
template <typename Bundle, typename Fn>
void for_each_tensor(Bundle& bundle, Fn&& fn) {
  const ModelConfig& c = bundle.config;
  const std::size_t d = c.hidden_size;
  const std::size_t vocab = c.vocab_size;
  const std::size_t ffn = c.ffn_size();
  const std::size_t positions = c.max_positions;

  fn(TensorSpec{"token_embedding", vocab * d, InitKind::kEmbedding},
     bundle.token_embedding);
  fn(TensorSpec{"position_embedding", positions * d, InitKind::kEmbedding},
     bundle.position_embedding);
  for (std::size_t l = 0; l < bundle.layers.size(); ++l) {
    auto& w = bundle.layers[l];
    const std::string p = "layers." + std::to_string(l + 1) + ".";
    fn(TensorSpec{p + "ln1_gamma", d, InitKind::kOne}, w.ln1_gamma);
    fn(TensorSpec{p + "ln1_beta", d, InitKind::kZero}, w.ln1_beta);
    fn(TensorSpec{p + "w_query", d * d, InitKind::kProjection, d}, w.w_query);
    fn(TensorSpec{p + "b_query", d, InitKind::kZero}, w.b_query);
    fn(TensorSpec{p + "w_key", d * d, InitKind::kProjection, d}, w.w_key);
    fn(TensorSpec{p + "b_key", d, InitKind::kZero}, w.b_key);
    fn(TensorSpec{p + "w_value", d * d, InitKind::kProjection, d}, w.w_value);
    fn(TensorSpec{p + "b_value", d, InitKind::kZero}, w.b_value);
    fn(TensorSpec{p + "w_out", d * d, InitKind::kProjection, d}, w.w_out);
    fn(TensorSpec{p + "b_out", d, InitKind::kZero}, w.b_out);
    fn(TensorSpec{p + "ln2_gamma", d, InitKind::kOne}, w.ln2_gamma);
    fn(TensorSpec{p + "ln2_beta", d, InitKind::kZero}, w.ln2_beta);
    fn(TensorSpec{p + "w_up", d * ffn, InitKind::kProjection, d}, w.w_up);
    fn(TensorSpec{p + "b_up", ffn, InitKind::kZero}, w.b_up);
    fn(TensorSpec{p + "w_down", ffn * d, InitKind::kProjection, ffn}, w.w_down);
    fn(TensorSpec{p + "b_down", d, InitKind::kZero}, w.b_down);
  }
  fn(TensorSpec{"final_gamma", d, InitKind::kOne}, bundle.final_gamma);
  fn(TensorSpec{"final_beta", d, InitKind::kZero}, bundle.final_beta);
  fn(TensorSpec{"lm_head", d * vocab, InitKind::kLmHead, d}, bundle.lm_head);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32(const std::string& field) {
    if (bytes_.size() - offset_ < 4) {
      throw FormatError("truncated weight file while reading " + field);
    }
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      v |= static_cast<std::uint32_t>(bytes_[offset_ + k]) << (8 * k);
    }
    offset_ += 4;
    return v;
  }

  float f32(const std::string& field) { return std::bit_cast<float>(u32(field)); }

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return bytes_.size() - offset_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw ConfigError("invalid model config: " + what);
  };
  if (num_layers < 1) fail("num_layers must be >= 1");
  if (num_heads < 1) fail("num_heads must be >= 1");
  if (hidden_size < num_heads) fail("hidden_size must be >= num_heads");
  if (hidden_size % num_heads != 0) {
    fail("hidden_size " + std::to_string(hidden_size) +
         " not divisible by num_heads " + std::to_string(num_heads));
  }
  if (vocab_size < 2) fail("vocab_size must be >= 2");
  if (max_positions < 1) fail("max_positions must be >= 1");
  if (!(layernorm_epsilon > 0.0f) || !std::isfinite(layernorm_epsilon)) {
    fail("layernorm_epsilon must be a small positive real");
  }
}

void ModelBundle::validate() const {
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  if (layers.size() != static_cast<std::size_t>(config.num_layers)) {
    throw FormatError("layers: expected " + std::to_string(config.num_layers) +
                      " blocks, found " + std::to_string(layers.size()));
  }
  for_each_tensor(*this, [](const TensorSpec& spec, const std::vector<float>& t) {
    if (t.size() != spec.size) {
      throw FormatError(spec.name + ": expected " + std::to_string(spec.size) +
                        " values, found " + std::to_string(t.size()));
    }
    for (float v : t) {
      if (!std::isfinite(v)) throw FormatError(spec.name + ": non-finite value");
    }
  });
}

ModelBundle init_random(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  ModelBundle bundle;
  bundle.config = config;
  bundle.layers.resize(config.num_layers);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    // 24 random bits → exact float in [-1, 1).
    const auto bits = static_cast<float>(rng() >> 40);
    return bits * 0x1p-23f - 1.0f;
  };
  for_each_tensor(bundle, [&](const TensorSpec& spec, std::vector<float>& t) {
    t.assign(spec.size, 0.0f);
    switch (spec.init) {
      case InitKind::kZero:
        break;
      case InitKind::kOne:
        std::fill(t.begin(), t.end(), 1.0f);
        break;
      case InitKind::kEmbedding:
        for (float& v : t) v = uniform();
        break;
      case InitKind::kProjection: {
        const float scale = 1.0f / std::sqrt(static_cast<float>(spec.fan_in));
        for (float& v : t) v = uniform() * scale;
        break;
      }
      case InitKind::kLmHead: {
        const float scale = 4.0f / std::sqrt(static_cast<float>(spec.fan_in));
        for (float& v : t) v = uniform() * scale;
        break;
      }
    }
  });
  return bundle;
}

std::vector<std::uint8_t> serialize_bundle(const ModelBundle& bundle) {
  bundle.validate();
  const ModelConfig& c = bundle.config;
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, kBundleVersion);
  put_u32(out, static_cast<std::uint32_t>(c.num_layers));
  put_u32(out, static_cast<std::uint32_t>(c.hidden_size));
  put_u32(out, static_cast<std::uint32_t>(c.num_heads));
  put_u32(out, static_cast<std::uint32_t>(c.vocab_size));
  put_u32(out, static_cast<std::uint32_t>(c.max_positions));
  put_f32(out, c.layernorm_epsilon);
  for_each_tensor(bundle, [&out](const TensorSpec&, const std::vector<float>& t) {
    for (float v : t) put_f32(out, v);
  });
  const auto payload = std::span<const std::uint8_t>(out).subspan(sizeof(kMagic));
  put_u32(out, crc32_of(payload));
  return out;
}

ModelBundle deserialize_bundle(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError("magic: not an HSDM weight file");
  }
  if (bytes.size() < sizeof(kMagic) + kHeaderBytes + 4) {
    throw FormatError("header: truncated weight file");
  }
  Reader in(bytes.subspan(sizeof(kMagic)));
  const std::uint32_t version = in.u32("version");
  if (version != kBundleVersion) {
    throw FormatError("version: unsupported " + std::to_string(version));
  }
  auto as_int = [](std::uint32_t v, const char* field) {
    if (v > 1u << 30) throw FormatError(std::string(field) + ": implausible value");
    return static_cast<int>(v);
  };
  ModelBundle bundle;
  ModelConfig& c = bundle.config;
  c.num_layers = as_int(in.u32("num_layers"), "num_layers");
  c.hidden_size = as_int(in.u32("hidden_size"), "hidden_size");
  c.num_heads = as_int(in.u32("num_heads"), "num_heads");
  c.vocab_size = as_int(in.u32("vocab_size"), "vocab_size");
  c.max_positions = as_int(in.u32("max_positions"), "max_positions");
  c.layernorm_epsilon = in.f32("layernorm_epsilon");
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("header: ") + e.what());
  }

  bundle.layers.resize(c.num_layers);
  for_each_tensor(bundle, [&in](const TensorSpec& spec, std::vector<float>& t) {
    // Leave room for the trailer so truncation is reported per tensor.
    if (in.remaining() < 4 || (in.remaining() - 4) / 4 < spec.size) {
      throw FormatError(spec.name + ": truncated weight file");
    }
    t.resize(spec.size);
    for (float& v : t) {
      v = in.f32(spec.name);
      if (!std::isfinite(v)) throw FormatError(spec.name + ": non-finite value");
    }
  });
  const std::size_t payload_end = sizeof(kMagic) + in.offset();
  const std::uint32_t stored_crc = in.u32("checksum");
  if (in.remaining() != 0) {
    throw FormatError("trailer: " + std::to_string(in.remaining()) +
                      " unexpected bytes after checksum");
  }
  const std::uint32_t actual_crc =
      crc32_of(bytes.subspan(sizeof(kMagic), payload_end - sizeof(kMagic)));
  if (stored_crc != actual_crc) throw FormatError("checksum: CRC32 mismatch");
  return bundle;
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  const auto bytes = serialize_bundle(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open weight file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_bundle(bytes);
}

std::uint32_t bundle_checksum(const ModelBundle& bundle) {
  const auto bytes = serialize_bundle(bundle);
  return crc32_of(std::span<const std::uint8_t>(bytes).subspan(
      sizeof(kMagic), bytes.size() - sizeof(kMagic) - 4));
}

}  // namespace hsd
