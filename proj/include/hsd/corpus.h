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
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hsd/metrics.h"

namespace hsd {

struct CorpusRecord {
  std::string input;
  std::string reference;

  bool operator==(const CorpusRecord&) const = default;
};

// One JSON object per line with string fields "input" and "reference".
// Blank lines are skipped. Throws FormatError naming the 1-based line.
std::vector<CorpusRecord> parse_corpus(std::istream& in);
std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const std::vector<CorpusRecord>& records);
void save_corpus(const std::filesystem::path& path,
                 const std::vector<CorpusRecord>& records);

// Reference-length distribution for synthetic corpora.
struct LengthDistribution {
  enum class Kind { kFixed, kUniform, kHistogram };
  Kind kind = Kind::kFixed;
  std::size_t low = 10;   // fixed length, or uniform lower bound
  std::size_t high = 10;  // uniform upper bound (inclusive)
  std::vector<std::pair<std::size_t, double>> histogram;  // (length, weight)

  static LengthDistribution fixed(std::size_t length);
  static LengthDistribution uniform(std::size_t low, std::size_t high);
  static LengthDistribution empirical(
      std::vector<std::pair<std::size_t, double>> histogram);

  // "fixed:N", "uniform:A:B" or "hist:L1=W1,L2=W2,...".
  static LengthDistribution parse(std::string_view text);

  // Throws ArgumentError.
  void validate() const;
};

struct SynthSpec {
  std::size_t count = 1;
  LengthDistribution lengths;
  std::uint64_t seed = 0;
  std::size_t input_length = 8;
  std::size_t vocabulary = 48;  // distinct synthetic words "w0".."w{n-1}"
};

// Deterministic records of space-separated synthetic words whose references
// have lengths drawn from `spec.lengths` (std::mt19937_64 stream).
std::vector<CorpusRecord> synth_corpus(const SynthSpec& spec);

// Word ↔ token id mapping for a model vocabulary of `capacity` ids. Id 0 is
// "<unk>"; remaining ids go to corpus words by descending frequency, ties
// broken lexicographically. Ids without a word decode as "unk<id>".
class Vocabulary {
 public:
  Vocabulary(const std::vector<Tokens>& texts, int capacity);

  std::vector<int> encode(const Tokens& words) const;
  Tokens decode(const std::vector<int>& ids) const;
  std::string decode_text(const std::vector<int>& ids) const;

  int capacity() const { return capacity_; }
  std::size_t size() const { return words_.size(); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
  int capacity_;
};

}  // namespace hsd
