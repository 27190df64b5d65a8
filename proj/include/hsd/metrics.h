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
#include <string>
#include <string_view>
#include <vector>

namespace hsd {

using Tokens = std::vector<std::string>;

// Lowercases, splits on whitespace and emits every ASCII punctuation
// character as its own token: "Hi, there!" → {"hi", ",", "there", "!"}.
Tokens tokenize(std::string_view text);

// Clipped n-gram F1 × 100. Empty inputs (or no n-grams) score 0.
double rouge_n(const Tokens& candidate, const Tokens& reference, int n);

// LCS F1 × 100 with P = LCS/|candidate|, R = LCS/|reference|.
double rouge_l(const Tokens& candidate, const Tokens& reference);

// Corpus-level clipped unigram precision × brevity penalty × 100, where
// BP = exp(min(0, 1 − ref_len/cand_len)). Throws ArgumentError on mismatched
// or empty lists.
double bleu1(std::span<const Tokens> candidates, std::span<const Tokens> references);

// Share of distinct reference n-grams that never occur in the input, × 100.
double novel_ngram_pct(const Tokens& input, const Tokens& reference, int n);

struct MetricReport {
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  double bleu1 = 0.0;
  double avg_layers = 0.0;
  double novel_unigram_pct = 0.0;
  double novel_bigram_pct = 0.0;
};

// ROUGE and novel n-gram percentages are per-record means; BLEU-1 is
// corpus-level. `inputs` may be empty, in which case novelty stays 0.
// avg_layers is left for the caller.
MetricReport score_corpus(std::span<const Tokens> candidates,
                          std::span<const Tokens> references,
                          std::span<const Tokens> inputs = {});

}  // namespace hsd
