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

#include "hsd/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "hsd/errors.h"

namespace hsd {
namespace {

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts count_ngrams(const Tokens& tokens, int n) {
  NgramCounts counts;
  const auto width = static_cast<std::size_t>(n);
  if (tokens.size() < width) return counts;
  for (std::size_t k = 0; k + width <= tokens.size(); ++k) {
    ++counts[std::vector<std::string>(tokens.begin() + k, tokens.begin() + k + width)];
  }
  return counts;
}

int clipped_matches(const NgramCounts& candidate, const NgramCounts& reference) {
  int matches = 0;
  for (const auto& [gram, count] : candidate) {
    auto it = reference.find(gram);
    if (it != reference.end()) matches += std::min(count, it->second);
  }
  return matches;
}

int total(const NgramCounts& counts) {
  int n = 0;
  for (const auto& [gram, count] : counts) n += count;
  return n;
}

double f1(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

void check_order(int n) {
  if (n < 1) throw ArgumentError("n-gram order must be >= 1");
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      flush();
    } else if (std::ispunct(c)) {
      flush();
      tokens.emplace_back(1, raw);
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return tokens;
}

double rouge_n(const Tokens& candidate, const Tokens& reference, int n) {
  check_order(n);
  const NgramCounts cand = count_ngrams(candidate, n);
  const NgramCounts ref = count_ngrams(reference, n);
  const int cand_total = total(cand);
  const int ref_total = total(ref);
  if (cand_total == 0 || ref_total == 0) return 0.0;
  const int matches = clipped_matches(cand, ref);
  return 100.0 * f1(static_cast<double>(matches) / cand_total,
                    static_cast<double>(matches) / ref_total);
}

double rouge_l(const Tokens& candidate, const Tokens& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  // Rolling single-row LCS table.
  std::vector<int> row(reference.size() + 1, 0);
  for (const auto& c : candidate) {
    int diagonal = 0;
    for (std::size_t j = 1; j <= reference.size(); ++j) {
      const int above = row[j];
      row[j] = c == reference[j - 1] ? diagonal + 1 : std::max(row[j], row[j - 1]);
      diagonal = above;
    }
  }
  const double lcs = row.back();
  return 100.0 * f1(lcs / candidate.size(), lcs / reference.size());
}

double bleu1(std::span<const Tokens> candidates, std::span<const Tokens> references) {
  if (candidates.size() != references.size()) {
    throw ArgumentError("bleu1: " + std::to_string(candidates.size()) +
                        " candidates vs " + std::to_string(references.size()) +
                        " references");
  }
  if (candidates.empty()) throw ArgumentError("bleu1: empty corpus");
  long matches = 0;
  long cand_len = 0;
  long ref_len = 0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    matches += clipped_matches(count_ngrams(candidates[k], 1),
                               count_ngrams(references[k], 1));
    cand_len += static_cast<long>(candidates[k].size());
    ref_len += static_cast<long>(references[k].size());
  }
  if (cand_len == 0) return 0.0;
  const double precision = static_cast<double>(matches) / cand_len;
  const double brevity =
      std::exp(std::min(0.0, 1.0 - static_cast<double>(ref_len) / cand_len));
  return 100.0 * precision * brevity;
}

double novel_ngram_pct(const Tokens& input, const Tokens& reference, int n) {
  check_order(n);
  const NgramCounts ref = count_ngrams(reference, n);
  if (ref.empty()) return 0.0;
  const NgramCounts seen = count_ngrams(input, n);
  std::size_t unseen = 0;
  for (const auto& [gram, count] : ref) {
    if (!seen.contains(gram)) ++unseen;
  }
  return 100.0 * static_cast<double>(unseen) / static_cast<double>(ref.size());
}

MetricReport score_corpus(std::span<const Tokens> candidates,
                          std::span<const Tokens> references,
                          std::span<const Tokens> inputs) {
  MetricReport report;
  report.bleu1 = bleu1(candidates, references);
  if (!inputs.empty() && inputs.size() != references.size()) {
    throw ArgumentError("score_corpus: inputs and references differ in length");
  }
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    report.rouge1 += rouge_n(candidates[k], references[k], 1);
    report.rouge2 += rouge_n(candidates[k], references[k], 2);
    report.rougeL += rouge_l(candidates[k], references[k]);
    if (!inputs.empty()) {
      report.novel_unigram_pct += novel_ngram_pct(inputs[k], references[k], 1);
      report.novel_bigram_pct += novel_ngram_pct(inputs[k], references[k], 2);
    }
  }
  const double count = static_cast<double>(candidates.size());
  report.rouge1 /= count;
  report.rouge2 /= count;
  report.rougeL /= count;
  report.novel_unigram_pct /= count;
  report.novel_bigram_pct /= count;
  return report;
}

}  // namespace hsd
