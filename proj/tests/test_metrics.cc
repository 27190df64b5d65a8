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

#include <doctest.h>

#include <cmath>
#include <random>

#include "hsd/errors.h"
#include "hsd/metrics.h"
#include "oracles/metric_fixtures.h"
#include "oracles/naive_metrics.h"

using namespace hsd;

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

Tokens random_words(std::mt19937_64& rng, std::size_t max_len, int alphabet) {
  Tokens out(rng() % (max_len + 1));
  for (auto& w : out) w = std::string(1, static_cast<char>('a' + rng() % alphabet));
  return out;
}

}  // namespace

TEST_CASE("tokenizer") {
  CHECK(tokenize("Hi, there!") == Tokens{"hi", ",", "there", "!"});
  CHECK(tokenize("  A\tb\nC  ") == Tokens{"a", "b", "c"});
  CHECK(tokenize("don't") == Tokens{"don", "'", "t"});
  CHECK(tokenize("").empty());
  CHECK(tokenize(" \t ").empty());
}

TEST_CASE("hand-computed fixtures") {
  for (const auto& f : oracle::kMetricFixtures) {
    CAPTURE(f.candidate);
    const Tokens c = tokenize(f.candidate), r = tokenize(f.reference);
    CHECK(round2(rouge_n(c, r, 1)) == f.rouge1);
    CHECK(round2(rouge_n(c, r, 2)) == f.rouge2);
    CHECK(round2(rouge_l(c, r)) == f.rougeL);
    const std::vector<Tokens> cs{c}, rs{r};
    CHECK(round2(bleu1(cs, rs)) == f.bleu1);
  }
  for (const auto& f : oracle::kNoveltyFixtures) {
    CHECK(round2(novel_ngram_pct(tokenize(f.input), tokenize(f.reference), f.n)) == f.pct);
  }
  // Corpus-level BLEU pools counts: (2 + 1) / (2 + 3), lengths 5 vs 5.
  const std::vector<Tokens> cs{tokenize("the cat"), tokenize("the the the")};
  const std::vector<Tokens> rs{tokenize("the cat sat"), tokenize("the cat")};
  CHECK(round2(bleu1(cs, rs)) == 60.00);
}

TEST_CASE("agreement with the counting oracle on random texts") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const Tokens c = random_words(rng, 12, 5), r = random_words(rng, 12, 5);
    for (int n : {1, 2, 3}) {
      CHECK(rouge_n(c, r, n) == doctest::Approx(oracle::naive_rouge_n(c, r, n)).epsilon(1e-12));
      CHECK(novel_ngram_pct(c, r, n) ==
            doctest::Approx(oracle::naive_novel(c, r, n)).epsilon(1e-12));
    }
    CHECK(rouge_l(c, r) == doctest::Approx(oracle::naive_rouge_l(c, r)).epsilon(1e-12));
    const std::vector<Tokens> cs{c}, rs{r};
    CHECK(bleu1(cs, rs) == doctest::Approx(oracle::naive_bleu1(cs, rs)).epsilon(1e-12));
  }
}

TEST_CASE("metric properties") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Tokens a = random_words(rng, 10, 4), b = random_words(rng, 10, 4);
    for (int n : {1, 2}) {
      CHECK(rouge_n(a, b, n) == doctest::Approx(rouge_n(b, a, n)));
      CHECK(rouge_n(a, b, n) >= 0.0);
      CHECK(rouge_n(a, b, n) <= 100.0);
    }
    CHECK(rouge_l(a, b) == doctest::Approx(rouge_l(b, a)));
    if (!a.empty()) {
      CHECK(rouge_n(a, a, 1) == 100.0);
      CHECK(rouge_l(a, a) == 100.0);
    }
  }
  // Shorter candidates with perfect precision are penalized more.
  const Tokens ref = tokenize("a b c d e f g h");
  double previous = 101.0;
  for (std::size_t len = 8; len >= 1; --len) {
    const std::vector<Tokens> cs{Tokens(ref.begin(), ref.begin() + len)}, rs{ref};
    const double score = bleu1(cs, rs);
    CHECK(score < previous);
    previous = score;
  }
}

TEST_CASE("degenerate inputs") {
  const Tokens empty, one{"a"};
  CHECK(rouge_n(empty, one, 1) == 0.0);
  CHECK(rouge_n(one, one, 2) == 0.0);
  CHECK(rouge_l(empty, one) == 0.0);
  CHECK(novel_ngram_pct(one, empty, 1) == 0.0);
  CHECK_THROWS_AS(rouge_n(one, one, 0), ArgumentError);
  const std::vector<Tokens> none, pair{one, one}, single{one};
  CHECK_THROWS_AS(bleu1(none, none), ArgumentError);
  CHECK_THROWS_AS(bleu1(pair, single), ArgumentError);
  const std::vector<Tokens> blank{empty};
  CHECK(bleu1(blank, single) == 0.0);
}

TEST_CASE("corpus scores average per-record values") {
  std::vector<Tokens> cs, rs, is;
  for (const auto& f : oracle::kMetricFixtures) {
    cs.push_back(tokenize(f.candidate));
    rs.push_back(tokenize(f.reference));
    is.push_back(tokenize(f.candidate));
  }
  const MetricReport report = score_corpus(cs, rs, is);
  double r1 = 0, rl = 0, nov = 0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    r1 += oracle::naive_rouge_n(cs[k], rs[k], 1);
    rl += oracle::naive_rouge_l(cs[k], rs[k]);
    nov += oracle::naive_novel(is[k], rs[k], 2);
  }
  CHECK(report.rouge1 == doctest::Approx(r1 / cs.size()));
  CHECK(report.rougeL == doctest::Approx(rl / cs.size()));
  CHECK(report.novel_bigram_pct == doctest::Approx(nov / cs.size()));
  CHECK(report.bleu1 == doctest::Approx(oracle::naive_bleu1(cs, rs)));
  CHECK(score_corpus(cs, rs).novel_unigram_pct == 0.0);
}
