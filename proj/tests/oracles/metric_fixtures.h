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

// Hand-computed metric values, two decimals.

#include <array>

namespace hsd::oracle {

struct MetricFixture {
  const char* candidate;
  const char* reference;
  double rouge1;
  double rouge2;
  double rougeL;
  double bleu1;  // single-pair corpus
};

inline constexpr std::array<MetricFixture, 10> kMetricFixtures{{
    {"the cat", "the cat sat", 80.00, 66.67, 80.00, 60.65},
    {"a c e", "a b c d e", 75.00, 0.00, 75.00, 51.34},
    {"the the the", "the cat", 40.00, 0.00, 40.00, 33.33},
    {"a b c d", "a b c d", 100.00, 100.00, 100.00, 100.00},
    {"x y", "a b", 0.00, 0.00, 0.00, 0.00},
    {"b a", "a b", 100.00, 0.00, 50.00, 100.00},
    {"Hello, world!", "hello world", 66.67, 0.00, 66.67, 50.00},
    {"a a b b", "a b a b", 100.00, 33.33, 75.00, 100.00},
    {"a b c d e f", "a b", 50.00, 33.33, 50.00, 33.33},
    {"the cat sat on the mat", "the cat is on the mat", 83.33, 60.00, 83.33, 83.33},
}};

struct NoveltyFixture {
  const char* input;
  const char* reference;
  int n;
  double pct;
};

inline constexpr std::array<NoveltyFixture, 4> kNoveltyFixtures{{
    {"a b c", "a b d", 2, 50.00},
    {"a b c", "a b d", 1, 33.33},
    {"a b", "a b a b", 2, 50.00},
    {"x", "x x x", 1, 0.00},
}};

}  // namespace hsd::oracle
