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

#include <vector>

#include "hsd/errors.h"
#include "hsd/schedule.h"
#include "oracles/schedule_oracle.h"

using namespace hsd;

namespace {

std::vector<int> evens(int from, int to) {
  std::vector<int> out;
  for (int i = from; i <= to; i += 2) out.push_back(i);
  return out;
}

std::vector<ScheduleConfig> grid() {
  std::vector<ScheduleConfig> cfgs;
  for (int L : {8, 12, 32, 36}) {
    for (int s : {0, 1, 2, 3}) {
      for (auto [lo, hi] : std::vector<std::pair<int, int>>{{0, 8}, {0, 12}, {0, 18}, {10, 20}, {10, 24}}) {
        if (hi > L) continue;
        cfgs.push_back(ScheduleConfig::skip_decode(L, lo, hi, 64));
        cfgs.push_back(ScheduleConfig::hsd(L, s, lo, hi, 64));
      }
    }
  }
  return cfgs;
}

}  // namespace

TEST_CASE("budget boundary and midpoint values") {
  const auto cfg = ScheduleConfig::skip_decode(36, 10, 20, 100);
  CHECK(budget(cfg, 0) == 20);
  CHECK(budget(cfg, 100) == 10);
  CHECK(budget(cfg, 50) == 15);
  CHECK(budget(ScheduleConfig::skip_decode(36, 10, 24, 100), 150) == 10);
}

TEST_CASE("budget floors fractional values") {
  // (1·0 + 2·8) / 3 = 5.33
  CHECK(budget(ScheduleConfig::skip_decode(36, 0, 8, 3), 1) == 5);
}

TEST_CASE("invalid schedule configs are rejected") {
  CHECK_THROWS_AS(ScheduleConfig::skip_decode(36, 20, 10, 100), ConfigError);
  CHECK_THROWS_AS(ScheduleConfig::skip_decode(36, 0, 40, 100), ConfigError);
  CHECK_THROWS_AS(ScheduleConfig::skip_decode(36, 0, 8, 0), ConfigError);
  CHECK_THROWS_AS(ScheduleConfig::hierarchical(4, 4), ConfigError);
  CHECK_THROWS_AS(ScheduleConfig::hsd(4, -1, 0, 0, 10), ConfigError);

  ScheduleConfig raw;
  raw.kind = PolicyKind::kHierarchical;
  raw.num_layers = 3;
  raw.stride = 3;
  CHECK_THROWS_AS(hierarchical_set(raw), ConfigError);
  CHECK_THROWS_AS(budget(raw, 0), ConfigError);
}

TEST_CASE("hierarchical set keeps every (s+1)-th layer") {
  const auto s1 = hierarchical_set(ScheduleConfig::hierarchical(36, 1));
  CHECK(s1.indices() == evens(2, 36));
  CHECK(s1.size() == 18);

  const auto s2 = hierarchical_set(ScheduleConfig::hierarchical(36, 2));
  CHECK(s2.size() == 12);
  CHECK(s2.indices().front() == 3);
  CHECK(s2.indices().back() == 36);

  CHECK(hierarchical_set(ScheduleConfig::hierarchical(36, 0)) == LayerSet::all(36));
}

TEST_CASE("top set has exactly budget layers") {
  const auto cfg = ScheduleConfig::skip_decode(36, 0, 8, 100);
  CHECK(top_set(cfg, 0) == LayerSet::range(29, 36, 36));
  CHECK(top_set(cfg, 100).empty());
  CHECK(top_set(ScheduleConfig::skip_decode(36, 36, 36, 100), 7) == LayerSet::all(36));
}

TEST_CASE("executed set per policy") {
  const auto hsd_cfg = ScheduleConfig::hsd(36, 1, 0, 8, 100);
  CHECK(executed_set(hsd_cfg, 100).indices() == evens(2, 36));

  const auto first = executed_set(hsd_cfg, 0);
  CHECK(first.size() == 22);
  for (int odd : {29, 31, 33, 35}) CHECK(first.contains(odd));
  CHECK_FALSE(first.contains(27));

  const auto degenerate = ScheduleConfig::hsd(12, 0, 0, 0, 10);
  for (std::size_t t = 0; t <= 12; ++t) {
    CHECK(executed_set(degenerate, t) == LayerSet::all(12));
  }
  CHECK(executed_set(ScheduleConfig::full(5), 3) == LayerSet::all(5));

  // SkipDecode may run nothing once e_min = 0 is reached.
  CHECK(executed_set(ScheduleConfig::skip_decode(12, 0, 6, 10), 10).empty());
}

TEST_CASE("executed set matches the brute-force comprehension") {
  for (const auto& cfg : grid()) {
    for (std::size_t t = 0; t <= 80; ++t) {
      REQUIRE(executed_set(cfg, t).indices() == oracle::brute_executed(cfg, t));
    }
  }
}

TEST_CASE("budget is non-increasing, bounded and pinned at the ends") {
  for (const auto& cfg : grid()) {
    CHECK(budget(cfg, 0) == cfg.max_exit);
    CHECK(budget(cfg, cfg.max_length) == cfg.min_exit);
    CHECK(budget(cfg, cfg.max_length + 17) == cfg.min_exit);
    int previous = budget(cfg, 0);
    for (std::size_t t = 1; t <= 70; ++t) {
      const int b = budget(cfg, t);
      REQUIRE(b <= previous);
      REQUIRE(b >= cfg.min_exit);
      REQUIRE(b <= cfg.max_exit);
      previous = b;
    }
  }
}

TEST_CASE("monotone nesting of executed sets") {
  for (const auto& cfg : grid()) {
    for (std::size_t t1 = 0; t1 <= 64; ++t1) {
      const auto earlier = executed_set(cfg, t1);
      for (std::size_t t2 = t1; t2 <= 64; t2 += 7) {
        REQUIRE(executed_set(cfg, t2).is_subset_of(earlier));
      }
    }
  }
}

TEST_CASE("HSD cardinality law") {
  for (const auto& cfg : grid()) {
    if (cfg.kind != PolicyKind::kHsd) continue;
    for (std::size_t t = 0; t <= 64; ++t) {
      const auto top = top_set(cfg, t);
      int shared = 0;
      for (int i : top) shared += i % (cfg.stride + 1) == 0;
      const int expected = cfg.num_layers / (cfg.stride + 1) + budget(cfg, t) - shared;
      REQUIRE(static_cast<int>(executed_set(cfg, t).size()) == expected);
    }
  }
}

TEST_CASE("layer sets are validated") {
  CHECK_THROWS_AS(LayerSet({2, 1}, 4), ArgumentError);
  CHECK_THROWS_AS(LayerSet({1, 1}, 4), ArgumentError);
  CHECK_THROWS_AS(LayerSet({0}, 4), ArgumentError);
  CHECK_THROWS_AS(LayerSet({5}, 4), ArgumentError);
  CHECK(LayerSet({2, 4, 6, 29, 30, 31, 32}, 36).to_string() == "2,4,6,29-32");
  CHECK(LayerSet({1, 2}, 4).to_string() == "1,2");
}

TEST_CASE("expected average layers") {
  const std::vector<std::size_t> lengths{3, 17, 64, 1};
  CHECK(expected_avg_layers(ScheduleConfig::full(36), lengths) == 36.0);
  CHECK(expected_avg_layers(ScheduleConfig::hierarchical(36, 1), lengths) == 18.0);

  const std::vector<std::size_t> at_horizon(5, 100);
  const double skip =
      expected_avg_layers(ScheduleConfig::skip_decode(36, 10, 20, 100), at_horizon);
  CHECK(skip == doctest::Approx(15.0).epsilon(0.5 / 15.0));

  CHECK_THROWS_AS(expected_avg_layers(ScheduleConfig::full(36), {}), ArgumentError);
  const std::vector<std::size_t> zero{0};
  CHECK_THROWS_AS(expected_avg_layers(ScheduleConfig::full(36), zero), ArgumentError);
}

TEST_CASE("cross-model gap is (L1 - L2)/(s+1) when s+1 divides both depths") {
  const std::vector<std::size_t> lengths{64, 40, 64, 12};
  for (int s : {0, 1, 3}) {
    for (int e_max : {8, 12, 18}) {
      const double deep = expected_avg_layers(ScheduleConfig::hsd(36, s, 0, e_max, 64), lengths);
      const double shallow =
          expected_avg_layers(ScheduleConfig::hsd(32, s, 0, e_max, 64), lengths);
      CHECK(deep - shallow == doctest::Approx(4.0 / (s + 1)).epsilon(1e-12));
    }
  }
}
