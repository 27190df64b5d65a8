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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsd/errors.h"
#include "hsd/harness.h"

using namespace hsd;

namespace {

ModelConfig toy(int layers) { return ModelConfig{layers, 32, 4, 64, 160, 1e-5f}; }

ExperimentSpec synth_spec(int layers, std::size_t count, LengthDistribution lengths,
                          std::size_t max_new) {
  ExperimentSpec spec;
  spec.model = RandomModel{toy(layers), 11};
  SynthSpec synth;
  synth.count = count;
  synth.lengths = std::move(lengths);
  synth.seed = 5;
  spec.corpus = synth;
  spec.max_new_tokens = max_new;
  return spec;
}

PolicySpec policy(std::string kind, int stride = 0, int min_exit = 0, int max_exit = 0) {
  PolicySpec p;
  p.kind = std::move(kind);
  p.stride = stride;
  p.min_exit = min_exit;
  p.max_exit = max_exit;
  return p;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("corpus parsing") {
  std::istringstream good(
      "{\"input\": \"A b\", \"reference\": \"c d\"}\n\n"
      "{\"reference\": \"x\", \"input\": \"y\", \"id\": 3}\n");
  const auto records = parse_corpus(good);
  REQUIRE(records.size() == 2);
  CHECK(records[1] == CorpusRecord{"y", "x"});

  auto error_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_corpus(in);
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(error_of("{\"input\": \"a\", \"reference\": \"b\"}\n{\"input\": \"a\"}\n") ==
        "corpus line 2: missing \"reference\" field");
  CHECK(error_of("{\"input\": \"a\", \"reference\": 4}").find("line 1") != std::string::npos);
  CHECK(error_of("not json").find("corpus line 1: invalid JSON") == 0);
  CHECK(error_of("{\"input\": \" \", \"reference\": \"b\"}").find("must not be empty") !=
        std::string::npos);
  CHECK(error_of("\n\n") == "corpus contains no records");

  std::ostringstream written;
  write_corpus(written, records);
  std::istringstream reread(written.str());
  CHECK(parse_corpus(reread) == records);
}

TEST_CASE("synthetic corpora") {
  SynthSpec spec;
  spec.count = 20;
  spec.lengths = LengthDistribution::fixed(7);
  spec.seed = 3;
  const auto a = synth_corpus(spec);
  CHECK(a == synth_corpus(spec));
  for (const auto& r : a) {
    CHECK(tokenize(r.reference).size() == 7);
    CHECK(tokenize(r.input).size() == 8);
  }
  spec.seed = 4;
  CHECK(a != synth_corpus(spec));

  spec.count = 1000;
  spec.lengths = LengthDistribution::uniform(5, 15);
  double sum = 0;
  for (const auto& r : synth_corpus(spec)) {
    const auto n = tokenize(r.reference).size();
    CHECK(n >= 5);
    CHECK(n <= 15);
    sum += static_cast<double>(n);
  }
  // Uniform{5..15}: mean 10, variance (11² − 1)/12 = 10.
  const double sigma_of_mean = std::sqrt(10.0 / 1000.0);
  CHECK(std::abs(sum / 1000.0 - 10.0) < 3 * sigma_of_mean);

  spec.lengths = LengthDistribution::parse("hist:3=1,9=0");
  for (const auto& r : synth_corpus(spec)) CHECK(tokenize(r.reference).size() == 3);
  CHECK_THROWS_AS(LengthDistribution::parse("uniform:9:3"), ArgumentError);
  CHECK_THROWS_AS(LengthDistribution::parse("gauss:3"), ArgumentError);
  CHECK_THROWS_AS(LengthDistribution::parse("hist:3=0"), ArgumentError);
}

TEST_CASE("vocabulary ranks by frequency then spelling") {
  const Vocabulary vocab({{"b", "a", "c", "a"}, {"b", "d"}}, 4);
  CHECK(vocab.size() == 4);
  CHECK(vocab.encode({"a", "b", "c", "d", "zz"}) == std::vector<int>{1, 2, 3, 0, 0});
  CHECK(vocab.decode({1, 3, 0, 9}) == Tokens{"a", "c", "unk0", "unk9"});
  CHECK_THROWS_AS(Vocabulary({}, 1), ArgumentError);
}

TEST_CASE("full policy reports exactly the model depth") {
  auto spec = synth_spec(36, 4, LengthDistribution::uniform(3, 9), 16);
  spec.policies = {policy("full")};
  const auto reports = run_experiment(spec);
  CHECK(reports[0].aggregate.avg_layers == 36.0);
  std::ostringstream csv;
  write_report_csv(csv, reports);
  CHECK(csv.str().find("full,36.00,") != std::string::npos);
}

TEST_CASE("skipdecode average tracks the mean budget") {
  auto spec = synth_spec(36, 3, LengthDistribution::fixed(64), 64);
  spec.policies = {policy("skipdecode", 0, 10, 20)};
  const auto reports = run_experiment(spec);
  CHECK(std::abs(reports[0].aggregate.avg_layers - 15.0) <= 0.5);
  const std::vector<std::size_t> lengths(3, 64);
  CHECK(reports[0].aggregate.avg_layers ==
        doctest::Approx(expected_avg_layers(
            ScheduleConfig::skip_decode(36, 10, 20, 64), lengths)));
}

TEST_CASE("hsd depth gap between 36 and 32 layer models") {
  for (const auto& [stride, gap] : {std::pair{1, 2.0}, std::pair{2, 4.0 / 3.0}}) {
    double avg[2];
    for (int m = 0; m < 2; ++m) {
      auto spec = synth_spec(m == 0 ? 36 : 32, 2, LengthDistribution::fixed(40), 100);
      spec.t_max = 100;
      spec.length_from_reference = false;
      spec.policies = {policy("hsd", stride, 0, 18)};
      avg[m] = run_experiment(spec)[0].aggregate.avg_layers;
    }
    CHECK(std::abs(avg[0] - avg[1] - gap) <= 0.05);
  }
}

TEST_CASE("reports are reproducible and independent of worker count") {
  auto spec = synth_spec(6, 6, LengthDistribution::uniform(2, 8), 8);
  spec.policies = {policy("full"), policy("hsd", 1, 0, 3), policy("calm")};
  spec.policies[2].decay = 0.1;
  const auto dir = std::filesystem::temp_directory_path() / "hsd_harness_test";
  std::filesystem::create_directories(dir);

  spec.output = dir / "a.csv";
  run_experiment(spec);
  spec.workers = 3;
  spec.output = dir / "b.csv";
  const auto reports = run_experiment(spec);
  for (const char* suffix : {".csv", ".plot.csv", ".records.csv"}) {
    const auto a = slurp(dir / (std::string("a") + suffix));
    CHECK(!a.empty());
    CHECK(a == slurp(dir / (std::string("b") + suffix)));
  }

  for (const RunReport& r : reports) {
    double r1 = 0, rl = 0;
    std::uint64_t layers = 0, tokens = 0;
    for (const RecordSummary& s : r.records) {
      r1 += s.rouge1;
      rl += s.rougeL;
      layers += s.executed_layers;
      tokens += s.generated_tokens;
    }
    CHECK(r.aggregate.rouge1 == doctest::Approx(r1 / r.records.size()));
    CHECK(r.aggregate.rougeL == doctest::Approx(rl / r.records.size()));
    CHECK(r.aggregate.avg_layers == static_cast<double>(layers) / tokens);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("record errors name the record") {
  auto spec = synth_spec(4, 3, LengthDistribution::fixed(4), 200);
  spec.length_from_reference = false;
  spec.policies = {policy("full")};
  CHECK_THROWS_WITH_AS(run_experiment(spec), doctest::Contains("record 0: "),
                       std::runtime_error);
}

TEST_CASE("standard preset grid") {
  const auto grid = preset_grid("standard");
  REQUIRE(grid.size() == 11);
  std::vector<std::string> labels;
  for (const auto& p : grid) labels.push_back(p.label());
  CHECK(labels.front() == "full");
  CHECK(std::count(labels.begin(), labels.end(), "skipdecode_min=10_max=20") == 1);
  CHECK(std::count(labels.begin(), labels.end(), "hsd_s=2_min=0_max=8") == 1);
  CHECK(std::count(labels.begin(), labels.end(), "calm_d=0.005_lambda0=0.9") == 1);
  CHECK_THROWS_AS(preset_grid("nope"), ConfigError);
}

TEST_CASE("schedule table") {
  const std::string table = schedule_table(ScheduleConfig::hsd(36, 1, 0, 8, 100));
  std::istringstream in(table);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 2 + 101);
  CHECK(lines[0] == "# policy=hsd_s=1_min=0_max=8 L=36 t_max=100");
  CHECK(lines[1] == "t\tbudget\tcount\tlayers");
  CHECK(lines[2] == "0\t8\t22\t2,4,6,8,10,12,14,16,18,20,22,24,26,28-36");
  CHECK(lines.back() ==
        "100\t0\t18\t2,4,6,8,10,12,14,16,18,20,22,24,26,28,30,32,34,36");
  const std::string skip = schedule_table(ScheduleConfig::skip_decode(4, 0, 2, 2));
  CHECK(skip.find("\n2\t0\t0\t-\n") != std::string::npos);
}
