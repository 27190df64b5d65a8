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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hsd/corpus.h"
#include "hsd/decoding.h"
#include "hsd/metrics.h"
#include "hsd/model.h"

namespace hsd {

// A depth policy before the model depth and t_max are known.
struct PolicySpec {
  std::string kind = "full";  // full | hier | skipdecode | hsd | calm
  int stride = 0;
  int min_exit = 0;
  int max_exit = 0;
  double decay = 0.0;
  double lambda0 = 0.9;

  std::string label() const;
  DepthPolicy resolve(int num_layers, int t_max) const;
};

// "standard": full, CALM d ∈ {0.02, 0.005}, SkipDecode (E_min, E_max) ∈
// {(10,20), (10,24)} and HSD s ∈ {1,2} × E_max ∈ {18,12,8} with E_min = 0.
// Any single policy kind name is also accepted and yields that kind with
// default knobs.
std::vector<PolicySpec> preset_grid(std::string_view name);

struct RandomModel {
  ModelConfig config;
  std::uint64_t seed = 0;
};

struct ExperimentSpec {
  std::variant<std::filesystem::path, RandomModel> model;
  std::variant<std::filesystem::path, SynthSpec> corpus;
  std::vector<PolicySpec> policies;
  std::size_t max_new_tokens = 32;
  std::size_t t_max = 0;  // 0 means max_new_tokens
  int beam_width = 1;
  // Each record generates min(max_new_tokens, |reference tokens|) tokens
  // when set; otherwise exactly max_new_tokens.
  bool length_from_reference = true;
  std::size_t workers = 1;
  // Writes <out>, <out stem>.plot.csv and <out stem>.records.csv.
  std::optional<std::filesystem::path> output;
};

struct RecordSummary {
  std::size_t index = 0;
  std::size_t generated_tokens = 0;
  std::uint64_t executed_layers = 0;
  double avg_layers = 0.0;
  double sequence_logprob = 0.0;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  std::string text;
  std::vector<int> layer_counts;
};

struct RunReport {
  std::string policy;
  std::vector<RecordSummary> records;
  MetricReport aggregate;
  std::uint64_t executed_layers = 0;
  std::uint64_t generated_tokens = 0;
  double wall_seconds = 0.0;

  double tokens_per_second() const {
    return wall_seconds > 0.0 ? generated_tokens / wall_seconds : 0.0;
  }
};

ModelBundle resolve_model(const ExperimentSpec& spec);
std::vector<CorpusRecord> resolve_corpus(const ExperimentSpec& spec);

// Decodes every record under one policy and scores it. Records run on
// `workers` threads; results are ordered by record index. Errors are
// rethrown as std::runtime_error prefixed with "record <i>: ".
RunReport run_policy(const ModelBundle& bundle,
                     const std::vector<CorpusRecord>& corpus,
                     const PolicySpec& policy, const ExperimentSpec& spec);

// Runs every policy in spec.policies and writes the CSV outputs when
// spec.output is set.
std::vector<RunReport> run_experiment(const ExperimentSpec& spec);

// policy,avg_layers,R-1,R-2,R-L,BLEU-1 (two decimals).
void write_report_csv(std::ostream& out, std::span<const RunReport> reports);
// policy,avg_layers,metric,value with one row per (policy, metric).
void write_plot_csv(std::ostream& out, std::span<const RunReport> reports);
// Per-record rows, for recomputing aggregates.
void write_records_csv(std::ostream& out, std::span<const RunReport> reports);

// One row per position t = 0..t_max: budget, executed-set size and layers.
std::string schedule_table(const ScheduleConfig& cfg);

}  // namespace hsd
