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

// Command-line front end: generate, bench, schedule-table, metrics, synth
// and init.

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hsd/corpus.h"
#include "hsd/decoding.h"
#include "hsd/errors.h"
#include "hsd/harness.h"
#include "hsd/metrics.h"
#include "hsd/model.h"
#include "hsd/schedule.h"

namespace {

struct ModelFlags {
  std::string path;
  std::uint64_t seed = 0;
  hsd::ModelConfig config{36, 32, 4, 64, 512, 1e-5f};

  void add(CLI::App& app) {
    app.add_option("--model", path, "weight file (HSDM); overrides --seed");
    app.add_option("--seed", seed, "seed for a random model")->capture_default_str();
    app.add_option("--layers", config.num_layers, "random model depth")
        ->capture_default_str();
    app.add_option("--hidden", config.hidden_size, "random model hidden size")
        ->capture_default_str();
    app.add_option("--heads", config.num_heads, "random model attention heads")
        ->capture_default_str();
    app.add_option("--vocab", config.vocab_size, "random model vocabulary size")
        ->capture_default_str();
    app.add_option("--max-positions", config.max_positions,
                   "random model position capacity")
        ->capture_default_str();
  }

  std::variant<std::filesystem::path, hsd::RandomModel> source() const {
    if (!path.empty()) return std::filesystem::path(path);
    return hsd::RandomModel{config, seed};
  }

  hsd::ModelBundle load() const {
    if (!path.empty()) return hsd::load_bundle(path);
    return hsd::init_random(config, seed);
  }
};

struct PolicyFlags {
  hsd::PolicySpec spec;
  int t_max = 0;

  void add(CLI::App& app) {
    app.add_option("--policy", spec.kind, "full|hier|skipdecode|hsd|calm")
        ->check(CLI::IsMember({"full", "hier", "skipdecode", "hsd", "calm"}))
        ->capture_default_str();
    app.add_option("--s", spec.stride, "layers skipped between kept layers");
    app.add_option("--emin", spec.min_exit, "minimum scheduled top layers");
    app.add_option("--emax", spec.max_exit, "maximum scheduled top layers");
    app.add_option("--tmax", t_max, "schedule horizon (default: max-new-tokens)");
    app.add_option("--d", spec.decay, "confidence threshold decay per layer");
    app.add_option("--lambda0", spec.lambda0, "confidence threshold at layer 1")
        ->capture_default_str();
  }
};

std::vector<int> parse_ids(const std::string& text) {
  std::vector<int> ids;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    int value = 0;
    const char* first = text.data() + start;
    const char* last = text.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw hsd::ArgumentError("bad token id list '" + text + "'");
    }
    ids.push_back(value);
    start = end + 1;
  }
  return ids;
}

std::vector<hsd::Tokens> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<hsd::Tokens> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(hsd::tokenize(line));
  return lines;
}

std::string join(const std::vector<int>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += ',';
    out += std::to_string(values[k]);
  }
  return out;
}

int run_generate(const ModelFlags& model, const PolicyFlags& policy,
                 const std::string& prompt, const std::string& prompt_ids,
                 std::size_t max_new, int beam, std::optional<int> eos) {
  const hsd::ModelBundle bundle = model.load();
  const hsd::Vocabulary vocab({hsd::tokenize(prompt)}, bundle.config.vocab_size);
  hsd::DecodeRequest request;
  request.prompt = prompt_ids.empty() ? vocab.encode(hsd::tokenize(prompt))
                                      : parse_ids(prompt_ids);
  request.max_new_tokens = max_new;
  request.beam_width = beam;
  request.eos_token_id = eos;
  const int t_max = policy.t_max > 0 ? policy.t_max : static_cast<int>(max_new);
  request.policy = policy.spec.resolve(bundle.config.num_layers, t_max);

  const hsd::GenerationRecord record = hsd::decode(bundle, request);
  std::cout << "policy: " << hsd::describe(request.policy) << '\n';
  std::cout << "text: " << vocab.decode_text(record.token_ids) << '\n';
  std::cout << "ids: " << join(record.token_ids) << '\n';
  std::cout << "t\ttoken\tlayers\texit\tlogprob\n";
  for (std::size_t t = 0; t < record.token_ids.size(); ++t) {
    std::cout << t << '\t' << record.token_ids[t] << '\t' << record.layer_counts[t]
              << '\t'
              << (record.exit_layers.empty() ? std::string("-")
                                             : std::to_string(record.exit_layers[t]))
              << '\t' << record.token_logprobs[t] << '\n';
  }
  std::cout << "avg_layers: " << record.avg_layers << '\n';
  std::cout << "sequence_logprob: " << record.sequence_logprob << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoding-time depth policies for decoder-only transformers"};
  app.require_subcommand(1);

  // init
  auto* init = app.add_subcommand("init", "write a random model to a weight file");
  ModelFlags init_model;
  init_model.add(*init);
  std::string init_out;
  init->add_option("--out", init_out, "weight file to write")->required();

  // generate
  auto* generate = app.add_subcommand("generate", "decode one prompt and print the layer trace");
  ModelFlags gen_model;
  PolicyFlags gen_policy;
  gen_model.add(*generate);
  gen_policy.add(*generate);
  std::string prompt, prompt_ids;
  std::size_t gen_max_new = 16;
  int gen_beam = 1;
  std::optional<int> gen_eos;
  generate->add_option("--prompt", prompt, "prompt text");
  generate->add_option("--prompt-ids", prompt_ids, "comma-separated prompt token ids");
  generate->add_option("--max-new-tokens", gen_max_new)->capture_default_str();
  generate->add_option("--beam", gen_beam)->capture_default_str();
  generate->add_option("--eos", gen_eos, "stop token id");

  // bench
  auto* bench = app.add_subcommand("bench", "run policies over a corpus and write CSV reports");
  ModelFlags bench_model;
  PolicyFlags bench_policy;
  bench_model.add(*bench);
  bench_policy.add(*bench);
  std::string preset, corpus_path, out_path, synth_lengths = "fixed:32";
  std::size_t bench_max_new = 32, workers = 1, synth_count = 0, synth_input = 8;
  std::uint64_t synth_seed = 0;
  int bench_beam = 1;
  bool fixed_length = false;
  bench->add_option("--preset", preset, "policy grid (standard)");
  bench->add_option("--corpus", corpus_path, "JSONL corpus with input/reference fields");
  bench->add_option("--synth-count", synth_count, "use a synthetic corpus of this size");
  bench->add_option("--synth-lengths", synth_lengths, "fixed:N | uniform:A:B | hist:L=W,...")
      ->capture_default_str();
  bench->add_option("--synth-seed", synth_seed)->capture_default_str();
  bench->add_option("--synth-input-length", synth_input)->capture_default_str();
  bench->add_option("--max-new-tokens", bench_max_new)->capture_default_str();
  bench->add_option("--beam", bench_beam)->capture_default_str();
  bench->add_option("--workers", workers)->capture_default_str();
  bench->add_flag("--fixed-length", fixed_length,
                  "always generate max-new-tokens instead of the reference length");
  bench->add_option("--out", out_path, "report CSV (plot and per-record CSVs alongside)");

  // schedule-table
  auto* table = app.add_subcommand("schedule-table", "print executed layers per position");
  PolicyFlags table_policy;
  table_policy.add(*table);
  int table_layers = 36;
  table->add_option("--layers", table_layers, "model depth L")->capture_default_str();

  // metrics
  auto* metrics = app.add_subcommand("metrics", "score candidate lines against reference lines");
  std::string cand_path, ref_path, input_path, metrics_out;
  metrics->add_option("--candidates", cand_path)->required();
  metrics->add_option("--references", ref_path)->required();
  metrics->add_option("--inputs", input_path, "source lines for novel n-gram rates");
  metrics->add_option("--out", metrics_out, "CSV file (default: stdout)");

  // synth
  auto* synth = app.add_subcommand("synth", "emit a synthetic JSONL corpus");
  hsd::SynthSpec synth_spec;
  std::string lengths_text = "fixed:32", synth_out;
  synth->add_option("--count", synth_spec.count)->capture_default_str();
  synth->add_option("--lengths", lengths_text)->capture_default_str();
  synth->add_option("--seed", synth_spec.seed)->capture_default_str();
  synth->add_option("--input-length", synth_spec.input_length)->capture_default_str();
  synth->add_option("--out", synth_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*init) {
      const hsd::ModelBundle bundle = init_model.load();
      hsd::save_bundle(bundle, init_out);
      std::printf("wrote %s (crc32 %08x)\n", init_out.c_str(),
                  hsd::bundle_checksum(bundle));
      return 0;
    }
    if (*generate) {
      if (prompt.empty() && prompt_ids.empty()) {
        throw hsd::ArgumentError("generate needs --prompt or --prompt-ids");
      }
      return run_generate(gen_model, gen_policy, prompt, prompt_ids, gen_max_new,
                          gen_beam, gen_eos);
    }
    if (*bench) {
      hsd::ExperimentSpec spec;
      spec.model = bench_model.source();
      if (!corpus_path.empty() && synth_count > 0) {
        throw hsd::ArgumentError("use either --corpus or --synth-count, not both");
      }
      if (!corpus_path.empty()) {
        spec.corpus = std::filesystem::path(corpus_path);
      } else if (synth_count > 0) {
        hsd::SynthSpec s;
        s.count = synth_count;
        s.lengths = hsd::LengthDistribution::parse(synth_lengths);
        s.seed = synth_seed;
        s.input_length = synth_input;
        spec.corpus = s;
      } else {
        throw hsd::ArgumentError("bench needs --corpus or --synth-count");
      }
      spec.policies = preset.empty() ? std::vector<hsd::PolicySpec>{bench_policy.spec}
                                     : hsd::preset_grid(preset);
      spec.max_new_tokens = bench_max_new;
      spec.t_max = static_cast<std::size_t>(std::max(0, bench_policy.t_max));
      spec.beam_width = bench_beam;
      spec.workers = workers;
      spec.length_from_reference = !fixed_length;
      if (!out_path.empty()) spec.output = out_path;
      const auto reports = hsd::run_experiment(spec);
      if (out_path.empty()) hsd::write_report_csv(std::cout, reports);
      for (const auto& r : reports) {
        std::fprintf(stderr, "%s: %llu tokens in %.3f s (%.1f tokens/s)\n",
                     r.policy.c_str(),
                     static_cast<unsigned long long>(r.generated_tokens),
                     r.wall_seconds, r.tokens_per_second());
      }
      return 0;
    }
    if (*table) {
      const int t_max = table_policy.t_max > 0 ? table_policy.t_max : 100;
      const hsd::DepthPolicy policy = table_policy.spec.resolve(table_layers, t_max);
      const auto* cfg = std::get_if<hsd::ScheduleConfig>(&policy);
      if (cfg == nullptr) {
        throw hsd::ArgumentError("schedule-table needs a position-scheduled policy");
      }
      std::cout << hsd::schedule_table(*cfg);
      return 0;
    }
    if (*metrics) {
      const auto candidates = read_lines(cand_path);
      const auto references = read_lines(ref_path);
      const auto inputs = input_path.empty() ? std::vector<hsd::Tokens>{}
                                             : read_lines(input_path);
      const hsd::MetricReport m = hsd::score_corpus(candidates, references, inputs);
      std::ofstream file;
      if (!metrics_out.empty()) {
        file.open(metrics_out);
        if (!file) throw std::runtime_error("cannot open " + metrics_out);
      }
      std::ostream& out = metrics_out.empty() ? std::cout : file;
      char row[256];
      std::snprintf(row, sizeof(row), "%.2f,%.2f,%.2f,%.2f,%.2f,%.2f\n", m.rouge1,
                    m.rouge2, m.rougeL, m.bleu1, m.novel_unigram_pct,
                    m.novel_bigram_pct);
      out << "R-1,R-2,R-L,BLEU-1,novel_unigram_pct,novel_bigram_pct\n" << row;
      return 0;
    }
    if (*synth) {
      synth_spec.lengths = hsd::LengthDistribution::parse(lengths_text);
      const auto records = hsd::synth_corpus(synth_spec);
      if (synth_out.empty()) {
        hsd::write_corpus(std::cout, records);
      } else {
        hsd::save_corpus(synth_out, records);
        std::fprintf(stderr, "wrote %zu records to %s\n", records.size(),
                     synth_out.c_str());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
