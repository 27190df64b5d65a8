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

#include "hsd/harness.h"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "hsd/errors.h"

namespace hsd {
namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::size_t effective_t_max(const ExperimentSpec& spec) {
  return spec.t_max > 0 ? spec.t_max : spec.max_new_tokens;
}

std::filesystem::path sibling(const std::filesystem::path& out,
                              const std::string& suffix) {
  return out.parent_path() / (out.stem().string() + suffix);
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  writer(out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string PolicySpec::label() const {
  std::ostringstream out;
  out << kind;
  if (kind == "hier") {
    out << "_s=" << stride;
  } else if (kind == "skipdecode") {
    out << "_min=" << min_exit << "_max=" << max_exit;
  } else if (kind == "hsd") {
    out << "_s=" << stride << "_min=" << min_exit << "_max=" << max_exit;
  } else if (kind == "calm") {
    out << "_d=" << decay << "_lambda0=" << lambda0;
  }
  return out.str();
}

DepthPolicy PolicySpec::resolve(int num_layers, int t_max) const {
  if (kind == "calm") return ConfidencePolicy::every_layer(num_layers, decay, lambda0);
  switch (parse_policy_kind(kind)) {
    case PolicyKind::kFull:
      return ScheduleConfig::full(num_layers);
    case PolicyKind::kHierarchical:
      return ScheduleConfig::hierarchical(num_layers, stride);
    case PolicyKind::kSkipDecode:
      return ScheduleConfig::skip_decode(num_layers, min_exit, max_exit, t_max);
    case PolicyKind::kHsd:
      return ScheduleConfig::hsd(num_layers, stride, min_exit, max_exit, t_max);
  }
  throw ConfigError("unhandled policy kind " + kind);
}

std::vector<PolicySpec> preset_grid(std::string_view name) {
  if (name != "standard") {
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: standard)");
  }
  std::vector<PolicySpec> grid;
  grid.push_back(PolicySpec{"full"});
  for (double d : {0.02, 0.005}) {
    PolicySpec calm{"calm"};
    calm.decay = d;
    grid.push_back(calm);
  }
  for (int max_exit : {20, 24}) {
    PolicySpec skip{"skipdecode"};
    skip.min_exit = 10;
    skip.max_exit = max_exit;
    grid.push_back(skip);
  }
  for (int max_exit : {18, 12, 8}) {
    for (int stride : {1, 2}) {
      PolicySpec hsd{"hsd"};
      hsd.stride = stride;
      hsd.max_exit = max_exit;
      grid.push_back(hsd);
    }
  }
  return grid;
}

ModelBundle resolve_model(const ExperimentSpec& spec) {
  if (const auto* path = std::get_if<std::filesystem::path>(&spec.model)) {
    return load_bundle(*path);
  }
  const auto& random = std::get<RandomModel>(spec.model);
  return init_random(random.config, random.seed);
}

std::vector<CorpusRecord> resolve_corpus(const ExperimentSpec& spec) {
  if (const auto* path = std::get_if<std::filesystem::path>(&spec.corpus)) {
    return load_corpus(*path);
  }
  return synth_corpus(std::get<SynthSpec>(spec.corpus));
}

RunReport run_policy(const ModelBundle& bundle,
                     const std::vector<CorpusRecord>& corpus,
                     const PolicySpec& policy, const ExperimentSpec& spec) {
  if (corpus.empty()) throw ArgumentError("corpus must not be empty");
  if (spec.max_new_tokens < 1) throw ArgumentError("max_new_tokens must be >= 1");
  const ModelConfig& config = bundle.config;
  const DepthPolicy depth = policy.resolve(
      config.num_layers, static_cast<int>(effective_t_max(spec)));

  std::vector<Tokens> inputs, references;
  inputs.reserve(corpus.size());
  references.reserve(corpus.size());
  for (const CorpusRecord& r : corpus) {
    inputs.push_back(tokenize(r.input));
    references.push_back(tokenize(r.reference));
  }
  std::vector<Tokens> all_text(inputs);
  all_text.insert(all_text.end(), references.begin(), references.end());
  const Vocabulary vocab(all_text, config.vocab_size);

  const std::size_t count = corpus.size();
  std::vector<RecordSummary> summaries(count);
  std::vector<Tokens> candidates(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        const std::size_t gen_len =
            spec.length_from_reference
                ? std::min(spec.max_new_tokens,
                           std::max<std::size_t>(1, references[i].size()))
                : spec.max_new_tokens;
        if (gen_len >= static_cast<std::size_t>(config.max_positions)) {
          throw ArgumentError("generation length exceeds max_positions");
        }
        std::vector<int> prompt = vocab.encode(inputs[i]);
        if (prompt.empty()) throw ArgumentError("input tokenizes to nothing");
        const std::size_t room = config.max_positions - gen_len;
        if (prompt.size() > room) {
          prompt.erase(prompt.begin(), prompt.end() - static_cast<std::ptrdiff_t>(room));
        }
        DecodeRequest request;
        request.prompt = std::move(prompt);
        request.max_new_tokens = gen_len;
        request.beam_width = spec.beam_width;
        request.policy = depth;
        const GenerationRecord gen = decode(bundle, request);

        RecordSummary& s = summaries[i];
        s.index = i;
        s.generated_tokens = gen.token_ids.size();
        s.layer_counts = gen.layer_counts;
        for (int c : gen.layer_counts) s.executed_layers += static_cast<std::uint64_t>(c);
        s.avg_layers = gen.avg_layers;
        s.sequence_logprob = gen.sequence_logprob;
        candidates[i] = vocab.decode(gen.token_ids);
        s.text = vocab.decode_text(gen.token_ids);
        s.rouge1 = rouge_n(candidates[i], references[i], 1);
        s.rouge2 = rouge_n(candidates[i], references[i], 2);
        s.rougeL = rouge_l(candidates[i], references[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const auto start = std::chrono::steady_clock::now();
  const std::size_t workers = std::max<std::size_t>(1, std::min(spec.workers, count));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  const auto stop = std::chrono::steady_clock::now();

  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("record " + std::to_string(i) + ": " + e.what());
    }
  }

  RunReport report;
  report.policy = policy.label();
  report.records = std::move(summaries);
  report.aggregate = score_corpus(candidates, references, inputs);
  for (const RecordSummary& s : report.records) {
    report.executed_layers += s.executed_layers;
    report.generated_tokens += s.generated_tokens;
  }
  report.aggregate.avg_layers = static_cast<double>(report.executed_layers) /
                                static_cast<double>(report.generated_tokens);
  report.wall_seconds = std::chrono::duration<double>(stop - start).count();
  return report;
}

std::vector<RunReport> run_experiment(const ExperimentSpec& spec) {
  if (spec.policies.empty()) throw ArgumentError("no policies to run");
  const ModelBundle bundle = resolve_model(spec);
  const std::vector<CorpusRecord> corpus = resolve_corpus(spec);
  std::vector<RunReport> reports;
  for (const PolicySpec& policy : spec.policies) {
    reports.push_back(run_policy(bundle, corpus, policy, spec));
  }
  if (spec.output) {
    write_file(*spec.output, [&](std::ostream& o) { write_report_csv(o, reports); });
    write_file(sibling(*spec.output, ".plot.csv"),
               [&](std::ostream& o) { write_plot_csv(o, reports); });
    write_file(sibling(*spec.output, ".records.csv"),
               [&](std::ostream& o) { write_records_csv(o, reports); });
  }
  return reports;
}

void write_report_csv(std::ostream& out, std::span<const RunReport> reports) {
  out << "policy,avg_layers,R-1,R-2,R-L,BLEU-1\n";
  for (const RunReport& r : reports) {
    const MetricReport& m = r.aggregate;
    out << r.policy << ',' << fixed(m.avg_layers, 2) << ',' << fixed(m.rouge1, 2)
        << ',' << fixed(m.rouge2, 2) << ',' << fixed(m.rougeL, 2) << ','
        << fixed(m.bleu1, 2) << '\n';
  }
}

void write_plot_csv(std::ostream& out, std::span<const RunReport> reports) {
  out << "policy,avg_layers,metric,value\n";
  for (const RunReport& r : reports) {
    const MetricReport& m = r.aggregate;
    const std::pair<const char*, double> rows[] = {
        {"R-1", m.rouge1}, {"R-2", m.rouge2}, {"R-L", m.rougeL}, {"BLEU-1", m.bleu1}};
    for (const auto& [name, value] : rows) {
      out << r.policy << ',' << fixed(m.avg_layers, 4) << ',' << name << ','
          << fixed(value, 4) << '\n';
    }
  }
}

void write_records_csv(std::ostream& out, std::span<const RunReport> reports) {
  out << "policy,record,generated_tokens,executed_layers,avg_layers,"
         "sequence_logprob,R-1,R-2,R-L\n";
  for (const RunReport& r : reports) {
    for (const RecordSummary& s : r.records) {
      out << r.policy << ',' << s.index << ',' << s.generated_tokens << ','
          << s.executed_layers << ',' << fixed(s.avg_layers, 6) << ','
          << fixed(s.sequence_logprob, 6) << ',' << fixed(s.rouge1, 6) << ','
          << fixed(s.rouge2, 6) << ',' << fixed(s.rougeL, 6) << '\n';
    }
  }
}

std::string schedule_table(const ScheduleConfig& cfg) {
  cfg.validate();
  const bool scheduled =
      cfg.kind == PolicyKind::kSkipDecode || cfg.kind == PolicyKind::kHsd;
  std::ostringstream out;
  out << "# policy=" << describe(DepthPolicy{cfg}) << " L=" << cfg.num_layers
      << " t_max=" << cfg.max_length << '\n';
  out << "t\tbudget\tcount\tlayers\n";
  for (int t = 0; t <= cfg.max_length; ++t) {
    const LayerSet layers = executed_set(cfg, static_cast<std::size_t>(t));
    out << t << '\t';
    if (scheduled) {
      out << budget(cfg, static_cast<std::size_t>(t));
    } else {
      out << '-';
    }
    out << '\t' << layers.size() << '\t' << (layers.empty() ? "-" : layers.to_string())
        << '\n';
  }
  return out.str();
}

}  // namespace hsd
