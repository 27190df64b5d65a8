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

#include "hsd/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hsd/errors.h"

namespace hsd {
namespace {

std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ArgumentError("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<CorpusRecord> parse_corpus(std::istream& in) {
  std::vector<CorpusRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "corpus line " + std::to_string(line_no) + ": ";
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + "invalid JSON (" + e.what() + ")");
    }
    if (!doc.is_object()) throw FormatError(where + "expected a JSON object");
    for (const char* field : {"input", "reference"}) {
      if (!doc.contains(field)) {
        throw FormatError(where + "missing \"" + field + "\" field");
      }
      if (!doc[field].is_string()) {
        throw FormatError(where + "\"" + field + "\" must be a string");
      }
    }
    CorpusRecord record{doc["input"].get<std::string>(),
                        doc["reference"].get<std::string>()};
    if (tokenize(record.input).empty()) {
      throw FormatError(where + "\"input\" must not be empty");
    }
    records.push_back(std::move(record));
  }
  if (records.empty()) throw FormatError("corpus contains no records");
  return records;
}

std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus " + path.string());
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const std::vector<CorpusRecord>& records) {
  for (const CorpusRecord& r : records) {
    // Key order is fixed so files are byte-stable.
    nlohmann::ordered_json doc;
    doc["input"] = r.input;
    doc["reference"] = r.reference;
    out << doc.dump() << '\n';
  }
}

void save_corpus(const std::filesystem::path& path,
                 const std::vector<CorpusRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_corpus(out, records);
}

LengthDistribution LengthDistribution::fixed(std::size_t length) {
  LengthDistribution d;
  d.kind = Kind::kFixed;
  d.low = d.high = length;
  d.validate();
  return d;
}

LengthDistribution LengthDistribution::uniform(std::size_t low, std::size_t high) {
  LengthDistribution d;
  d.kind = Kind::kUniform;
  d.low = low;
  d.high = high;
  d.validate();
  return d;
}

LengthDistribution LengthDistribution::empirical(
    std::vector<std::pair<std::size_t, double>> histogram) {
  LengthDistribution d;
  d.kind = Kind::kHistogram;
  d.histogram = std::move(histogram);
  d.validate();
  return d;
}

LengthDistribution LengthDistribution::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts[0] == "fixed" && parts.size() == 2) {
    return fixed(parse_size(parts[1], "length"));
  }
  if (parts[0] == "uniform" && parts.size() == 3) {
    return uniform(parse_size(parts[1], "length"), parse_size(parts[2], "length"));
  }
  if (parts[0] == "hist" && parts.size() == 2) {
    std::vector<std::pair<std::size_t, double>> histogram;
    for (std::string_view bin : split(parts[1], ',')) {
      const auto kv = split(bin, '=');
      if (kv.size() != 2) throw ArgumentError("bad histogram bin '" + std::string(bin) + "'");
      double weight = 0.0;
      try {
        weight = std::stod(std::string(kv[1]));
      } catch (const std::exception&) {
        throw ArgumentError("bad histogram weight '" + std::string(kv[1]) + "'");
      }
      histogram.emplace_back(parse_size(kv[0], "length"), weight);
    }
    return empirical(std::move(histogram));
  }
  throw ArgumentError("unknown length distribution '" + std::string(text) +
                      "' (expected fixed:N, uniform:A:B or hist:L=W,...)");
}

void LengthDistribution::validate() const {
  switch (kind) {
    case Kind::kFixed:
      if (low < 1) throw ArgumentError("fixed length must be >= 1");
      break;
    case Kind::kUniform:
      if (low < 1 || low > high) {
        throw ArgumentError("uniform lengths need 1 <= low <= high");
      }
      break;
    case Kind::kHistogram: {
      if (histogram.empty()) throw ArgumentError("histogram must not be empty");
      double total = 0.0;
      for (const auto& [length, weight] : histogram) {
        if (length < 1) throw ArgumentError("histogram lengths must be >= 1");
        if (!(weight >= 0.0) || !std::isfinite(weight)) {
          throw ArgumentError("histogram weights must be finite and >= 0");
        }
        total += weight;
      }
      if (!(total > 0.0)) throw ArgumentError("histogram weights sum to zero");
      break;
    }
  }
}

std::vector<CorpusRecord> synth_corpus(const SynthSpec& spec) {
  if (spec.count < 1) throw ArgumentError("synthetic corpus count must be >= 1");
  if (spec.input_length < 1) throw ArgumentError("input_length must be >= 1");
  if (spec.vocabulary < 1) throw ArgumentError("vocabulary must be >= 1");
  spec.lengths.validate();

  std::mt19937_64 rng(spec.seed);
  auto word = [&] { return "w" + std::to_string(rng() % spec.vocabulary); };
  auto draw_length = [&]() -> std::size_t {
    const LengthDistribution& d = spec.lengths;
    switch (d.kind) {
      case LengthDistribution::Kind::kFixed:
        return d.low;
      case LengthDistribution::Kind::kUniform:
        return d.low + rng() % (d.high - d.low + 1);
      case LengthDistribution::Kind::kHistogram: {
        double total = 0.0;
        for (const auto& bin : d.histogram) total += bin.second;
        const double u = static_cast<double>(rng() >> 11) * 0x1p-53 * total;
        double acc = 0.0;
        for (const auto& [length, weight] : d.histogram) {
          acc += weight;
          if (u < acc) return length;
        }
        return d.histogram.back().first;
      }
    }
    return d.low;
  };
  auto sentence = [&](std::size_t n) {
    std::string text;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) text += ' ';
      text += word();
    }
    return text;
  };

  std::vector<CorpusRecord> records;
  records.reserve(spec.count);
  for (std::size_t r = 0; r < spec.count; ++r) {
    CorpusRecord record;
    record.input = sentence(spec.input_length);
    record.reference = sentence(draw_length());
    records.push_back(std::move(record));
  }
  return records;
}

Vocabulary::Vocabulary(const std::vector<Tokens>& texts, int capacity)
    : capacity_(capacity) {
  if (capacity < 2) throw ArgumentError("vocabulary capacity must be >= 2");
  std::map<std::string, std::size_t> freq;
  for (const Tokens& text : texts) {
    for (const std::string& w : text) ++freq[w];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  words_.push_back("<unk>");
  for (const auto& [w, n] : ranked) {
    if (static_cast<int>(words_.size()) >= capacity_) break;
    ids_.emplace(w, static_cast<int>(words_.size()));
    words_.push_back(w);
  }
}

std::vector<int> Vocabulary::encode(const Tokens& words) const {
  std::vector<int> ids;
  ids.reserve(words.size());
  for (const std::string& w : words) {
    auto it = ids_.find(w);
    ids.push_back(it == ids_.end() ? 0 : it->second);
  }
  return ids;
}

Tokens Vocabulary::decode(const std::vector<int>& ids) const {
  Tokens words;
  words.reserve(ids.size());
  for (int id : ids) {
    if (id >= 0 && static_cast<std::size_t>(id) < words_.size() && id != 0) {
      words.push_back(words_[id]);
    } else {
      words.push_back("unk" + std::to_string(id));
    }
  }
  return words;
}

std::string Vocabulary::decode_text(const std::vector<int>& ids) const {
  std::string text;
  for (const std::string& w : decode(ids)) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  return text;
}

}  // namespace hsd
