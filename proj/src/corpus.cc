// Copyright 2026 The Reflect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "reflect/corpus.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "reflect/text.h"

namespace reflect {
namespace {

bool ValidLanguageCode(const std::string& code) {
  if (code.size() < 2 || code.size() > 3) return false;
  return std::all_of(code.begin(), code.end(),
                     [](char c) { return c >= 'a' && c <= 'z'; });
}

std::vector<std::string> ReadLines(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw FileNotFound(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

// Trims and checks one side of a pair. `line` is 1-based.
std::string CleanField(std::string_view raw, std::size_t line,
                       const char* field) {
  const std::string_view trimmed = text::Trim(raw);
  if (trimmed.empty()) {
    throw FormatError(line, std::string(field) + " is empty");
  }
  if (trimmed.find('\n') != std::string_view::npos ||
      trimmed.find('\r') != std::string_view::npos) {
    throw FormatError(line, std::string(field) + " contains a newline");
  }
  return std::string(trimmed);
}

std::string DefaultId(const std::string& corpus, std::size_t index) {
  return corpus + ":" + std::to_string(index);
}

std::vector<SentencePair> LoadTsv(const std::filesystem::path& path,
                                  const std::string& corpus,
                                  const LanguagePair& pair) {
  std::vector<SentencePair> out;
  const auto lines = ReadLines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = text::Split(lines[i], '\t');
    if (fields.size() != 2) {
      throw FormatError(i + 1, "expected exactly one tab separator, found " +
                                   std::to_string(fields.size() - 1));
    }
    out.push_back({DefaultId(corpus, i), CleanField(fields[0], i + 1, "source"),
                   CleanField(fields[1], i + 1, "reference"), pair, corpus});
  }
  return out;
}

std::vector<SentencePair> LoadJsonl(const std::filesystem::path& path,
                                    const std::string& corpus,
                                    const LanguagePair& pair) {
  std::vector<SentencePair> out;
  std::unordered_set<std::string> seen;
  const auto lines = ReadLines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw FormatError(line_no, "expected an object");
    for (const char* field : {"source", "reference"}) {
      if (!record.contains(field) || !record[field].is_string()) {
        throw FormatError(line_no,
                          std::string("missing string field \"") + field + "\"");
      }
    }
    std::string id = DefaultId(corpus, i);
    if (record.contains("id")) {
      if (!record["id"].is_string()) {
        throw FormatError(line_no, "field \"id\" must be a string");
      }
      id = record["id"].get<std::string>();
    }
    if (!seen.insert(id).second) {
      throw FormatError(line_no, "duplicate id \"" + id + "\"");
    }
    out.push_back({std::move(id),
                   CleanField(record["source"].get<std::string>(), line_no,
                              "source"),
                   CleanField(record["reference"].get<std::string>(), line_no,
                              "reference"),
                   pair, corpus});
  }
  return out;
}

std::vector<SentencePair> LoadMosesPair(const CorpusSource& source,
                                        const std::string& corpus,
                                        const LanguagePair& pair) {
  const auto src_lines = ReadLines(source.path);
  const auto ref_lines = ReadLines(source.target_path);
  if (src_lines.size() != ref_lines.size()) {
    throw AlignmentError("line counts differ: " + source.path.string() +
                         " has " + std::to_string(src_lines.size()) + ", " +
                         source.target_path.string() + " has " +
                         std::to_string(ref_lines.size()));
  }
  std::vector<SentencePair> out;
  out.reserve(src_lines.size());
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    out.push_back({DefaultId(corpus, i),
                   CleanField(src_lines[i], i + 1, "source"),
                   CleanField(ref_lines[i], i + 1, "reference"), pair, corpus});
  }
  return out;
}

}  // namespace

LanguagePair::LanguagePair(std::string source_lang, std::string target_lang)
    : source_lang_(std::move(source_lang)),
      target_lang_(std::move(target_lang)) {
  if (!ValidLanguageCode(source_lang_)) {
    throw ConfigError("source_lang", "invalid language code \"" +
                                         source_lang_ + "\"");
  }
  if (!ValidLanguageCode(target_lang_)) {
    throw ConfigError("target_lang", "invalid language code \"" +
                                         target_lang_ + "\"");
  }
  if (source_lang_ == target_lang_) {
    throw ConfigError("target_lang", "must differ from source_lang");
  }
}

std::string LanguagePair::direction() const {
  return source_lang_ + "→" + target_lang_;
}

CorpusFormat ParseCorpusFormat(const std::string& name) {
  if (name == "tsv") return CorpusFormat::kTsv;
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "moses-pair") return CorpusFormat::kMosesPair;
  throw ConfigError("corpus_format", "unknown format \"" + name + "\"");
}

std::string CorpusFormatName(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::kTsv:
      return "tsv";
    case CorpusFormat::kJsonl:
      return "jsonl";
    case CorpusFormat::kMosesPair:
      return "moses-pair";
  }
  return "tsv";
}

std::vector<SentencePair> LoadCorpus(const CorpusSource& source,
                                     const LanguagePair& pair) {
  const std::string corpus = source.corpus_name.empty()
                                 ? source.path.stem().string()
                                 : source.corpus_name;
  switch (source.format) {
    case CorpusFormat::kTsv:
      return LoadTsv(source.path, corpus, pair);
    case CorpusFormat::kJsonl:
      return LoadJsonl(source.path, corpus, pair);
    case CorpusFormat::kMosesPair:
      return LoadMosesPair(source, corpus, pair);
  }
  return {};
}

std::vector<SentencePair> SampleCorpus(const std::vector<SentencePair>& pairs,
                                       std::size_t n, uint64_t seed) {
  if (pairs.empty()) throw EmptyCorpus();
  if (n == 0) throw ConfigError("sample_size", "must be at least 1");
  if (n >= pairs.size()) return pairs;

  // Partial Fisher-Yates over indices. The bounded draw uses the raw engine
  // output so the sample is identical across standard library vendors.
  std::vector<std::size_t> index(pairs.size());
  std::iota(index.begin(), index.end(), 0);
  std::mt19937_64 engine(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t remaining = index.size() - i;
    const std::size_t j = i + static_cast<std::size_t>(engine() % remaining);
    std::swap(index[i], index[j]);
  }
  index.resize(n);
  std::sort(index.begin(), index.end());

  std::vector<SentencePair> out;
  out.reserve(n);
  for (std::size_t i : index) out.push_back(pairs[i]);
  return out;
}

}  // namespace reflect
