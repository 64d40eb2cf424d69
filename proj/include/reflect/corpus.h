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

#ifndef REFLECT_CORPUS_H_
#define REFLECT_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reflect/error.h"

namespace reflect {

// A translation direction between two lowercase ISO codes ("zu", "xh", "en").
class LanguagePair {
 public:
  // Throws ConfigError when either code is malformed or both are equal.
  LanguagePair(std::string source_lang, std::string target_lang);

  const std::string& source_lang() const { return source_lang_; }
  const std::string& target_lang() const { return target_lang_; }
  std::string direction() const;  // "zu→en"

  friend bool operator==(const LanguagePair&, const LanguagePair&) = default;

 private:
  std::string source_lang_;
  std::string target_lang_;
};

struct SentencePair {
  std::string id;  // "<corpus>:<0-based line index>" unless supplied
  std::string source_text;
  std::string reference_text;
  LanguagePair pair;
  std::string corpus_name;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

enum class CorpusFormat { kTsv, kJsonl, kMosesPair };

// "tsv", "jsonl", "moses-pair".
CorpusFormat ParseCorpusFormat(const std::string& name);
std::string CorpusFormatName(CorpusFormat format);

class FileNotFound : public Error {
 public:
  explicit FileNotFound(const std::filesystem::path& path)
      : Error("file not found: " + path.string()) {}
};

// A malformed input line. `line()` is 1-based.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus is empty") {}
};

struct CorpusSource {
  std::filesystem::path path;
  // Target-side file; used only by the Moses-pair format.
  std::filesystem::path target_path;
  CorpusFormat format = CorpusFormat::kTsv;
  // Defaults to the stem of `path`.
  std::string corpus_name;
};

// Reads every pair of a local corpus in file order. The first malformed line
// aborts the load with a FormatError naming it; nothing is skipped.
std::vector<SentencePair> LoadCorpus(const CorpusSource& source,
                                     const LanguagePair& pair);

// Deterministic sample without replacement, returned in original order.
// Returns everything when n >= pairs.size().
std::vector<SentencePair> SampleCorpus(const std::vector<SentencePair>& pairs,
                                       std::size_t n, uint64_t seed);

}  // namespace reflect

#endif  // REFLECT_CORPUS_H_
